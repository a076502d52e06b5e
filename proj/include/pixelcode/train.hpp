#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "pixelcode/dataset.hpp"
#include "pixelcode/head.hpp"
#include "pixelcode/parallel.hpp"

namespace pixelcode {

/// Classifier input matrix (one row per requested record index).
inline Eigen::MatrixXd build_feature_matrix(const Dataset& ds,
                                            const std::vector<std::size_t>& indices,
                                            const HeadHyper& hyper, int jobs = 1) {
  if (indices.empty()) throw ValidationError("no records requested");
  const Eigen::VectorXd probe =
      head_input(record_features(ds.config, ds.records.at(indices[0])), hyper);
  Eigen::MatrixXd x(indices.size(), probe.size());
  x.row(0) = probe.transpose();
  parallel_for(indices.size() - 1, jobs, [&](std::size_t i) {
    x.row(static_cast<Eigen::Index>(i + 1)) =
        head_input(record_features(ds.config, ds.records.at(indices[i + 1])), hyper)
            .transpose();
  });
  return x;
}

/// Train one head on the dataset's train split: an independent 2^M-class
/// classifier per antenna-map element, all sharing the standardized pooled
/// features. Deterministic for a fixed (dataset, scheme, hyper).
inline HeadModel train_head(const Dataset& ds, const CodingScheme& scheme,
                            const HeadHyper& hyper, int jobs = 1,
                            std::size_t train_limit = 0) {
  hyper.validate();
  scheme.validate();
  std::size_t scheme_idx = ds.config.schemes.size();
  for (std::size_t s = 0; s < ds.config.schemes.size(); ++s)
    if (ds.config.schemes[s] == scheme) scheme_idx = s;
  if (scheme_idx == ds.config.schemes.size())
    throw ValidationError("dataset has no labels for scheme " + scheme.label());

  std::vector<std::size_t> train = ds.train_indices;
  if (train_limit > 0 && train_limit < train.size()) train.resize(train_limit);
  if (train.empty()) throw ValidationError("dataset has no training records");

  HeadModel model;
  model.head_scheme = scheme;
  model.kind = ds.config.kind;
  model.k_samples = ds.config.k_samples;
  model.antenna_qs = ds.config.antenna_qs;
  model.hyper = hyper;

  Eigen::MatrixXd x = build_feature_matrix(ds, train, hyper, jobs);
  model.feature_mean = x.colwise().mean();
  Eigen::VectorXd var =
      (x.rowwise() - model.feature_mean.transpose()).array().square().colwise().mean();
  model.feature_std = var.cwiseMax(1e-24).cwiseSqrt();
  for (Eigen::Index i = 0; i < model.feature_std.size(); ++i)
    if (model.feature_std(i) < 1e-12) model.feature_std(i) = 1.0;
  x = (x.rowwise() - model.feature_mean.transpose()).array().rowwise() /
      model.feature_std.transpose().array();

  const std::size_t n_elements = model.total_elements();
  if (n_elements != ds.config.elements_per_scheme(scheme_idx))
    throw InvariantViolation("element count mismatch between head and dataset");
  const int classes = scheme.num_classes();
  model.elements.resize(n_elements);
  std::vector<int> labels(train.size());
  // Heads with different schemes also draw independent initializations, which
  // decorrelates their error patterns beyond the label relabeling alone.
  const std::uint64_t head_seed =
      mix_seed(hyper.seed, (scheme.variant == SchemeVariant::ReflectedGray ? 1000u : 0u) +
                               static_cast<std::uint64_t>(scheme.group_bits));
  for (std::size_t e = 0; e < n_elements; ++e) {
    for (std::size_t i = 0; i < train.size(); ++i)
      labels[i] = static_cast<int>(ds.records[train[i]].labels[scheme_idx][e]);
    model.elements[e] = train_mlp(x, labels, classes, hyper, mix_seed(head_seed, e));
  }
  return model;
}

}  // namespace pixelcode
