#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "pixelcode/dataset.hpp"
#include "pixelcode/hmsm.hpp"
#include "pixelcode/parallel.hpp"

namespace pixelcode {

struct HeadEvalStats {
  CodingScheme scheme;
  std::vector<Eigen::MatrixXi> confusion;  // per element; rows actual, cols predicted
  std::vector<double> per_element_accuracy;
  double mean_element_accuracy = 0.0;
  double mean_candidate_value = 0.0;
};

struct EvalReport {
  std::size_t n_test = 0;
  std::vector<HeadEvalStats> heads;
  double mean_selected_value = 0.0;
  double mean_label_value = 0.0;
  double mean_objective_ratio = 0.0;  // selected value / stored SEBO value
  std::size_t ratio_count = 0;
  std::size_t excluded_count = 0;  // records whose selected candidate was -inf
  bool dominance_ok = true;        // selected value == max per-head value, every record
  double mean_inference_s = 0.0;
  double mean_sebo_s = std::numeric_limits<double>::quiet_NaN();
};

struct EvalOptions {
  int jobs = 1;
  bool measure_sebo_time = true;
};

/// Run the ensemble over the dataset's test split: per-element confusion
/// against each head's own label encoding, objective ratios against the
/// stored SEBO values, and wall-time per record for the ensemble vs a fresh
/// SEBO run.
inline EvalReport evaluate_ensemble(const HmsmEnsemble& ensemble, const Dataset& ds,
                                    const std::vector<std::shared_ptr<const AntennaModel>>& antennas,
                                    const EvalOptions& opt = {}) {
  const DatasetConfig& cfg = ds.config;
  if (ds.test_indices.empty()) throw ValidationError("dataset test split is empty");
  if (antennas.size() != cfg.antenna_qs.size())
    throw ValidationError("antenna count does not match dataset config");

  // Map each head onto the dataset scheme that carries its labels.
  std::vector<std::size_t> head_scheme_idx(ensemble.size());
  for (std::size_t h = 0; h < ensemble.size(); ++h) {
    std::size_t found = cfg.schemes.size();
    for (std::size_t s = 0; s < cfg.schemes.size(); ++s)
      if (cfg.schemes[s] == ensemble.head(h).scheme()) found = s;
    if (found == cfg.schemes.size())
      throw ValidationError("dataset has no labels for head scheme " +
                            ensemble.head(h).scheme().label());
    head_scheme_idx[h] = found;
  }

  struct PerRecord {
    Selection sel;
    double inference_s = 0.0;
    double sebo_s = 0.0;
  };
  std::vector<PerRecord> results(ds.test_indices.size());

  parallel_for(ds.test_indices.size(), opt.jobs, [&](std::size_t t) {
    const DatasetRecord& rec = ds.records[ds.test_indices[t]];
    auto channel =
        std::make_shared<VirtualChannel>(sample_virtual_channel(cfg.k_samples, rec.channel_seed));
    PerRecord& out = results[t];
    using clock = std::chrono::steady_clock;
    if (cfg.kind == InstanceKind::Siso) {
      const SisoInstance inst(channel, antennas[0]);
      const auto t0 = clock::now();
      out.sel = select_best(ensemble, inst);
      out.inference_s = std::chrono::duration<double>(clock::now() - t0).count();
      if (opt.measure_sebo_time) {
        auto shared = std::make_shared<SisoInstance>(inst);
        const Objective obj = make_siso_objective(shared);
        const auto t1 = clock::now();
        sebo(obj, cfg.sebo_block, cfg.sebo_max_sweeps);
        out.sebo_s = std::chrono::duration<double>(clock::now() - t1).count();
      }
    } else {
      auto inst = std::make_shared<MimoInstance>(
          channel,
          std::vector<std::shared_ptr<const AntennaModel>>(antennas.begin(),
                                                           antennas.begin() + cfg.n_tx),
          std::vector<std::shared_ptr<const AntennaModel>>(antennas.begin() + cfg.n_tx,
                                                           antennas.end()),
          rec.snr);
      const auto t0 = clock::now();
      out.sel = select_best(ensemble, *inst);
      out.inference_s = std::chrono::duration<double>(clock::now() - t0).count();
      if (opt.measure_sebo_time) {
        const Objective obj = make_mimo_objective(inst);
        const auto t1 = clock::now();
        sebo(obj, cfg.sebo_block, cfg.sebo_max_sweeps);
        out.sebo_s = std::chrono::duration<double>(clock::now() - t1).count();
      }
    }
  });

  EvalReport report;
  report.n_test = ds.test_indices.size();
  report.heads.resize(ensemble.size());
  for (std::size_t h = 0; h < ensemble.size(); ++h) {
    HeadEvalStats& stats = report.heads[h];
    stats.scheme = ensemble.head(h).scheme();
    const std::size_t n_elements = cfg.elements_per_scheme(head_scheme_idx[h]);
    const int classes = stats.scheme.num_classes();
    stats.confusion.assign(n_elements, Eigen::MatrixXi::Zero(classes, classes));
    stats.per_element_accuracy.assign(n_elements, 0.0);
  }

  double sum_inference = 0.0, sum_sebo = 0.0, sum_selected = 0.0, sum_label = 0.0;
  double sum_ratio = 0.0;
  std::vector<double> sum_candidate(ensemble.size(), 0.0);
  std::vector<std::size_t> candidate_count(ensemble.size(), 0);

  for (std::size_t t = 0; t < results.size(); ++t) {
    const DatasetRecord& rec = ds.records[ds.test_indices[t]];
    const PerRecord& out = results[t];
    sum_inference += out.inference_s;
    sum_sebo += out.sebo_s;
    sum_label += rec.sebo_value;

    double head_max = kNegInf;
    for (std::size_t h = 0; h < ensemble.size(); ++h) {
      const double v = out.sel.per_head_values[h];
      head_max = std::max(head_max, v);
      if (std::isfinite(v)) {
        sum_candidate[h] += v;
        ++candidate_count[h];
      }
      // Element-wise confusion against this head's own encoding.
      const auto& label = rec.labels[head_scheme_idx[h]];
      std::size_t e = 0;
      for (const AntennaMap& map : out.sel.per_head_maps[h])
        for (const auto predicted : map.elements) {
          const auto actual = label[e];
          report.heads[h].confusion[e](static_cast<int>(actual), static_cast<int>(predicted)) += 1;
          ++e;
        }
    }
    if (!(out.sel.value == head_max)) report.dominance_ok = false;

    if (std::isfinite(out.sel.value) && rec.sebo_value > 0.0) {
      sum_selected += out.sel.value;
      sum_ratio += out.sel.value / rec.sebo_value;
      ++report.ratio_count;
    } else {
      ++report.excluded_count;
    }
  }

  const double n = static_cast<double>(report.n_test);
  report.mean_inference_s = sum_inference / n;
  if (opt.measure_sebo_time) report.mean_sebo_s = sum_sebo / n;
  report.mean_label_value = sum_label / n;
  if (report.ratio_count > 0) {
    report.mean_selected_value = sum_selected / static_cast<double>(report.ratio_count);
    report.mean_objective_ratio = sum_ratio / static_cast<double>(report.ratio_count);
  }
  for (std::size_t h = 0; h < ensemble.size(); ++h) {
    HeadEvalStats& stats = report.heads[h];
    stats.mean_candidate_value =
        candidate_count[h] > 0 ? sum_candidate[h] / static_cast<double>(candidate_count[h]) : kNegInf;
    long long correct_total = 0, count_total = 0;
    for (std::size_t e = 0; e < stats.confusion.size(); ++e) {
      const auto& c = stats.confusion[e];
      const long long correct = c.diagonal().sum();
      const long long count = c.sum();
      stats.per_element_accuracy[e] =
          count > 0 ? static_cast<double>(correct) / static_cast<double>(count) : 0.0;
      correct_total += correct;
      count_total += count;
    }
    stats.mean_element_accuracy =
        count_total > 0 ? static_cast<double>(correct_total) / static_cast<double>(count_total) : 0.0;
  }
  return report;
}

}  // namespace pixelcode
