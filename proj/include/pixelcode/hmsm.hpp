#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "pixelcode/channel.hpp"
#include "pixelcode/coding.hpp"
#include "pixelcode/errors.hpp"

namespace pixelcode {

enum class InstanceKind { Siso, Mimo };

inline std::string to_string(InstanceKind k) { return k == InstanceKind::Siso ? "siso" : "mimo"; }

inline InstanceKind instance_kind_from_string(const std::string& s) {
  if (s == "siso") return InstanceKind::Siso;
  if (s == "mimo") return InstanceKind::Mimo;
  throw ValidationError("unknown instance kind '" + s + "' (want siso|mimo)");
}

/// Classifier input, analogous to a three-channel image: real part, imaginary
/// part, and a third map that carries the SNR for MIMO instances.
struct FeatureTensor {
  Eigen::MatrixXd map1, map2, map3;  // each 2K x 2K
  int k_samples = 0;
};

inline FeatureTensor build_features(const VirtualChannel& ch, InstanceKind kind,
                                    double snr_linear) {
  FeatureTensor f;
  f.k_samples = ch.k_samples;
  f.map1 = ch.h.real();
  f.map2 = ch.h.imag();
  f.map3 = kind == InstanceKind::Mimo ? (snr_linear * f.map1).eval() : f.map1;
  return f;
}

inline FeatureTensor build_features(const SisoInstance& inst) {
  return build_features(inst.channel(), InstanceKind::Siso, 1.0);
}

inline FeatureTensor build_features(const MimoInstance& inst) {
  return build_features(inst.channel(), InstanceKind::Mimo, inst.snr());
}

/// One head of the selection mechanism: anything that maps features to
/// encoded antenna maps. MIMO predictors emit one map per antenna in the
/// fixed flattening order (transmit antennas first).
class Predictor {
public:
  virtual ~Predictor() = default;
  virtual CodingScheme scheme() const = 0;
  virtual std::vector<AntennaMap> predict(const FeatureTensor& features) const = 0;
};

/// L heads with pairwise distinct coding schemes.
class HmsmEnsemble {
public:
  explicit HmsmEnsemble(std::vector<std::shared_ptr<const Predictor>> heads)
      : heads_(std::move(heads)) {
    if (heads_.empty()) throw ValidationError("ensemble needs at least one head");
    for (std::size_t i = 0; i < heads_.size(); ++i) {
      if (!heads_[i]) throw ValidationError("ensemble head is null");
      for (std::size_t j = i + 1; j < heads_.size(); ++j)
        if (heads_[i]->scheme() == heads_[j]->scheme())
          throw ValidationError("ensemble heads must have pairwise distinct schemes");
    }
  }

  std::size_t size() const { return heads_.size(); }
  const Predictor& head(std::size_t i) const { return *heads_[i]; }

private:
  std::vector<std::shared_ptr<const Predictor>> heads_;
};

struct Selection {
  std::vector<AntennaCoder> tx_coders;  // empty for SISO
  std::vector<AntennaCoder> rx_coders;  // one entry for SISO
  double value = kNegInf;
  std::vector<double> per_head_values;
  std::vector<std::vector<AntennaMap>> per_head_maps;
  std::size_t winner = 0;
};

namespace detail {

template <typename CandidateFn>
Selection select_over_heads(const HmsmEnsemble& ensemble, const FeatureTensor& features,
                            CandidateFn&& candidate_value) {
  Selection sel;
  sel.per_head_values.reserve(ensemble.size());
  std::vector<AntennaCoder> tx, rx;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    sel.per_head_maps.push_back(ensemble.head(i).predict(features));
    tx.clear();
    rx.clear();
    const double value = candidate_value(sel.per_head_maps.back(), tx, rx);
    sel.per_head_values.push_back(value);
    if (i == 0 || value > sel.value) {  // ties go to the lower head index
      sel.value = value;
      sel.winner = i;
      sel.tx_coders = tx;
      sel.rx_coders = rx;
    }
  }
  return sel;
}

}  // namespace detail

/// Decode each head's maps and keep the candidate the exact objective likes
/// best. A head whose coder radiates nothing scores -inf but cannot crash
/// the selection.
inline Selection select_best(const HmsmEnsemble& ensemble, const SisoInstance& inst) {
  const FeatureTensor features = build_features(inst);
  return detail::select_over_heads(
      ensemble, features,
      [&](const std::vector<AntennaMap>& maps, std::vector<AntennaCoder>&,
          std::vector<AntennaCoder>& rx) {
        if (maps.size() != 1)
          throw InvariantViolation("siso head must emit exactly one antenna map");
        rx.push_back(unzip(maps[0]));
        return siso_gain(inst, rx[0]);
      });
}

inline Selection select_best(const HmsmEnsemble& ensemble, const MimoInstance& inst) {
  const FeatureTensor features = build_features(inst);
  const std::size_t want = static_cast<std::size_t>(inst.n_tx() + inst.n_rx());
  return detail::select_over_heads(
      ensemble, features,
      [&](const std::vector<AntennaMap>& maps, std::vector<AntennaCoder>& tx,
          std::vector<AntennaCoder>& rx) {
        if (maps.size() != want)
          throw InvariantViolation("mimo head must emit one antenna map per antenna");
        for (int i = 0; i < inst.n_tx(); ++i) tx.push_back(unzip(maps[static_cast<std::size_t>(i)]));
        for (int i = 0; i < inst.n_rx(); ++i)
          rx.push_back(unzip(maps[static_cast<std::size_t>(inst.n_tx() + i)]));
        try {
          return mimo_capacity(inst, tx, rx);
        } catch (const ZeroPattern&) {
          return kNegInf;
        }
      });
}

/// Lower bound on the probability that at least one head is right:
/// 1 - (prod(1 - p_i))^alpha. Diagnostic only; alpha captures how correlated
/// the heads' error patterns are.
inline double ensemble_lower_bound(const std::vector<double>& per_head_accuracy, double alpha) {
  if (per_head_accuracy.empty()) throw DomainError("need at least one head accuracy");
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  double prod = 1.0;
  for (const double p : per_head_accuracy) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("head accuracy must lie in [0, 1]");
    prod *= 1.0 - p;
  }
  return 1.0 - std::pow(prod, alpha);
}

}  // namespace pixelcode
