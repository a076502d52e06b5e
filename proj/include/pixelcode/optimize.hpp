#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "pixelcode/channel.hpp"
#include "pixelcode/coder.hpp"
#include "pixelcode/errors.hpp"
#include "pixelcode/rng.hpp"

namespace pixelcode {

constexpr std::size_t kMaxExhaustiveArity = 24;

/// A deterministic real-valued function of a bit assignment. For SISO the
/// arity is Q; for MIMO it is the total bit count of the joint coder,
/// flattened as all transmit coders then all receive coders.
struct Objective {
  std::function<double(const std::vector<std::uint8_t>&)> evaluate;
  std::size_t arity = 0;
};

struct SearchResult {
  std::vector<std::uint8_t> best_bits;
  double best_value = kNegInf;
  std::uint64_t evaluations = 0;
  double wall_time_s = 0.0;
  std::vector<double> sweep_trace;  // SEBO: objective value after each sweep
};

namespace detail {

class StopWatch {
public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

inline void check_arity(const Objective& obj) {
  if (obj.arity < 1) throw ValidationError("objective arity must be >= 1");
  if (!obj.evaluate) throw ValidationError("objective has no evaluate function");
}

}  // namespace detail

/// Ground-truth oracle: enumerates all 2^arity assignments in increasing
/// integer order (bits read MSB-first), so ties resolve to the smallest
/// integer automatically.
inline SearchResult exhaustive_search(const Objective& obj) {
  detail::check_arity(obj);
  if (obj.arity > kMaxExhaustiveArity)
    throw ArityTooLarge("exhaustive search over arity " + std::to_string(obj.arity) +
                        " refused (limit " + std::to_string(kMaxExhaustiveArity) + ")");
  detail::StopWatch watch;
  SearchResult res;
  std::vector<std::uint8_t> bits(obj.arity, 0);
  const std::uint64_t total = std::uint64_t{1} << obj.arity;
  for (std::uint64_t v = 0; v < total; ++v) {
    for (std::size_t i = 0; i < obj.arity; ++i)
      bits[i] = static_cast<std::uint8_t>((v >> (obj.arity - 1 - i)) & 1u);
    const double val = obj.evaluate(bits);
    ++res.evaluations;
    if (v == 0 || val > res.best_value) {
      res.best_value = val;
      res.best_bits = bits;
    }
  }
  res.wall_time_s = watch.seconds();
  return res;
}

/// Successive exhaustive Boolean optimization: consecutive index-ordered
/// blocks, each swept by full enumeration with the other bits held fixed.
/// A block update keeps the current assignment on ties, otherwise takes the
/// smallest-integer argmax, so the result does not depend on evaluation
/// order and the objective value never decreases. Stops after a sweep with
/// no change or after max_sweeps.
inline SearchResult sebo(const Objective& obj, std::size_t block_size, std::size_t max_sweeps,
                         std::vector<std::uint8_t> init) {
  detail::check_arity(obj);
  if (block_size < 1 || block_size > obj.arity || block_size > kMaxExhaustiveArity)
    throw BlockTooLarge("block_size " + std::to_string(block_size) +
                        " outside [1, min(arity, " + std::to_string(kMaxExhaustiveArity) +
                        ")] for arity " + std::to_string(obj.arity));
  if (max_sweeps < 1) throw ValidationError("max_sweeps must be >= 1");
  if (init.size() != obj.arity)
    throw ValidationError("init length " + std::to_string(init.size()) +
                          " does not match arity " + std::to_string(obj.arity));
  for (const auto b : init)
    if (b > 1) throw ValidationError("init bits must be 0/1");

  detail::StopWatch watch;
  SearchResult res;
  std::vector<std::uint8_t> bits = std::move(init);
  double current_value = kNegInf;
  bool have_value = false;

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t start = 0; start < obj.arity; start += block_size) {
      const std::size_t width = std::min(block_size, obj.arity - start);
      std::uint64_t current_assign = 0;
      for (std::size_t i = 0; i < width; ++i)
        current_assign = (current_assign << 1) | bits[start + i];

      const std::uint64_t total = std::uint64_t{1} << width;
      double current_assign_value = kNegInf;
      double best_value = kNegInf;
      std::uint64_t best_assign = 0;
      bool have_best = false;
      for (std::uint64_t a = 0; a < total; ++a) {
        for (std::size_t i = 0; i < width; ++i)
          bits[start + i] = static_cast<std::uint8_t>((a >> (width - 1 - i)) & 1u);
        const double val = obj.evaluate(bits);
        ++res.evaluations;
        if (a == current_assign) current_assign_value = val;
        if (!have_best || val > best_value) {
          best_value = val;
          best_assign = a;
          have_best = true;
        }
      }
      // Tie rule: the incumbent wins unless something is strictly better.
      const std::uint64_t chosen =
          best_value > current_assign_value ? best_assign : current_assign;
      const double chosen_value =
          best_value > current_assign_value ? best_value : current_assign_value;
      for (std::size_t i = 0; i < width; ++i)
        bits[start + i] = static_cast<std::uint8_t>((chosen >> (width - 1 - i)) & 1u);
      if (chosen != current_assign) changed = true;
      if (have_value && chosen_value < current_value)
        throw std::logic_error("sebo block update decreased the objective");
      current_value = chosen_value;
      have_value = true;
    }
    res.sweep_trace.push_back(current_value);
    if (!changed) break;
  }

  res.best_bits = std::move(bits);
  res.best_value = current_value;
  res.wall_time_s = watch.seconds();
  return res;
}

inline SearchResult sebo(const Objective& obj, std::size_t block_size,
                         std::size_t max_sweeps = 10) {
  return sebo(obj, block_size, max_sweeps, std::vector<std::uint8_t>(obj.arity, 0));
}

/// Best of `codebook_size` seeded uniform random coders, sampled without
/// replacement whenever the assignment space permits.
inline SearchResult codebook_search(const Objective& obj, std::size_t codebook_size,
                                    std::uint64_t seed) {
  detail::check_arity(obj);
  if (codebook_size < 1) throw ValidationError("codebook_size must be >= 1");
  detail::StopWatch watch;
  Rng rng(seed);
  SearchResult res;

  std::vector<std::vector<std::uint8_t>> codebook;
  codebook.reserve(codebook_size);
  if (obj.arity <= kMaxExhaustiveArity &&
      codebook_size * 2 >= (std::uint64_t{1} << obj.arity)) {
    // Dense regime: shuffle the whole space instead of rejection sampling.
    const std::uint64_t total = std::uint64_t{1} << obj.arity;
    std::vector<std::uint64_t> all(total);
    std::iota(all.begin(), all.end(), std::uint64_t{0});
    rng.shuffle(all);
    for (std::size_t i = 0; i < codebook_size; ++i)
      codebook.push_back(AntennaCoder::from_index(all[i % total], obj.arity).bits);
  } else {
    std::set<std::vector<std::uint8_t>> seen;
    while (codebook.size() < codebook_size) {
      auto bits = rng.random_bits(obj.arity);
      if (seen.insert(bits).second) codebook.push_back(std::move(bits));
    }
  }

  for (const auto& bits : codebook) {
    const double val = obj.evaluate(bits);
    if (++res.evaluations == 1 || val > res.best_value) {
      res.best_value = val;
      res.best_bits = bits;
    }
  }
  res.wall_time_s = watch.seconds();
  return res;
}

/// One seeded random coder; stands in for a conventional fixed antenna.
inline SearchResult random_baseline(const Objective& obj, std::uint64_t seed) {
  detail::check_arity(obj);
  detail::StopWatch watch;
  Rng rng(seed);
  SearchResult res;
  res.best_bits = rng.random_bits(obj.arity);
  res.best_value = obj.evaluate(res.best_bits);
  res.evaluations = 1;
  res.wall_time_s = watch.seconds();
  return res;
}

// --- objective adapters -------------------------------------------------------

inline Objective make_siso_objective(std::shared_ptr<const SisoInstance> inst) {
  Objective obj;
  obj.arity = static_cast<std::size_t>(inst->rx_antenna().q_ports);
  obj.evaluate = [inst](const std::vector<std::uint8_t>& bits) {
    AntennaCoder coder;
    coder.bits = bits;
    return siso_gain(*inst, coder);
  };
  return obj;
}

/// Total bit count of the joint MIMO coder (tx antennas then rx antennas).
inline std::size_t joint_arity(const MimoInstance& inst) {
  std::size_t arity = 0;
  for (int i = 0; i < inst.n_tx(); ++i) arity += static_cast<std::size_t>(inst.tx_antenna(i).q_ports);
  for (int i = 0; i < inst.n_rx(); ++i) arity += static_cast<std::size_t>(inst.rx_antenna(i).q_ports);
  return arity;
}

/// Split a flat joint assignment back into per-antenna coders, in the fixed
/// flattening order shared with dataset labels.
inline std::pair<std::vector<AntennaCoder>, std::vector<AntennaCoder>> split_joint_coder(
    const MimoInstance& inst, const std::vector<std::uint8_t>& bits) {
  if (bits.size() != joint_arity(inst))
    throw ValidationError("joint coder length does not match instance arity");
  std::pair<std::vector<AntennaCoder>, std::vector<AntennaCoder>> out;
  std::size_t pos = 0;
  const auto take = [&](int q) {
    AntennaCoder c;
    c.bits.assign(bits.begin() + static_cast<std::ptrdiff_t>(pos),
                  bits.begin() + static_cast<std::ptrdiff_t>(pos + static_cast<std::size_t>(q)));
    pos += static_cast<std::size_t>(q);
    return c;
  };
  for (int i = 0; i < inst.n_tx(); ++i) out.first.push_back(take(inst.tx_antenna(i).q_ports));
  for (int i = 0; i < inst.n_rx(); ++i) out.second.push_back(take(inst.rx_antenna(i).q_ports));
  return out;
}

inline std::vector<std::uint8_t> flatten_joint_coder(const std::vector<AntennaCoder>& tx_coders,
                                                     const std::vector<AntennaCoder>& rx_coders) {
  std::vector<std::uint8_t> bits;
  for (const auto& c : tx_coders) bits.insert(bits.end(), c.bits.begin(), c.bits.end());
  for (const auto& c : rx_coders) bits.insert(bits.end(), c.bits.begin(), c.bits.end());
  return bits;
}

inline Objective make_mimo_objective(std::shared_ptr<const MimoInstance> inst) {
  Objective obj;
  obj.arity = joint_arity(*inst);
  obj.evaluate = [inst](const std::vector<std::uint8_t>& bits) {
    const auto [tx, rx] = split_joint_coder(*inst, bits);
    try {
      return mimo_capacity(*inst, tx, rx);
    } catch (const ZeroPattern&) {
      return kNegInf;
    }
  };
  return obj;
}

/// SEBO over the flattened joint coder with the capacity objective. Blocks
/// are laid over the flat index space, so they span antenna boundaries when
/// block_size does not divide Q; that is the declared behavior.
inline SearchResult sebo_mimo(std::shared_ptr<const MimoInstance> inst, std::size_t block_size,
                              std::size_t max_sweeps, std::vector<std::uint8_t> init) {
  return sebo(make_mimo_objective(std::move(inst)), block_size, max_sweeps, std::move(init));
}

inline SearchResult sebo_mimo(std::shared_ptr<const MimoInstance> inst, std::size_t block_size,
                              std::size_t max_sweeps = 10) {
  const std::size_t arity = joint_arity(*inst);
  return sebo_mimo(std::move(inst), block_size, max_sweeps,
                   std::vector<std::uint8_t>(arity, 0));
}

}  // namespace pixelcode
