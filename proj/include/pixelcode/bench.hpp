#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "pixelcode/eval.hpp"
#include "pixelcode/hmsm.hpp"
#include "pixelcode/optimize.hpp"
#include "pixelcode/textio.hpp"

namespace pixelcode {

struct BenchConfig {
  InstanceKind kind = InstanceKind::Siso;
  int k_samples = 8;
  int n_tx = 1;
  int n_rx = 1;
  double snr = 10.0;  // linear; MIMO only
  std::size_t count = 100;
  std::uint64_t seed = 1;
  std::size_t sebo_block = 12;
  std::size_t sebo_max_sweeps = 10;
  std::size_t codebook_size = 1024;
};

struct BenchRow {
  std::size_t instance_id = 0;
  std::string algo;
  std::string status = "ok";
  double value = std::numeric_limits<double>::quiet_NaN();
  double ratio_vs_sebo = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t evaluations = 0;
  double wall_time_s = 0.0;
};

struct BenchAlgoSummary {
  std::string algo;
  std::size_t ok_count = 0;
  std::size_t error_count = 0;
  double mean_value = 0.0;
  double mean_ratio_vs_sebo = 0.0;
  double mean_wall_time_s = 0.0;
  double time_ratio_vs_sebo = 0.0;
};

struct BenchOutput {
  std::vector<BenchRow> rows;
  std::vector<BenchAlgoSummary> summary;
};

namespace detail {

inline std::string error_tag(const std::exception& e) {
  if (dynamic_cast<const SingularNetwork*>(&e)) return "SingularNetwork";
  if (dynamic_cast<const ZeroPattern*>(&e)) return "ZeroPattern";
  if (dynamic_cast<const ArityTooLarge*>(&e)) return "ArityTooLarge";
  if (dynamic_cast<const BlockTooLarge*>(&e)) return "BlockTooLarge";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  return "RuntimeError";
}

}  // namespace detail

/// Run the algorithm set on a common seeded instance stream. Per-instance
/// failures become error rows; the runs that succeed still contribute to the
/// summary. Ratios are normalized by the SEBO value of the same instance.
inline BenchOutput run_bench(const BenchConfig& cfg,
                             const std::vector<std::shared_ptr<const AntennaModel>>& antennas,
                             const HmsmEnsemble* ensemble = nullptr) {
  if (cfg.count < 1) throw ValidationError("bench count must be >= 1");
  if (antennas.empty()) throw ValidationError("bench needs antennas");
  BenchOutput out;
  std::vector<std::string> algos = {"random", "codebook", "sebo"};
  if (ensemble) algos.push_back("hmsm");

  for (std::size_t i = 0; i < cfg.count; ++i) {
    auto channel = std::make_shared<VirtualChannel>(
        sample_virtual_channel(cfg.k_samples, mix_seed(cfg.seed, i)));
    std::shared_ptr<const SisoInstance> siso;
    std::shared_ptr<const MimoInstance> mimo;
    Objective obj;
    if (cfg.kind == InstanceKind::Siso) {
      siso = std::make_shared<SisoInstance>(channel, antennas[0]);
      obj = make_siso_objective(siso);
    } else {
      mimo = std::make_shared<MimoInstance>(
          channel,
          std::vector<std::shared_ptr<const AntennaModel>>(antennas.begin(),
                                                           antennas.begin() + cfg.n_tx),
          std::vector<std::shared_ptr<const AntennaModel>>(antennas.begin() + cfg.n_tx,
                                                           antennas.end()),
          cfg.snr);
      obj = make_mimo_objective(mimo);
    }

    double sebo_value = std::numeric_limits<double>::quiet_NaN();
    for (const auto& algo : algos) {
      BenchRow row;
      row.instance_id = i;
      row.algo = algo;
      try {
        if (algo == "random") {
          const SearchResult r = random_baseline(obj, mix_seed(cfg.seed, i) ^ 0x72616e64ULL);
          row.value = r.best_value;
          row.evaluations = r.evaluations;
          row.wall_time_s = r.wall_time_s;
        } else if (algo == "codebook") {
          const SearchResult r =
              codebook_search(obj, cfg.codebook_size, mix_seed(cfg.seed, i) ^ 0x636f6465ULL);
          row.value = r.best_value;
          row.evaluations = r.evaluations;
          row.wall_time_s = r.wall_time_s;
        } else if (algo == "sebo") {
          const SearchResult r = sebo(obj, cfg.sebo_block, cfg.sebo_max_sweeps);
          row.value = r.best_value;
          row.evaluations = r.evaluations;
          row.wall_time_s = r.wall_time_s;
          sebo_value = r.best_value;
        } else {  // hmsm
          using clock = std::chrono::steady_clock;
          const auto t0 = clock::now();
          const Selection sel = cfg.kind == InstanceKind::Siso ? select_best(*ensemble, *siso)
                                                               : select_best(*ensemble, *mimo);
          row.wall_time_s = std::chrono::duration<double>(clock::now() - t0).count();
          row.value = sel.value;
          row.evaluations = static_cast<std::uint64_t>(sel.per_head_values.size());
          if (!std::isfinite(sel.value)) row.status = "ZeroPattern";
        }
      } catch (const std::exception& e) {
        row.status = detail::error_tag(e);
      }
      out.rows.push_back(std::move(row));
    }
    // SEBO runs after random/codebook in the row order above, so backfill.
    for (std::size_t r = out.rows.size() - algos.size(); r < out.rows.size(); ++r)
      if (out.rows[r].status == "ok" && std::isfinite(sebo_value) && sebo_value != 0.0)
        out.rows[r].ratio_vs_sebo = out.rows[r].value / sebo_value;
  }

  double sebo_mean_time = 0.0;
  for (const auto& algo : algos) {
    BenchAlgoSummary s;
    s.algo = algo;
    double sum_v = 0.0, sum_r = 0.0, sum_t = 0.0;
    std::size_t ratio_n = 0;
    for (const auto& row : out.rows) {
      if (row.algo != algo) continue;
      if (row.status != "ok") {
        ++s.error_count;
        continue;
      }
      ++s.ok_count;
      sum_v += row.value;
      sum_t += row.wall_time_s;
      if (std::isfinite(row.ratio_vs_sebo)) {
        sum_r += row.ratio_vs_sebo;
        ++ratio_n;
      }
    }
    if (s.ok_count > 0) {
      s.mean_value = sum_v / static_cast<double>(s.ok_count);
      s.mean_wall_time_s = sum_t / static_cast<double>(s.ok_count);
    }
    if (ratio_n > 0) s.mean_ratio_vs_sebo = sum_r / static_cast<double>(ratio_n);
    if (algo == "sebo") sebo_mean_time = s.mean_wall_time_s;
    out.summary.push_back(std::move(s));
  }
  for (auto& s : out.summary)
    s.time_ratio_vs_sebo = sebo_mean_time > 0.0 ? s.mean_wall_time_s / sebo_mean_time : 0.0;
  return out;
}

/// Deterministic per-instance results. Schema:
/// instance,algo,status,value,ratio_vs_sebo,evaluations
inline void write_bench_results_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "instance,algo,status,value,ratio_vs_sebo,evaluations\n";
  for (const auto& r : rows)
    out << r.instance_id << "," << r.algo << "," << r.status << "," << fmt_double(r.value)
        << "," << fmt_double(r.ratio_vs_sebo) << "," << r.evaluations << "\n";
}

/// Measured means, including wall time. Schema:
/// algo,ok_count,error_count,mean_value,mean_ratio_vs_sebo,mean_wall_time_s,time_ratio_vs_sebo
inline void write_bench_summary_csv(std::ostream& out,
                                    const std::vector<BenchAlgoSummary>& summary) {
  out << "algo,ok_count,error_count,mean_value,mean_ratio_vs_sebo,mean_wall_time_s,"
         "time_ratio_vs_sebo\n";
  for (const auto& s : summary)
    out << s.algo << "," << s.ok_count << "," << s.error_count << "," << fmt_double(s.mean_value)
        << "," << fmt_double(s.mean_ratio_vs_sebo) << "," << fmt_double(s.mean_wall_time_s)
        << "," << fmt_double(s.time_ratio_vs_sebo) << "\n";
}

}  // namespace pixelcode
