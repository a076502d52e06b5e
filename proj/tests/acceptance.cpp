// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fails. Heavier fixtures (the trained two-head ensemble) are shared across
// the criteria that need them.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "pixelcode/antenna.hpp"
#include "pixelcode/bench.hpp"
#include "pixelcode/channel.hpp"
#include "pixelcode/coding.hpp"
#include "pixelcode/dataset.hpp"
#include "pixelcode/eval.hpp"
#include "pixelcode/head.hpp"
#include "pixelcode/hmsm.hpp"
#include "pixelcode/optimize.hpp"
#include "pixelcode/train.hpp"

using namespace pixelcode;
namespace fs = std::filesystem;

namespace {

int failures = 0;

class Timer {
public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::shared_ptr<const SisoInstance> siso_instance(int q, int k, std::uint64_t seed) {
  auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(q, k, seed));
  auto channel = std::make_shared<const VirtualChannel>(sample_virtual_channel(k, seed + 1));
  return std::make_shared<const SisoInstance>(channel, antenna);
}

// Measured once on the frozen seeds below and pinned as a regression value.
constexpr double kPinnedSeboQualityRatio = 0.0;  // placeholder until first run

// --- criterion 1 ---------------------------------------------------------------

void criterion_codec() {
  Timer timer;
  std::uint64_t checked = 0;
  bool ok = true;
  for (int q = 1; q <= 12 && ok; ++q)
    for (int m = 1; m <= 6 && ok; ++m)
      for (const auto variant : {SchemeVariant::NaturalBinary, SchemeVariant::ReflectedGray}) {
        const CodingScheme scheme(variant, m);
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << q); ++v) {
          const AntennaCoder coder = AntennaCoder::from_index(v, static_cast<std::size_t>(q));
          if (!(unzip(zip(coder, scheme)) == coder)) {
            ok = false;
            break;
          }
          ++checked;
        }
      }
  Rng rng(4102);
  const CodingScheme b3(SchemeVariant::NaturalBinary, 3), g3(SchemeVariant::ReflectedGray, 3);
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    const AntennaCoder coder(rng.random_bits(39));
    if (!(unzip(zip(coder, b3)) == coder) || !(unzip(zip(coder, g3)) == coder)) ok = false;
    checked += 2;
  }
  const double elapsed = timer.seconds();
  report("criterion 1 (codec bijection)", ok && elapsed < 5.0,
         std::to_string(checked) + " round trips, zero failures, " + fmt(elapsed) + " s (< 5 s)");
}

// --- criterion 2 ---------------------------------------------------------------

void criterion_physics() {
  Timer timer;
  bool ok = true;
  double worst_asym = 0.0, worst_residual = 0.0, worst_norm_err = 0.0;
  int antennas = 0;
  Rng coder_rng(4207);
  const auto run_block = [&](int q, int k, int count, std::uint64_t seed0) {
    for (int i = 0; i < count; ++i) {
      const AntennaModel m = synthesize_antenna(q, k, seed0 + static_cast<std::uint64_t>(i));
      ++antennas;
      const Eigen::MatrixXcd z = m.assemble_impedance();
      const double asym = (z - z.transpose()).cwiseAbs().maxCoeff();
      worst_asym = std::max(worst_asym, asym);
      if (asym > 1e-12) ok = false;
      for (int c = 0; c < 100; ++c) {
        const AntennaCoder coder(coder_rng.random_bits(static_cast<std::size_t>(q)));
        Eigen::MatrixXcd lhs = m.z_pp;
        for (int qq = 0; qq < q; ++qq)
          if (coder.bits[static_cast<std::size_t>(qq)]) lhs(qq, qq) += cxd(0.0, m.gamma);
        const Eigen::VectorXcd i_p = pixel_port_currents(m, coder, cxd(1.0, 0.0));
        const double residual = (lhs * i_p + m.z_pa).norm() / m.z_pa.norm();
        worst_residual = std::max(worst_residual, residual);
        if (residual > 1e-9) ok = false;
        const double norm_err = std::abs(radiation_pattern(m, coder).e.norm() - 1.0);
        worst_norm_err = std::max(worst_norm_err, norm_err);
        if (norm_err > 1e-9) ok = false;
      }
    }
  };
  run_block(4, 8, 34, 52000);
  run_block(10, 8, 33, 53000);
  run_block(39, 72, 33, 54000);
  const double elapsed = timer.seconds();
  report("criterion 2 (physics invariants)", ok && elapsed < 30.0,
         std::to_string(antennas) + " antennas x 100 coders; max asymmetry " + fmt(worst_asym) +
             ", max residual " + fmt(worst_residual) + ", max norm error " + fmt(worst_norm_err) +
             ", " + fmt(elapsed) + " s (< 30 s)");
}

// --- criterion 3 ---------------------------------------------------------------

void criterion_oracle_equivalence() {
  int mismatches = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const Objective obj = make_siso_objective(siso_instance(10, 8, 61000 + 2 * i));
    const SearchResult full = exhaustive_search(obj);
    const SearchResult blocks = sebo(obj, 10);
    if (blocks.best_value != full.best_value || blocks.best_bits != full.best_bits)
      ++mismatches;
  }
  report("criterion 3 (SEBO block=arity is exhaustive)", mismatches == 0,
         "50 instances, " + std::to_string(mismatches) + " mismatches");
}

// --- criterion 4 ---------------------------------------------------------------

void criterion_sebo_quality() {
  Timer timer;
  double sum_ratio = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Objective obj = make_siso_objective(siso_instance(10, 8, 71000 + 2 * i));
    const double full = exhaustive_search(obj).best_value;
    const double blocks = sebo(obj, 5).best_value;
    sum_ratio += blocks / full;
  }
  const double mean_ratio = sum_ratio / 100.0;
  const double elapsed = timer.seconds();
  const bool pinned_ok = std::abs(mean_ratio - kPinnedSeboQualityRatio) <= 1e-12;
  report("criterion 4 (SEBO quality, block 5 on Q=10)",
         mean_ratio >= 0.95 && pinned_ok && elapsed < 120.0,
         "mean ratio " + fmt(mean_ratio) + " (>= 0.95, pinned " + fmt(kPinnedSeboQualityRatio) +
             "), " + fmt(elapsed) + " s (< 2 min)");
}

// --- criterion 5 ---------------------------------------------------------------

bool bootstrap_gap_positive(const std::vector<double>& low, const std::vector<double>& high,
                            std::uint64_t seed) {
  const std::size_t n = low.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = high[i] - low[i];
  Rng rng(seed);
  std::vector<double> means(2000);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += diff[rng.below(n)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  return means[49] > 0.0;  // lower edge of the central 95% band
}

void criterion_ordering() {
  const std::size_t n = 1000;
  std::vector<double> v_random(n), v_codebook(n), v_sebo(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const Objective obj = make_siso_objective(siso_instance(16, 8, 81000 + 2 * i));
    v_random[i] = random_baseline(obj, 91000 + i).best_value;
    v_codebook[i] = codebook_search(obj, 1024, 92000 + i).best_value;
    v_sebo[i] = sebo(obj, 8).best_value;
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const bool gap1 = bootstrap_gap_positive(v_random, v_codebook, 4501);
  const bool gap2 = bootstrap_gap_positive(v_codebook, v_sebo, 4502);
  const bool ordered = mean(v_random) <= mean(v_codebook) && mean(v_codebook) <= mean(v_sebo);
  report("criterion 5 (random <= codebook(1024) <= SEBO)", ordered && gap1 && gap2,
         "means " + fmt(mean(v_random)) + " / " + fmt(mean(v_codebook)) + " / " +
             fmt(mean(v_sebo)) + ", both gaps positive at 95% bootstrap confidence");
}

// --- criteria 6, 7, 9 share the trained desk-scale testbed ----------------------

struct Testbed {
  std::shared_ptr<const AntennaModel> antenna;
  Dataset dataset;
  std::shared_ptr<HeadModel> head_binary, head_gray;
  EvalReport report;
  double build_seconds = 0.0;
};

Testbed build_testbed() {
  Timer timer;
  Testbed tb;
  tb.antenna = std::make_shared<const AntennaModel>(synthesize_antenna(12, 8, 424242));

  DatasetConfig cfg;
  cfg.kind = InstanceKind::Siso;
  cfg.k_samples = 8;
  cfg.antenna_qs = {12};
  cfg.schemes = {CodingScheme(SchemeVariant::NaturalBinary, 3),
                 CodingScheme(SchemeVariant::ReflectedGray, 3)};
  cfg.snr_list = {db_to_linear(10.0)};
  cfg.n_samples = 9000;
  cfg.train_count = 8000;
  cfg.sebo_block = 12;
  cfg.sebo_max_sweeps = 10;
  cfg.seed = 77;
  GenerateOptions opt;
  opt.jobs = 2;
  tb.dataset = generate_dataset(cfg, {tb.antenna}, opt);

  const HeadHyper hyper;  // default head hyperparameters
  tb.head_binary =
      std::make_shared<HeadModel>(train_head(tb.dataset, cfg.schemes[0], hyper, /*jobs=*/2));
  tb.head_gray =
      std::make_shared<HeadModel>(train_head(tb.dataset, cfg.schemes[1], hyper, /*jobs=*/2));

  const HmsmEnsemble ensemble({tb.head_binary, tb.head_gray});
  tb.report = evaluate_ensemble(ensemble, tb.dataset, {tb.antenna},
                                {.jobs = 1, .measure_sebo_time = true});
  tb.build_seconds = timer.seconds();
  return tb;
}

void criterion_hmsm_dominance(const Testbed& tb) {
  const EvalReport& r = tb.report;
  const bool strict = r.mean_selected_value > r.heads[0].mean_candidate_value &&
                      r.mean_selected_value > r.heads[1].mean_candidate_value;
  report("criterion 6 (HMSM dominance)",
         r.dominance_ok && strict && r.n_test >= 1000 && r.excluded_count == 0,
         "selected == max(heads) on all " + std::to_string(r.n_test) + " records; mean " +
             fmt(r.mean_selected_value) + " > binary " + fmt(r.heads[0].mean_candidate_value) +
             ", gray " + fmt(r.heads[1].mean_candidate_value));
}

void criterion_learning(const Testbed& tb) {
  const EvalReport& r = tb.report;
  report("criterion 7 (desk-scale learning)",
         r.mean_objective_ratio >= 0.80 && tb.build_seconds < 900.0,
         "mean objective ratio " + fmt(r.mean_objective_ratio) + " (>= 0.80); head accuracy " +
             fmt(r.heads[0].mean_element_accuracy) + " / " +
             fmt(r.heads[1].mean_element_accuracy) + "; pipeline " + fmt(tb.build_seconds) +
             " s (< 900 s)");
}

void property_learning_curve(const Testbed& tb) {
  const HeadHyper hyper;
  std::vector<double> ratios;
  for (const std::size_t limit : {std::size_t{500}, std::size_t{2000}}) {
    auto head = std::make_shared<HeadModel>(
        train_head(tb.dataset, tb.dataset.config.schemes[0], hyper, /*jobs=*/2, limit));
    const HmsmEnsemble single({head});
    const EvalReport r = evaluate_ensemble(single, tb.dataset, {tb.antenna},
                                           {.jobs = 2, .measure_sebo_time = false});
    ratios.push_back(r.mean_objective_ratio);
  }
  // Full binary head at 8000 training rows, evaluated alone.
  const HmsmEnsemble full({tb.head_binary});
  const EvalReport r8000 = evaluate_ensemble(full, tb.dataset, {tb.antenna},
                                             {.jobs = 2, .measure_sebo_time = false});
  ratios.push_back(r8000.mean_objective_ratio);
  const bool ok = ratios[1] >= ratios[0] - 0.02 && ratios[2] >= ratios[1] - 0.02;
  report("property (learning curve 500/2000/8000)", ok,
         "single-head ratios " + fmt(ratios[0]) + " / " + fmt(ratios[1]) + " / " +
             fmt(ratios[2]) + " nondecreasing within 0.02");
}

// --- criterion 8 ---------------------------------------------------------------

void criterion_capacity() {
  Rng rng(4808);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int nr = 1 + static_cast<int>(rng.below(4));
    const int nt = 1 + static_cast<int>(rng.below(4));
    Eigen::MatrixXcd h(nr, nt);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nt; ++j) h(i, j) = rng.complex_gaussian();
    const double snr = 0.05 + 50.0 * rng.uniform();
    const double got = capacity_of_channel(h, snr, nt);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h * h.adjoint());
    double want = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
      want += std::log2(1.0 + snr / nt * std::max(0.0, eig.eigenvalues()(i)));
    worst = std::max(worst, std::abs(got - want));
  }

  bool monotone = true;
  for (int inst = 0; inst < 100; ++inst) {
    Eigen::MatrixXcd h(2, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = rng.complex_gaussian();
    double prev = -1.0;
    for (int step = 0; step < 20; ++step) {
      const double c = capacity_of_channel(h, db_to_linear(-10.0 + 2.0 * step), 4);
      if (c < prev) monotone = false;
      prev = c;
    }
  }
  report("criterion 8 (capacity correctness)", worst <= 1e-9 && monotone,
         "1000 matrices, max |capacity - eigensum| = " + fmt(worst) +
             " (<= 1e-9); monotone over 20-point dB sweep on 100 instances");
}

// --- criterion 9 ---------------------------------------------------------------

void criterion_speed(const Testbed& tb, const fs::path& dir) {
  BenchConfig cfg;
  cfg.kind = InstanceKind::Siso;
  cfg.k_samples = 8;
  cfg.count = 200;
  cfg.seed = 5150;
  cfg.sebo_block = 12;
  cfg.sebo_max_sweeps = 10;
  cfg.codebook_size = 1024;
  const HmsmEnsemble ensemble({tb.head_binary, tb.head_gray});
  const BenchOutput out = run_bench(cfg, {tb.antenna}, &ensemble);

  fs::create_directories(dir);
  {
    auto f = open_output((dir / "bench_results.csv").string());
    write_bench_results_csv(f, out.rows);
  }
  {
    auto f = open_output((dir / "bench_summary.csv").string());
    write_bench_summary_csv(f, out.summary);
  }

  double t_sebo = 0.0, t_hmsm = 0.0, ratio = 0.0;
  for (const auto& s : out.summary) {
    if (s.algo == "sebo") t_sebo = s.mean_wall_time_s;
    if (s.algo == "hmsm") {
      t_hmsm = s.mean_wall_time_s;
      ratio = s.time_ratio_vs_sebo;
    }
  }
  report("criterion 9 (speed direction)", t_hmsm > 0.0 && t_hmsm < t_sebo,
         "mean per-instance wall time: hmsm " + fmt(t_hmsm) + " s < sebo " + fmt(t_sebo) +
             " s (ratio " + fmt(ratio) + ", reported in " + (dir / "bench_summary.csv").string() +
             ")");
}

// --- criterion 10 ----------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_reproducibility(const fs::path& dir) {
  fs::create_directories(dir);
  bool ok = true;
  std::string detail;

  const auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(8, 4, 4242));
  DatasetConfig cfg;
  cfg.kind = InstanceKind::Siso;
  cfg.k_samples = 4;
  cfg.antenna_qs = {8};
  cfg.schemes = {CodingScheme(SchemeVariant::NaturalBinary, 3),
                 CodingScheme(SchemeVariant::ReflectedGray, 3)};
  cfg.snr_list = {db_to_linear(10.0)};
  cfg.n_samples = 40;
  cfg.train_count = 32;
  cfg.sebo_block = 8;
  cfg.sebo_max_sweeps = 10;
  cfg.seed = 99;

  const Dataset ds1 = generate_dataset(cfg, {antenna}, {.jobs = 2});
  const Dataset ds2 = generate_dataset(cfg, {antenna}, {.jobs = 1});
  save_dataset(ds1, (dir / "ds1").string());
  save_dataset(ds2, (dir / "ds2").string());
  if (slurp(dir / "ds1") != slurp(dir / "ds2")) {
    ok = false;
    detail += "dataset files differ; ";
  }

  HeadHyper hyper;
  hyper.hidden = 16;
  hyper.epochs = 5;
  const HeadModel h1 = train_head(ds1, cfg.schemes[0], hyper, 2);
  const HeadModel h2 = train_head(ds2, cfg.schemes[0], hyper, 1);
  export_head(h1, (dir / "m1").string());
  export_head(h2, (dir / "m2").string());
  if (slurp(dir / "m1") != slurp(dir / "m2")) {
    ok = false;
    detail += "model files differ; ";
  }

  BenchConfig bcfg;
  bcfg.kind = InstanceKind::Siso;
  bcfg.k_samples = 4;
  bcfg.count = 10;
  bcfg.seed = 7;
  bcfg.sebo_block = 8;
  bcfg.codebook_size = 64;
  for (const char* name : {"r1.csv", "r2.csv"}) {
    const BenchOutput out = run_bench(bcfg, {antenna});
    auto f = open_output((dir / name).string());
    write_bench_results_csv(f, out.rows);
  }
  if (slurp(dir / "r1.csv") != slurp(dir / "r2.csv")) {
    ok = false;
    detail += "bench result CSVs differ; ";
  }

  report("criterion 10 (reproducibility)", ok,
         ok ? "dataset, model, and bench result files are bit-identical across reruns"
            : detail);
}

}  // namespace

int main() {
  const fs::path scratch =
      fs::temp_directory_path() / ("pixelcode_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);

  criterion_codec();
  criterion_physics();
  criterion_oracle_equivalence();
  criterion_sebo_quality();
  criterion_ordering();

  const Testbed tb = build_testbed();
  criterion_hmsm_dominance(tb);
  criterion_learning(tb);
  criterion_capacity();
  criterion_speed(tb, scratch / "bench");
  criterion_reproducibility(scratch / "repro");
  property_learning_curve(tb);

  if (failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    fs::remove_all(scratch);
    return 0;
  }
  std::printf("acceptance: %d criterion/criteria FAILED (artifacts in %s)\n", failures,
              scratch.string().c_str());
  return 1;
}
