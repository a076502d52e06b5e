// Command-line front end for the pixelcode library: antenna synthesis,
// channel/dataset generation, head training, coder optimization, evaluation,
// and benchmarking. All randomness flows from explicit --seed flags; every
// run writes a manifest with its inputs, parameters, and output digests.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "pixelcode/antenna_io.hpp"
#include "pixelcode/bench.hpp"
#include "pixelcode/channel.hpp"
#include "pixelcode/dataset.hpp"
#include "pixelcode/digest.hpp"
#include "pixelcode/eval.hpp"
#include "pixelcode/head.hpp"
#include "pixelcode/optimize.hpp"
#include "pixelcode/train.hpp"

namespace px = pixelcode;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitGuardRail = 4;

/// Relative output paths land under $PIXELCODE_OUT_DIR when it is set.
std::string resolve_out(const std::string& path) {
  const char* base = std::getenv("PIXELCODE_OUT_DIR");
  if (!base || *base == '\0' || fs::path(path).is_absolute()) return path;
  fs::create_directories(base);
  return (fs::path(base) / path).string();
}

void write_manifest(const std::string& primary_output, json manifest) {
  manifest["tool"] = "pixelcode";
  manifest["format"] = 1;
  std::ofstream out(primary_output + ".manifest.json", std::ios::binary);
  out << manifest.dump(2) << "\n";
}

json file_entry(const std::string& path) {
  return json{{"path", path}, {"digest", px::file_digest(path)}};
}

std::shared_ptr<const px::AntennaModel> load_antenna_shared(const std::string& path) {
  return std::make_shared<const px::AntennaModel>(px::import_antenna(path));
}

/// One antenna file is shared across all positions; otherwise one file per
/// position, transmit antennas first.
std::vector<std::shared_ptr<const px::AntennaModel>> load_antennas(
    const std::vector<std::string>& paths, std::size_t positions) {
  if (paths.empty()) throw px::ValidationError("need at least one --antenna");
  std::vector<std::shared_ptr<const px::AntennaModel>> out;
  if (paths.size() == 1) {
    auto a = load_antenna_shared(paths[0]);
    out.assign(positions, a);
  } else if (paths.size() == positions) {
    for (const auto& p : paths) out.push_back(load_antenna_shared(p));
  } else {
    throw px::ValidationError("give one shared antenna file or exactly " +
                              std::to_string(positions));
  }
  return out;
}

std::string joined_digests(const std::vector<std::string>& paths) {
  std::string d;
  for (const auto& p : paths) {
    if (!d.empty()) d += "+";
    d += px::file_digest(p);
  }
  return d;
}

std::vector<px::CodingScheme> parse_schemes(const std::vector<std::string>& specs) {
  std::vector<px::CodingScheme> schemes;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      throw px::ValidationError("scheme must look like binary:3, got '" + s + "'");
    schemes.emplace_back(px::scheme_variant_from_string(s.substr(0, colon)),
                         static_cast<int>(px::parse_int(s.substr(colon + 1), "--schemes")));
  }
  return schemes;
}

px::HmsmEnsemble load_ensemble(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw px::ValidationError("cannot open ensemble manifest: " + manifest_path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw px::ParseError(manifest_path + ": " + e.what());
  }
  if (!doc.contains("heads") || !doc["heads"].is_array() || doc["heads"].empty())
    throw px::ValidationError(manifest_path + ": manifest needs a non-empty 'heads' array");
  const fs::path base = fs::path(manifest_path).parent_path();
  std::vector<std::shared_ptr<const px::Predictor>> heads;
  for (const auto& entry : doc["heads"]) {
    if (!entry.contains("model"))
      throw px::ValidationError(manifest_path + ": head entry needs a 'model' path");
    fs::path model_path = entry["model"].get<std::string>();
    if (model_path.is_relative()) model_path = base / model_path;
    auto head = std::make_shared<px::HeadModel>(px::import_head(model_path.string()));
    if (entry.contains("scheme")) {
      const std::string want = entry["scheme"].get<std::string>();
      if (head->head_scheme.label() != want)
        throw px::ValidationError(manifest_path + ": model " + model_path.string() +
                                  " has scheme " + head->head_scheme.label() + ", manifest says " +
                                  want);
    }
    heads.push_back(std::move(head));
  }
  return px::HmsmEnsemble(std::move(heads));
}

json search_result_json(const px::SearchResult& r) {
  px::AntennaCoder c;
  c.bits = r.best_bits;
  json j;
  j["best_value"] = r.best_value;
  j["best_bits"] = c.to_string();
  j["evaluations"] = r.evaluations;
  j["wall_time_s"] = r.wall_time_s;
  if (!r.sweep_trace.empty()) j["sweep_trace"] = r.sweep_trace;
  return j;
}

// --- subcommand configs -------------------------------------------------------

struct GenAntennaArgs {
  int q = 39;
  int k = 72;
  std::uint64_t seed = 1;
  double gamma = px::kDefaultGamma;
  std::string out;
};

int cmd_gen_antenna(const GenAntennaArgs& a) {
  const px::AntennaModel m = px::synthesize_antenna(a.q, a.k, a.seed, a.gamma);
  const std::string out = resolve_out(a.out);
  px::export_antenna(m, out);
  const std::string digest = px::file_digest(out);
  std::cout << "antenna " << out << " q " << a.q << " k " << a.k << " digest " << digest
            << "\n";
  write_manifest(out, json{{"command", "gen-antenna"},
                           {"params",
                            {{"q", a.q},
                             {"k", a.k},
                             {"seed", a.seed},
                             {"gamma", a.gamma}}},
                           {"outputs", {{"antenna", file_entry(out)}}}});
  return kExitOk;
}

struct GenChannelArgs {
  int k = 72;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen_channel(const GenChannelArgs& a) {
  const px::VirtualChannel ch = px::sample_virtual_channel(a.k, a.seed);
  const std::string out = resolve_out(a.out);
  px::export_channel(ch, out);
  std::cout << "channel " << out << " k " << a.k << " digest " << px::file_digest(out) << "\n";
  write_manifest(out, json{{"command", "gen-channel"},
                           {"params", {{"k", a.k}, {"seed", a.seed}}},
                           {"outputs", {{"channel", file_entry(out)}}}});
  return kExitOk;
}

struct GenDatasetArgs {
  std::string kind = "siso";
  std::vector<std::string> antenna_paths;
  int n_tx = 4;
  int n_rx = 2;
  std::vector<double> snr_db = {10.0};
  std::vector<std::string> schemes = {"binary:3", "gray:3"};
  std::size_t samples = 0;
  long long train_count = -1;  // default: 90%
  std::size_t sebo_block = 12;
  std::size_t sebo_sweeps = 10;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::size_t checkpoint_every = 256;
  std::string out;
  std::string materialize_dir;
};

int cmd_gen_dataset(const GenDatasetArgs& a) {
  px::DatasetConfig cfg;
  cfg.kind = px::instance_kind_from_string(a.kind);
  const std::size_t positions =
      cfg.kind == px::InstanceKind::Siso ? 1 : static_cast<std::size_t>(a.n_tx + a.n_rx);
  const auto antennas = load_antennas(a.antenna_paths, positions);
  cfg.k_samples = antennas[0]->k_samples;
  for (const auto& ant : antennas) cfg.antenna_qs.push_back(ant->q_ports);
  if (cfg.kind == px::InstanceKind::Mimo) {
    cfg.n_tx = a.n_tx;
    cfg.n_rx = a.n_rx;
  }
  cfg.schemes = parse_schemes(a.schemes);
  for (const double db : a.snr_db) cfg.snr_list.push_back(px::db_to_linear(db));
  cfg.n_samples = a.samples;
  cfg.train_count = a.train_count >= 0 ? static_cast<std::size_t>(a.train_count)
                                       : (a.samples * 9 + 5) / 10;
  cfg.sebo_block = a.sebo_block;
  cfg.sebo_max_sweeps = a.sebo_sweeps;
  cfg.seed = a.seed;
  cfg.antenna_digest = joined_digests(a.antenna_paths);
  cfg.validate();

  const std::string out = resolve_out(a.out);
  px::GenerateOptions opt;
  opt.jobs = a.jobs;
  opt.checkpoint_path = out;
  opt.checkpoint_every = a.checkpoint_every;
  const px::Dataset ds = px::generate_dataset(cfg, antennas, opt);

  if (!a.materialize_dir.empty()) {
    const std::string dir = resolve_out(a.materialize_dir);
    fs::create_directories(dir);
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
      const px::VirtualChannel ch =
          px::sample_virtual_channel(cfg.k_samples, ds.records[i].channel_seed);
      px::export_channel(ch, (fs::path(dir) / ("channel_" + std::to_string(i) + ".chan")).string());
    }
  }

  std::cout << "dataset " << out << " records " << ds.records.size() << " train "
            << ds.train_indices.size() << " test " << ds.test_indices.size() << " digest "
            << px::file_digest(out) << "\n";
  json inputs = json::object();
  for (std::size_t i = 0; i < a.antenna_paths.size(); ++i)
    inputs["antenna_" + std::to_string(i)] = file_entry(a.antenna_paths[i]);
  write_manifest(out, json{{"command", "gen-dataset"},
                           {"params",
                            {{"kind", a.kind},
                             {"samples", a.samples},
                             {"train_count", cfg.train_count},
                             {"snr_db", a.snr_db},
                             {"schemes", a.schemes},
                             {"sebo_block", a.sebo_block},
                             {"sebo_sweeps", a.sebo_sweeps},
                             {"seed", a.seed},
                             {"jobs", a.jobs}}},
                           {"inputs", inputs},
                           {"outputs", {{"dataset", file_entry(out)}}}});
  return kExitOk;
}

struct TrainArgs {
  std::string dataset;
  std::string scheme = "binary";
  int m = 3;
  px::HeadHyper hyper;
  int jobs = 1;
  std::size_t train_limit = 0;
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  const px::Dataset ds = px::load_dataset(a.dataset);
  const px::CodingScheme scheme(px::scheme_variant_from_string(a.scheme), a.m);
  const px::HeadModel model = px::train_head(ds, scheme, a.hyper, a.jobs, a.train_limit);
  const std::string out = resolve_out(a.out);
  px::export_head(model, out);
  double final_loss = 0.0;
  for (const auto& e : model.elements) final_loss += e.epoch_loss.back();
  final_loss /= static_cast<double>(model.elements.size());
  std::cout << "head " << out << " scheme " << scheme.label() << " elements "
            << model.elements.size() << " final_loss " << px::fmt_double(final_loss)
            << " digest " << px::file_digest(out) << "\n";
  write_manifest(out, json{{"command", "train"},
                           {"params",
                            {{"scheme", scheme.label()},
                             {"hidden", a.hyper.hidden},
                             {"epochs", a.hyper.epochs},
                             {"learning_rate", a.hyper.learning_rate},
                             {"batch_size", a.hyper.batch_size},
                             {"pool_rows", a.hyper.pool_rows},
                             {"pool_cols", a.hyper.pool_cols},
                             {"quadratic", a.hyper.quadratic},
                             {"seed", a.hyper.seed},
                             {"train_limit", a.train_limit},
                             {"jobs", a.jobs}}},
                           {"inputs", {{"dataset", file_entry(a.dataset)}}},
                           {"outputs", {{"model", file_entry(out)}}}});
  return kExitOk;
}

struct OptimizeArgs {
  std::string algo = "sebo";
  std::string kind = "siso";
  std::vector<std::string> antenna_paths;
  std::string channel_path;
  std::uint64_t channel_seed = 1;
  int n_tx = 4;
  int n_rx = 2;
  double snr_db = 10.0;
  std::size_t block = 12;
  std::size_t sweeps = 10;
  std::string init = "zeros";
  std::size_t codebook_size = 1024;
  std::uint64_t seed = 1;
  std::string ensemble_path;
  std::string out;
};

int cmd_optimize(const OptimizeArgs& a) {
  const px::InstanceKind kind = px::instance_kind_from_string(a.kind);
  const std::size_t positions =
      kind == px::InstanceKind::Siso ? 1 : static_cast<std::size_t>(a.n_tx + a.n_rx);
  const auto antennas = load_antennas(a.antenna_paths, positions);
  const int k = antennas[0]->k_samples;

  std::shared_ptr<px::VirtualChannel> channel;
  if (!a.channel_path.empty())
    channel = std::make_shared<px::VirtualChannel>(px::import_channel(a.channel_path));
  else
    channel = std::make_shared<px::VirtualChannel>(px::sample_virtual_channel(k, a.channel_seed));
  if (channel->k_samples != k)
    throw px::ValidationError("channel K does not match antenna K");

  std::shared_ptr<const px::SisoInstance> siso;
  std::shared_ptr<const px::MimoInstance> mimo;
  px::Objective obj;
  if (kind == px::InstanceKind::Siso) {
    siso = std::make_shared<px::SisoInstance>(channel, antennas[0]);
    obj = px::make_siso_objective(siso);
  } else {
    mimo = std::make_shared<px::MimoInstance>(
        channel,
        std::vector<std::shared_ptr<const px::AntennaModel>>(antennas.begin(),
                                                             antennas.begin() + a.n_tx),
        std::vector<std::shared_ptr<const px::AntennaModel>>(antennas.begin() + a.n_tx,
                                                             antennas.end()),
        px::db_to_linear(a.snr_db));
    obj = px::make_mimo_objective(mimo);
  }

  json result;
  result["algorithm"] = a.algo;
  result["instance"] = {{"kind", a.kind},
                        {"k_samples", k},
                        {"arity", obj.arity},
                        {"channel_seed", channel->seed}};
  if (kind == px::InstanceKind::Mimo) result["instance"]["snr_db"] = a.snr_db;

  if (a.algo == "exhaustive") {
    result.update(search_result_json(px::exhaustive_search(obj)));
  } else if (a.algo == "sebo") {
    std::vector<std::uint8_t> init(obj.arity, 0);
    if (a.init == "random")
      init = px::Rng(a.seed).random_bits(obj.arity);
    else if (a.init != "zeros")
      throw px::ValidationError("--init must be zeros|random");
    result.update(search_result_json(px::sebo(obj, a.block, a.sweeps, std::move(init))));
    result["params"] = {{"block", a.block}, {"sweeps", a.sweeps}, {"init", a.init}};
  } else if (a.algo == "codebook") {
    result.update(search_result_json(px::codebook_search(obj, a.codebook_size, a.seed)));
    result["params"] = {{"codebook_size", a.codebook_size}, {"seed", a.seed}};
  } else if (a.algo == "random") {
    result.update(search_result_json(px::random_baseline(obj, a.seed)));
    result["params"] = {{"seed", a.seed}};
  } else if (a.algo == "hmsm") {
    if (a.ensemble_path.empty()) throw px::ValidationError("--algo hmsm needs --ensemble");
    const px::HmsmEnsemble ensemble = load_ensemble(a.ensemble_path);
    px::detail::StopWatch watch;
    const px::Selection sel = kind == px::InstanceKind::Siso ? px::select_best(ensemble, *siso)
                                                             : px::select_best(ensemble, *mimo);
    result["best_value"] = sel.value;
    result["wall_time_s"] = watch.seconds();
    result["per_head_values"] = sel.per_head_values;
    result["winner_head"] = sel.winner;
    json coders = json::array();
    for (const auto& c : sel.tx_coders) coders.push_back(c.to_string());
    for (const auto& c : sel.rx_coders) coders.push_back(c.to_string());
    result["best_coders"] = coders;
    result["evaluations"] = sel.per_head_values.size();
  } else {
    throw px::ValidationError("unknown --algo '" + a.algo + "'");
  }

  const std::string text = result.dump(2);
  std::cout << text << "\n";
  if (!a.out.empty()) {
    const std::string out = resolve_out(a.out);
    std::ofstream f(out, std::ios::binary);
    f << text << "\n";
    json inputs = json::object();
    for (std::size_t i = 0; i < a.antenna_paths.size(); ++i)
      inputs["antenna_" + std::to_string(i)] = file_entry(a.antenna_paths[i]);
    if (!a.channel_path.empty()) inputs["channel"] = file_entry(a.channel_path);
    if (!a.ensemble_path.empty()) inputs["ensemble"] = file_entry(a.ensemble_path);
    write_manifest(out, json{{"command", "optimize"},
                             {"params", result.contains("params") ? result["params"] : json::object()},
                             {"algorithm", a.algo},
                             {"seed", a.seed},
                             {"inputs", inputs},
                             {"outputs", {{"result", file_entry(out)}}}});
  }
  return kExitOk;
}

struct EvalArgs {
  std::string dataset;
  std::string ensemble_path;
  std::vector<std::string> antenna_paths;
  std::string out_dir = "eval-out";
  int jobs = 1;
  bool no_sebo_time = false;
};

int cmd_eval(const EvalArgs& a) {
  const px::Dataset ds = px::load_dataset(a.dataset);
  const auto antennas = load_antennas(a.antenna_paths, ds.config.antenna_qs.size());
  if (!ds.config.antenna_digest.empty()) {
    const std::string digest = joined_digests(a.antenna_paths);
    if (digest != ds.config.antenna_digest)
      std::cerr << "warning: antenna digest " << digest << " differs from dataset's "
                << ds.config.antenna_digest << "\n";
  }
  const px::HmsmEnsemble ensemble = load_ensemble(a.ensemble_path);
  px::EvalOptions opt;
  opt.jobs = a.jobs;
  opt.measure_sebo_time = !a.no_sebo_time;
  const px::EvalReport report = px::evaluate_ensemble(ensemble, ds, antennas, opt);

  const std::string dir = resolve_out(a.out_dir);
  fs::create_directories(dir);
  json j;
  j["n_test"] = report.n_test;
  j["mean_objective_ratio"] = report.mean_objective_ratio;
  j["mean_selected_value"] = report.mean_selected_value;
  j["mean_label_value"] = report.mean_label_value;
  j["ratio_count"] = report.ratio_count;
  j["excluded_count"] = report.excluded_count;
  j["dominance_ok"] = report.dominance_ok;
  j["mean_inference_s"] = report.mean_inference_s;
  if (opt.measure_sebo_time) {
    j["mean_sebo_s"] = report.mean_sebo_s;
    j["sebo_over_hmsm_time"] =
        report.mean_inference_s > 0.0 ? report.mean_sebo_s / report.mean_inference_s : 0.0;
  }
  std::vector<double> head_acc;
  j["heads"] = json::array();
  for (const auto& h : report.heads) {
    json hj;
    hj["scheme"] = h.scheme.label();
    hj["mean_element_accuracy"] = h.mean_element_accuracy;
    hj["per_element_accuracy"] = h.per_element_accuracy;
    hj["mean_candidate_value"] = h.mean_candidate_value;
    j["heads"].push_back(hj);
    head_acc.push_back(h.mean_element_accuracy);
  }
  // Eq-10-style diagnostic: bound with alpha = 1 next to the measured rates.
  j["ensemble_lower_bound_alpha1"] = px::ensemble_lower_bound(head_acc, 1.0);

  const std::string report_path = (fs::path(dir) / "report.json").string();
  {
    std::ofstream f(report_path, std::ios::binary);
    f << j.dump(2) << "\n";
  }
  for (const auto& h : report.heads) {
    std::ofstream f(fs::path(dir) / ("confusion_" + px::to_string(h.scheme.variant) + ".csv"),
                    std::ios::binary);
    f << "element,actual,predicted,count\n";
    for (std::size_t e = 0; e < h.confusion.size(); ++e)
      for (int actual = 0; actual < h.confusion[e].rows(); ++actual)
        for (int predicted = 0; predicted < h.confusion[e].cols(); ++predicted)
          f << e << "," << actual << "," << predicted << ","
            << h.confusion[e](actual, predicted) << "\n";
  }
  std::cout << "eval " << dir << " ratio " << px::fmt_double(report.mean_objective_ratio)
            << " mean_acc";
  for (const auto& h : report.heads)
    std::cout << " " << h.scheme.label() << "=" << px::fmt_double(h.mean_element_accuracy);
  std::cout << "\n";
  json inputs = json::object();
  inputs["dataset"] = file_entry(a.dataset);
  inputs["ensemble"] = file_entry(a.ensemble_path);
  for (std::size_t i = 0; i < a.antenna_paths.size(); ++i)
    inputs["antenna_" + std::to_string(i)] = file_entry(a.antenna_paths[i]);
  write_manifest(report_path, json{{"command", "eval"},
                                   {"params", {{"jobs", a.jobs}, {"sebo_time", !a.no_sebo_time}}},
                                   {"inputs", inputs},
                                   {"outputs", {{"report", file_entry(report_path)}}}});
  return kExitOk;
}

struct BenchArgs {
  std::string kind = "siso";
  std::vector<std::string> antenna_paths;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  double snr_db = 10.0;
  int n_tx = 4;
  int n_rx = 2;
  std::size_t block = 12;
  std::size_t sweeps = 10;
  std::size_t codebook_size = 1024;
  std::string ensemble_path;
  std::string out_dir = "bench-out";
};

int cmd_bench(const BenchArgs& a) {
  px::BenchConfig cfg;
  cfg.kind = px::instance_kind_from_string(a.kind);
  const std::size_t positions =
      cfg.kind == px::InstanceKind::Siso ? 1 : static_cast<std::size_t>(a.n_tx + a.n_rx);
  const auto antennas = load_antennas(a.antenna_paths, positions);
  cfg.k_samples = antennas[0]->k_samples;
  cfg.n_tx = a.n_tx;
  cfg.n_rx = a.n_rx;
  cfg.snr = px::db_to_linear(a.snr_db);
  cfg.count = a.count;
  cfg.seed = a.seed;
  cfg.sebo_block = a.block;
  cfg.sebo_max_sweeps = a.sweeps;
  cfg.codebook_size = a.codebook_size;

  std::unique_ptr<px::HmsmEnsemble> ensemble;
  if (!a.ensemble_path.empty())
    ensemble = std::make_unique<px::HmsmEnsemble>(load_ensemble(a.ensemble_path));
  const px::BenchOutput out = px::run_bench(cfg, antennas, ensemble.get());

  const std::string dir = resolve_out(a.out_dir);
  fs::create_directories(dir);
  const std::string results_path = (fs::path(dir) / "bench_results.csv").string();
  {
    auto f = px::open_output(results_path);
    px::write_bench_results_csv(f, out.rows);
  }
  const std::string summary_path = (fs::path(dir) / "bench_summary.csv").string();
  {
    auto f = px::open_output(summary_path);
    px::write_bench_summary_csv(f, out.summary);
  }
  json summary = json::array();
  for (const auto& s : out.summary) {
    summary.push_back({{"algo", s.algo},
                       {"ok_count", s.ok_count},
                       {"error_count", s.error_count},
                       {"mean_value", s.mean_value},
                       {"mean_ratio_vs_sebo", s.mean_ratio_vs_sebo},
                       {"mean_wall_time_s", s.mean_wall_time_s},
                       {"time_ratio_vs_sebo", s.time_ratio_vs_sebo}});
    std::cout << "bench " << s.algo << " mean_value " << px::fmt_double(s.mean_value)
              << " mean_ratio " << px::fmt_double(s.mean_ratio_vs_sebo) << " mean_time_s "
              << px::fmt_double(s.mean_wall_time_s) << "\n";
  }
  {
    std::ofstream f(fs::path(dir) / "summary.json", std::ios::binary);
    f << json{{"algos", summary}}.dump(2) << "\n";
  }
  json inputs = json::object();
  for (std::size_t i = 0; i < a.antenna_paths.size(); ++i)
    inputs["antenna_" + std::to_string(i)] = file_entry(a.antenna_paths[i]);
  if (!a.ensemble_path.empty()) inputs["ensemble"] = file_entry(a.ensemble_path);
  write_manifest(results_path,
                 json{{"command", "bench"},
                      {"params",
                       {{"kind", a.kind},
                        {"count", a.count},
                        {"seed", a.seed},
                        {"snr_db", a.snr_db},
                        {"block", a.block},
                        {"sweeps", a.sweeps},
                        {"codebook_size", a.codebook_size}}},
                      {"inputs", inputs},
                      {"outputs",
                       {{"results", file_entry(results_path)},
                        {"summary", file_entry(summary_path)}}}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pixel-antenna coding toolkit"};
  app.require_subcommand(1);

  GenAntennaArgs ga;
  auto* gen_antenna = app.add_subcommand("gen-antenna", "synthesize a pixel antenna model");
  gen_antenna->add_option("--q", ga.q, "pixel port count");
  gen_antenna->add_option("--k", ga.k, "spatial angle samples");
  gen_antenna->add_option("--seed", ga.seed, "rng seed");
  gen_antenna->add_option("--gamma", ga.gamma, "open-circuit magnitude");
  gen_antenna->add_option("--out", ga.out, "output file")->required();

  GenChannelArgs gc;
  auto* gen_channel = app.add_subcommand("gen-channel", "draw a virtual channel sample");
  gen_channel->add_option("--k", gc.k, "spatial angle samples");
  gen_channel->add_option("--seed", gc.seed, "rng seed");
  gen_channel->add_option("--out", gc.out, "output file")->required();

  GenDatasetArgs gd;
  auto* gen_dataset = app.add_subcommand("gen-dataset", "generate features + SEBO labels");
  gen_dataset->add_option("--kind", gd.kind, "siso|mimo");
  gen_dataset->add_option("--antenna", gd.antenna_paths, "antenna file(s)")->required();
  gen_dataset->add_option("--nt", gd.n_tx, "transmit antennas (mimo)");
  gen_dataset->add_option("--nr", gd.n_rx, "receive antennas (mimo)");
  gen_dataset->add_option("--snr-db", gd.snr_db, "snr list in dB (mimo)");
  gen_dataset->add_option("--schemes", gd.schemes, "coding schemes, e.g. binary:3 gray:3");
  gen_dataset->add_option("--samples", gd.samples, "record count")->required();
  gen_dataset->add_option("--train-count", gd.train_count, "train split size (default 90%)");
  gen_dataset->add_option("--sebo-block", gd.sebo_block, "SEBO block size");
  gen_dataset->add_option("--sebo-sweeps", gd.sebo_sweeps, "SEBO max sweeps");
  gen_dataset->add_option("--seed", gd.seed, "base seed");
  gen_dataset->add_option("--jobs", gd.jobs, "worker threads");
  gen_dataset->add_option("--checkpoint-every", gd.checkpoint_every, "records per checkpoint");
  gen_dataset->add_option("--materialize", gd.materialize_dir, "also export raw channel files");
  gen_dataset->add_option("--out", gd.out, "dataset file")->required();

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train one classifier head");
  train->add_option("--dataset", tr.dataset, "dataset file")->required();
  train->add_option("--scheme", tr.scheme, "binary|gray");
  train->add_option("--m", tr.m, "bits per map element");
  train->add_option("--hidden", tr.hyper.hidden, "hidden width");
  train->add_option("--epochs", tr.hyper.epochs, "training epochs");
  train->add_option("--lr", tr.hyper.learning_rate, "Adam learning rate");
  train->add_option("--batch", tr.hyper.batch_size, "batch size");
  train->add_option("--pool-rows", tr.hyper.pool_rows, "row pool factor (0 = all)");
  train->add_option("--pool-cols", tr.hyper.pool_cols, "column pool factor (0 = all)");
  train->add_flag("--no-quadratic{false}", tr.hyper.quadratic,
                  "skip the pairwise feature expansion");
  train->add_option("--seed", tr.hyper.seed, "training seed");
  train->add_option("--jobs", tr.jobs, "worker threads");
  train->add_option("--train-limit", tr.train_limit, "cap on training records (0 = all)");
  train->add_option("--out", tr.out, "model file")->required();

  OptimizeArgs op;
  auto* optimize = app.add_subcommand("optimize", "run one coder search");
  optimize->add_option("--algo", op.algo, "exhaustive|sebo|codebook|random|hmsm");
  optimize->add_option("--kind", op.kind, "siso|mimo");
  optimize->add_option("--antenna", op.antenna_paths, "antenna file(s)")->required();
  auto* chan_opt = optimize->add_option("--channel", op.channel_path, "channel file");
  optimize->add_option("--channel-seed", op.channel_seed, "sample a channel with this seed")
      ->excludes(chan_opt);
  optimize->add_option("--nt", op.n_tx, "transmit antennas (mimo)");
  optimize->add_option("--nr", op.n_rx, "receive antennas (mimo)");
  optimize->add_option("--snr-db", op.snr_db, "snr in dB (mimo)");
  optimize->add_option("--block", op.block, "SEBO block size");
  optimize->add_option("--sweeps", op.sweeps, "SEBO max sweeps");
  optimize->add_option("--init", op.init, "SEBO start: zeros|random");
  optimize->add_option("--codebook-size", op.codebook_size, "codebook size");
  optimize->add_option("--seed", op.seed, "rng seed");
  optimize->add_option("--ensemble", op.ensemble_path, "ensemble manifest (hmsm)");
  optimize->add_option("--out", op.out, "result JSON file");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "evaluate an ensemble on a dataset test split");
  eval->add_option("--dataset", ev.dataset, "dataset file")->required();
  eval->add_option("--ensemble", ev.ensemble_path, "ensemble manifest")->required();
  eval->add_option("--antenna", ev.antenna_paths, "antenna file(s)")->required();
  eval->add_option("--out", ev.out_dir, "output directory");
  eval->add_option("--jobs", ev.jobs, "worker threads");
  eval->add_flag("--no-sebo-time", ev.no_sebo_time, "skip the fresh SEBO timing runs");

  BenchArgs be;
  auto* bench = app.add_subcommand("bench", "compare algorithms on a seeded instance set");
  bench->add_option("--kind", be.kind, "siso|mimo");
  bench->add_option("--antenna", be.antenna_paths, "antenna file(s)")->required();
  bench->add_option("--count", be.count, "instance count");
  bench->add_option("--seed", be.seed, "base seed");
  bench->add_option("--snr-db", be.snr_db, "snr in dB (mimo)");
  bench->add_option("--nt", be.n_tx, "transmit antennas (mimo)");
  bench->add_option("--nr", be.n_rx, "receive antennas (mimo)");
  bench->add_option("--block", be.block, "SEBO block size");
  bench->add_option("--sweeps", be.sweeps, "SEBO max sweeps");
  bench->add_option("--codebook-size", be.codebook_size, "codebook size");
  bench->add_option("--ensemble", be.ensemble_path, "ensemble manifest (adds hmsm)");
  bench->add_option("--out", be.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (gen_antenna->parsed()) return cmd_gen_antenna(ga);
    if (gen_channel->parsed()) return cmd_gen_channel(gc);
    if (gen_dataset->parsed()) return cmd_gen_dataset(gd);
    if (train->parsed()) return cmd_train(tr);
    if (optimize->parsed()) return cmd_optimize(op);
    if (eval->parsed()) return cmd_eval(ev);
    if (bench->parsed()) return cmd_bench(be);
  } catch (const px::ArityTooLarge& e) {
    std::cerr << "error (guard rail): " << e.what() << "\n";
    return kExitGuardRail;
  } catch (const px::BlockTooLarge& e) {
    std::cerr << "error (guard rail): " << e.what() << "\n";
    return kExitGuardRail;
  } catch (const px::ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return kExitValidation;
  } catch (const px::DomainError& e) {
    std::cerr << "error (validation): " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
