#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "pixelcode/antenna.hpp"
#include "pixelcode/coding.hpp"
#include "pixelcode/hmsm.hpp"
#include "pixelcode/optimize.hpp"
#include "pixelcode/parallel.hpp"
#include "pixelcode/textio.hpp"

namespace pixelcode {

struct DatasetConfig {
  InstanceKind kind = InstanceKind::Siso;
  int k_samples = 0;
  std::vector<int> antenna_qs;  // flattening order; SISO holds the single rx antenna
  int n_tx = 1;                 // MIMO only; SISO is 1/1 by convention
  int n_rx = 1;
  std::vector<CodingScheme> schemes;
  std::vector<double> snr_list;  // linear
  std::size_t n_samples = 0;
  std::size_t train_count = 0;
  std::size_t sebo_block = 12;
  std::size_t sebo_max_sweeps = 10;
  std::uint64_t seed = 0;
  std::string antenna_digest;

  void validate() const {
    if (k_samples < 1) throw ValidationError("k_samples must be >= 1");
    if (antenna_qs.empty()) throw ValidationError("need at least one antenna");
    if (schemes.empty()) throw ValidationError("need at least one coding scheme");
    for (const auto& s : schemes) s.validate();
    if (snr_list.empty()) throw ValidationError("snr_list must not be empty");
    for (const double s : snr_list)
      if (!(s > 0.0)) throw ValidationError("snr values must be positive (linear)");
    if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
    if (train_count > n_samples) throw ValidationError("train_count exceeds n_samples");
    if (kind == InstanceKind::Mimo) {
      if (n_tx < 1 || n_rx < 1) throw ValidationError("mimo needs n_tx, n_rx >= 1");
      if (antenna_qs.size() != static_cast<std::size_t>(n_tx + n_rx))
        throw ValidationError("antenna_qs must list all tx then rx antennas");
    } else if (antenna_qs.size() != 1) {
      throw ValidationError("siso datasets have exactly one pixel antenna");
    }
  }

  std::size_t joint_bits() const {
    std::size_t total = 0;
    for (const int q : antenna_qs) total += static_cast<std::size_t>(q);
    return total;
  }

  std::size_t elements_per_scheme(std::size_t scheme_idx) const {
    const int m = schemes[scheme_idx].group_bits;
    std::size_t total = 0;
    for (const int q : antenna_qs) total += static_cast<std::size_t>((q + m - 1) / m);
    return total;
  }

  friend bool operator==(const DatasetConfig& a, const DatasetConfig& b) = default;
};

struct DatasetRecord {
  std::uint64_t channel_seed = 0;
  double snr = 1.0;  // linear
  double sebo_value = 0.0;
  // Per scheme: map elements for every antenna, concatenated in flattening order.
  std::vector<std::vector<std::uint32_t>> labels;
};

struct Dataset {
  DatasetConfig config;
  std::vector<DatasetRecord> records;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Evenly spread test indices: index i is a test sample when the scaled
/// counter floor((i+1) * n_test / n) advances.
inline bool is_test_index(std::size_t i, std::size_t n, std::size_t n_test) {
  return (i + 1) * n_test / n > i * n_test / n;
}

inline void assign_split(Dataset& ds) {
  ds.train_indices.clear();
  ds.test_indices.clear();
  const std::size_t n = ds.config.n_samples;
  const std::size_t n_test = n - ds.config.train_count;
  for (std::size_t i = 0; i < n; ++i)
    (is_test_index(i, n, n_test) ? ds.test_indices : ds.train_indices).push_back(i);
}

/// Channel seed for a record; fixed derivation so records are regenerable
/// from the config alone.
inline std::uint64_t record_channel_seed(const DatasetConfig& cfg, std::size_t index) {
  return mix_seed(cfg.seed, 2 * static_cast<std::uint64_t>(index));
}

inline double record_snr(const DatasetConfig& cfg, std::size_t index) {
  Rng rng(mix_seed(cfg.seed, 2 * static_cast<std::uint64_t>(index) + 1));
  return cfg.snr_list[static_cast<std::size_t>(rng.below(cfg.snr_list.size()))];
}

/// Rebuild the feature tensor a record describes, bit-exactly.
inline FeatureTensor record_features(const DatasetConfig& cfg, const DatasetRecord& rec) {
  const VirtualChannel ch = sample_virtual_channel(cfg.k_samples, rec.channel_seed);
  return build_features(ch, cfg.kind, rec.snr);
}

namespace detail {

inline DatasetRecord generate_record(
    const DatasetConfig& cfg, std::size_t index,
    const std::vector<std::shared_ptr<const AntennaModel>>& antennas) {
  DatasetRecord rec;
  rec.channel_seed = record_channel_seed(cfg, index);
  rec.snr = record_snr(cfg, index);
  auto channel = std::make_shared<VirtualChannel>(
      sample_virtual_channel(cfg.k_samples, rec.channel_seed));

  Objective obj;
  std::vector<AntennaCoder> tx_coders, rx_coders;
  SearchResult best;
  if (cfg.kind == InstanceKind::Siso) {
    auto inst = std::make_shared<SisoInstance>(channel, antennas[0]);
    obj = make_siso_objective(inst);
    best = sebo(obj, cfg.sebo_block, cfg.sebo_max_sweeps);
    rx_coders.emplace_back(best.best_bits);
  } else {
    auto inst = std::make_shared<MimoInstance>(
        channel,
        std::vector<std::shared_ptr<const AntennaModel>>(antennas.begin(),
                                                         antennas.begin() + cfg.n_tx),
        std::vector<std::shared_ptr<const AntennaModel>>(antennas.begin() + cfg.n_tx,
                                                         antennas.end()),
        rec.snr);
    obj = make_mimo_objective(inst);
    best = sebo(obj, cfg.sebo_block, cfg.sebo_max_sweeps);
    std::tie(tx_coders, rx_coders) = split_joint_coder(*inst, best.best_bits);
  }
  rec.sebo_value = best.best_value;

  rec.labels.resize(cfg.schemes.size());
  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    for (const auto& coder : tx_coders) {
      const AntennaMap map = zip(coder, cfg.schemes[s]);
      rec.labels[s].insert(rec.labels[s].end(), map.elements.begin(), map.elements.end());
    }
    for (const auto& coder : rx_coders) {
      const AntennaMap map = zip(coder, cfg.schemes[s]);
      rec.labels[s].insert(rec.labels[s].end(), map.elements.begin(), map.elements.end());
    }
  }
  return rec;
}

}  // namespace detail

// --- dataset file ---------------------------------------------------------------

inline constexpr const char* kDatasetMagic = "pixelcode-dataset";

inline void write_dataset(std::ostream& out, const Dataset& ds, bool complete) {
  const DatasetConfig& cfg = ds.config;
  out << kDatasetMagic << " v1\n";
  out << "kind " << to_string(cfg.kind) << "\n";
  out << "k_samples " << cfg.k_samples << "\n";
  out << "antenna_qs";
  for (const int q : cfg.antenna_qs) out << " " << q;
  out << "\n";
  out << "n_tx " << cfg.n_tx << "\n";
  out << "n_rx " << cfg.n_rx << "\n";
  out << "schemes";
  for (const auto& s : cfg.schemes) out << " " << s.label();
  out << "\n";
  out << "snr_list";
  for (const double s : cfg.snr_list) out << " " << fmt_double(s);
  out << "\n";
  out << "n_samples " << cfg.n_samples << "\n";
  out << "train_count " << cfg.train_count << "\n";
  out << "sebo_block " << cfg.sebo_block << "\n";
  out << "sebo_max_sweeps " << cfg.sebo_max_sweeps << "\n";
  out << "seed " << cfg.seed << "\n";
  out << "antenna_digest " << (cfg.antenna_digest.empty() ? "-" : cfg.antenna_digest) << "\n";
  out << "records " << ds.records.size() << "\n";
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const DatasetRecord& rec = ds.records[i];
    out << "record " << i << " " << rec.channel_seed << " " << fmt_double(rec.snr) << " "
        << fmt_double(rec.sebo_value);
    for (const auto& label : rec.labels) {
      out << " map";
      for (const auto e : label) out << " " << e;
    }
    out << "\n";
  }
  if (complete) {
    out << "split_train";
    for (const auto i : ds.train_indices) out << " " << i;
    out << "\n";
    out << "split_test";
    for (const auto i : ds.test_indices) out << " " << i;
    out << "\n";
    out << "end\n";
  }
}

inline void save_dataset(const Dataset& ds, const std::string& path, bool complete = true) {
  const std::string tmp = path + ".tmp";
  {
    auto out = open_output(tmp);
    write_dataset(out, ds, complete);
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

namespace detail {

inline Dataset read_dataset(std::istream& in, const std::string& name, bool* complete) {
  LineReader r(in, name);
  const auto head = r.next();
  if (head[0] != kDatasetMagic || head.size() < 2 || head[1] != "v1")
    throw ParseError(r.context() + ": not a " + std::string(kDatasetMagic) + " v1 file");
  Dataset ds;
  DatasetConfig& cfg = ds.config;
  cfg.kind = instance_kind_from_string(r.expect("kind", 1)[1]);
  cfg.k_samples = static_cast<int>(r.expect_int("k_samples"));
  const auto qs = r.expect("antenna_qs", 1);
  for (std::size_t i = 1; i < qs.size(); ++i)
    cfg.antenna_qs.push_back(static_cast<int>(parse_int(qs[i], r.context())));
  cfg.n_tx = static_cast<int>(r.expect_int("n_tx"));
  cfg.n_rx = static_cast<int>(r.expect_int("n_rx"));
  const auto schemes = r.expect("schemes", 1);
  for (std::size_t i = 1; i < schemes.size(); ++i) {
    const auto& tok = schemes[i];
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw ParseError(r.context() + ": scheme must look like binary:3");
    cfg.schemes.emplace_back(
        scheme_variant_from_string(tok.substr(0, colon)),
        static_cast<int>(parse_int(tok.substr(colon + 1), r.context())));
  }
  const auto snrs = r.expect("snr_list", 1);
  for (std::size_t i = 1; i < snrs.size(); ++i)
    cfg.snr_list.push_back(parse_double(snrs[i], r.context()));
  cfg.n_samples = static_cast<std::size_t>(r.expect_int("n_samples"));
  cfg.train_count = static_cast<std::size_t>(r.expect_int("train_count"));
  cfg.sebo_block = static_cast<std::size_t>(r.expect_int("sebo_block"));
  cfg.sebo_max_sweeps = static_cast<std::size_t>(r.expect_int("sebo_max_sweeps"));
  cfg.seed = static_cast<std::uint64_t>(r.expect_uint("seed"));
  const auto digest = r.expect("antenna_digest", 1)[1];
  cfg.antenna_digest = digest == "-" ? "" : digest;
  cfg.validate();

  const auto n_records = static_cast<std::size_t>(r.expect_int("records"));
  ds.records.reserve(n_records);
  for (std::size_t i = 0; i < n_records; ++i) {
    const auto toks = r.expect("record", 4);
    if (static_cast<std::size_t>(parse_int(toks[1], r.context())) != i)
      throw ParseError(r.context() + ": records out of order");
    DatasetRecord rec;
    rec.channel_seed = static_cast<std::uint64_t>(parse_uint(toks[2], r.context()));
    rec.snr = parse_double(toks[3], r.context());
    rec.sebo_value = parse_double(toks[4], r.context());
    std::size_t at = 5;
    for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
      if (at >= toks.size() || toks[at] != "map")
        throw ParseError(r.context() + ": expected 'map' marker");
      ++at;
      const std::size_t count = cfg.elements_per_scheme(s);
      if (at + count > toks.size())
        throw ParseError(r.context() + ": label map truncated");
      std::vector<std::uint32_t> label(count);
      for (std::size_t e = 0; e < count; ++e)
        label[e] = static_cast<std::uint32_t>(parse_int(toks[at + e], r.context()));
      at += count;
      rec.labels.push_back(std::move(label));
    }
    if (at != toks.size()) throw ParseError(r.context() + ": trailing fields on record");
    ds.records.push_back(std::move(rec));
  }

  *complete = false;
  std::vector<std::string> toks;
  try {
    toks = r.next();
  } catch (const ParseError&) {
    return ds;  // checkpoint file: records only
  }
  if (toks[0] != "split_train")
    throw ParseError(r.context() + ": expected split_train, got '" + toks[0] + "'");
  for (std::size_t i = 1; i < toks.size(); ++i)
    ds.train_indices.push_back(static_cast<std::size_t>(parse_int(toks[i], r.context())));
  toks = r.expect("split_test");
  for (std::size_t i = 1; i < toks.size(); ++i)
    ds.test_indices.push_back(static_cast<std::size_t>(parse_int(toks[i], r.context())));
  r.expect("end");
  if (ds.records.size() != cfg.n_samples)
    throw InvariantViolation(name + ": complete dataset must have n_samples records");
  if (ds.train_indices.size() + ds.test_indices.size() != cfg.n_samples)
    throw InvariantViolation(name + ": split does not cover the dataset");
  *complete = true;
  return ds;
}

}  // namespace detail

/// Load a finished dataset (split present).
inline Dataset load_dataset(const std::string& path) {
  auto in = open_input(path);
  bool complete = false;
  Dataset ds = detail::read_dataset(in, path, &complete);
  if (!complete) throw ParseError(path + ": dataset is incomplete (no split section)");
  return ds;
}

struct GenerateOptions {
  int jobs = 1;
  std::string checkpoint_path;         // empty: no checkpointing
  std::size_t checkpoint_every = 256;  // records per checkpoint rewrite
};

/// Draw channels, run SEBO for labels, and encode them under every scheme.
/// Every record depends only on (config, index), so parallel generation and
/// checkpoint resume produce bit-identical datasets.
inline Dataset generate_dataset(const DatasetConfig& cfg,
                                const std::vector<std::shared_ptr<const AntennaModel>>& antennas,
                                const GenerateOptions& opt = {}) {
  cfg.validate();
  if (antennas.size() != cfg.antenna_qs.size())
    throw ValidationError("antenna count does not match config");
  for (std::size_t a = 0; a < antennas.size(); ++a) {
    if (!antennas[a]) throw ValidationError("antenna is null");
    if (antennas[a]->q_ports != cfg.antenna_qs[a] || antennas[a]->k_samples != cfg.k_samples)
      throw ValidationError("antenna " + std::to_string(a) + " does not match config shapes");
  }
  if (cfg.sebo_block > cfg.joint_bits() || cfg.sebo_block > kMaxExhaustiveArity ||
      cfg.sebo_block < 1)
    throw BlockTooLarge("sebo_block outside [1, min(arity, 24)]");

  Dataset ds;
  ds.config = cfg;
  std::size_t done = 0;
  if (!opt.checkpoint_path.empty() && std::filesystem::exists(opt.checkpoint_path)) {
    auto in = open_input(opt.checkpoint_path);
    bool complete = false;
    Dataset existing = detail::read_dataset(in, opt.checkpoint_path, &complete);
    if (!(existing.config == cfg))
      throw ValidationError(opt.checkpoint_path + ": existing file was generated from a different config");
    if (complete) return existing;
    ds.records = std::move(existing.records);
    done = ds.records.size();
  }
  ds.records.resize(cfg.n_samples);

  std::size_t at = done;
  while (at < cfg.n_samples) {
    const std::size_t chunk_end =
        opt.checkpoint_path.empty()
            ? cfg.n_samples
            : std::min(cfg.n_samples, at + std::max<std::size_t>(1, opt.checkpoint_every));
    parallel_for(chunk_end - at, opt.jobs, [&](std::size_t offset) {
      ds.records[at + offset] = detail::generate_record(cfg, at + offset, antennas);
    });
    at = chunk_end;
    if (!opt.checkpoint_path.empty() && at < cfg.n_samples) {
      Dataset partial;
      partial.config = cfg;
      partial.records.assign(ds.records.begin(),
                             ds.records.begin() + static_cast<std::ptrdiff_t>(at));
      save_dataset(partial, opt.checkpoint_path, /*complete=*/false);
    }
  }

  assign_split(ds);
  if (!opt.checkpoint_path.empty()) save_dataset(ds, opt.checkpoint_path, /*complete=*/true);
  return ds;
}

}  // namespace pixelcode
