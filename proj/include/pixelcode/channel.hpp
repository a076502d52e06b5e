#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "pixelcode/antenna.hpp"
#include "pixelcode/textio.hpp"

namespace pixelcode {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Angular-domain channel between radiation patterns: 2K x 2K complex gains
/// from departure to arrival angles, tiled [theta-theta, theta-phi;
/// phi-theta, phi-phi] in K x K blocks.
struct VirtualChannel {
  Eigen::MatrixXcd h;  // 2K x 2K
  int k_samples = 0;
  std::uint64_t seed = 0;  // 0 when imported from external data

  auto theta_theta() const { return h.topLeftCorner(k_samples, k_samples); }
  auto theta_phi() const { return h.topRightCorner(k_samples, k_samples); }
  auto phi_theta() const { return h.bottomLeftCorner(k_samples, k_samples); }
  auto phi_phi() const { return h.bottomRightCorner(k_samples, k_samples); }
};

/// Rich-scattering draw: iid circularly-symmetric complex Gaussian entries
/// with unit variance, deterministic per seed.
inline VirtualChannel sample_virtual_channel(int k_samples, std::uint64_t seed) {
  if (k_samples < 1) throw ValidationError("k_samples must be >= 1");
  VirtualChannel ch;
  ch.k_samples = k_samples;
  ch.seed = seed;
  Rng rng(seed);
  const int n = 2 * k_samples;
  ch.h.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ch.h(i, j) = rng.complex_gaussian();
  return ch;
}

/// Fixed transmit pattern used when the transmitter is a conventional
/// antenna: uniform unit vector over both polarization blocks.
inline Eigen::VectorXcd uniform_pattern(int k_samples) {
  const int n = 2 * k_samples;
  return Eigen::VectorXcd::Constant(n, cxd(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

/// SISO link: fixed transmit pattern, pixel antenna at the receiver.
class SisoInstance {
public:
  SisoInstance(std::shared_ptr<const VirtualChannel> channel,
               std::shared_ptr<const AntennaModel> rx_antenna)
      : SisoInstance(std::move(channel), uniform_pattern_for(rx_antenna), rx_antenna) {}

  SisoInstance(std::shared_ptr<const VirtualChannel> channel, Eigen::VectorXcd e_t,
               std::shared_ptr<const AntennaModel> rx_antenna)
      : channel_(std::move(channel)), e_t_(std::move(e_t)), rx_(std::move(rx_antenna)) {
    if (!channel_ || !rx_) throw ValidationError("siso instance needs a channel and an antenna");
    const int n = 2 * channel_->k_samples;
    if (channel_->h.rows() != n || channel_->h.cols() != n)
      throw InvariantViolation("virtual channel is not 2K x 2K");
    if (rx_->k_samples != channel_->k_samples)
      throw InvariantViolation("antenna K does not match channel K");
    if (e_t_.size() != n) throw InvariantViolation("e_t must have 2K entries");
    if (std::abs(e_t_.norm() - 1.0) > 1e-9)
      throw InvariantViolation("e_t must be unit norm");
    w_ = channel_->h * e_t_;  // gain needs H_v only through this vector
  }

  const VirtualChannel& channel() const { return *channel_; }
  const AntennaModel& rx_antenna() const { return *rx_; }
  const std::shared_ptr<const AntennaModel>& rx_antenna_ptr() const { return rx_; }
  const Eigen::VectorXcd& e_t() const { return e_t_; }
  const Eigen::VectorXcd& w() const { return w_; }

private:
  static Eigen::VectorXcd uniform_pattern_for(const std::shared_ptr<const AntennaModel>& m) {
    if (!m) throw ValidationError("siso instance needs an antenna");
    return uniform_pattern(m->k_samples);
  }

  std::shared_ptr<const VirtualChannel> channel_;
  Eigen::VectorXcd e_t_;
  std::shared_ptr<const AntennaModel> rx_;
  Eigen::VectorXcd w_;
};

/// Beamspace channel gain |e_R(b)^T H_v e_T|^2. Coders that radiate nothing
/// evaluate to -inf so searches can skip them.
inline double siso_gain(const SisoInstance& inst, const AntennaCoder& coder) {
  Eigen::VectorXcd pattern;
  try {
    pattern = radiation_pattern(inst.rx_antenna(), coder).e;
  } catch (const ZeroPattern&) {
    return kNegInf;
  }
  const cxd h = pattern.cwiseProduct(inst.w()).sum();
  return std::norm(h);
}

/// MIMO link with pixel antennas on both ends and uniform power allocation.
class MimoInstance {
public:
  MimoInstance(std::shared_ptr<const VirtualChannel> channel,
               std::vector<std::shared_ptr<const AntennaModel>> tx_antennas,
               std::vector<std::shared_ptr<const AntennaModel>> rx_antennas, double snr_linear)
      : channel_(std::move(channel)),
        tx_(std::move(tx_antennas)),
        rx_(std::move(rx_antennas)),
        snr_(snr_linear) {
    if (!channel_) throw ValidationError("mimo instance needs a channel");
    if (tx_.empty() || rx_.empty())
      throw ValidationError("mimo instance needs at least one antenna per side");
    if (!(snr_ > 0.0)) throw ValidationError("snr must be positive");
    const int n = 2 * channel_->k_samples;
    if (channel_->h.rows() != n || channel_->h.cols() != n)
      throw InvariantViolation("virtual channel is not 2K x 2K");
    for (const auto& a : tx_)
      if (!a || a->k_samples != channel_->k_samples)
        throw InvariantViolation("tx antenna K does not match channel K");
    for (const auto& a : rx_)
      if (!a || a->k_samples != channel_->k_samples)
        throw InvariantViolation("rx antenna K does not match channel K");
  }

  const VirtualChannel& channel() const { return *channel_; }
  int n_tx() const { return static_cast<int>(tx_.size()); }
  int n_rx() const { return static_cast<int>(rx_.size()); }
  const AntennaModel& tx_antenna(int i) const { return *tx_[static_cast<std::size_t>(i)]; }
  const AntennaModel& rx_antenna(int i) const { return *rx_[static_cast<std::size_t>(i)]; }
  double snr() const { return snr_; }

private:
  std::shared_ptr<const VirtualChannel> channel_;
  std::vector<std::shared_ptr<const AntennaModel>> tx_, rx_;
  double snr_;
};

/// H(B_T, B_R) = E_R^T H_v E_T with unit-norm pattern columns.
/// Propagates SingularNetwork/ZeroPattern from the pattern computation.
inline Eigen::MatrixXcd mimo_channel(const MimoInstance& inst,
                                     const std::vector<AntennaCoder>& tx_coders,
                                     const std::vector<AntennaCoder>& rx_coders) {
  if (static_cast<int>(tx_coders.size()) != inst.n_tx() ||
      static_cast<int>(rx_coders.size()) != inst.n_rx())
    throw ValidationError("coder count does not match antenna count");
  const int n = 2 * inst.channel().k_samples;
  Eigen::MatrixXcd e_t(n, inst.n_tx());
  for (int j = 0; j < inst.n_tx(); ++j)
    e_t.col(j) = radiation_pattern(inst.tx_antenna(j), tx_coders[static_cast<std::size_t>(j)]).e;
  Eigen::MatrixXcd e_r(n, inst.n_rx());
  for (int i = 0; i < inst.n_rx(); ++i)
    e_r.col(i) = radiation_pattern(inst.rx_antenna(i), rx_coders[static_cast<std::size_t>(i)]).e;
  return e_r.transpose() * inst.channel().h * e_t;
}

/// Uniform-power capacity log2 det(I + snr/N_T H H^H) of a given channel
/// matrix, via Cholesky of the Hermitian PSD Gram matrix.
inline double capacity_of_channel(const Eigen::MatrixXcd& h, double snr, int n_tx) {
  const Eigen::Index nr = h.rows();
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(nr, nr);
  gram.noalias() += (snr / static_cast<double>(n_tx)) * (h * h.adjoint());
  const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SingularNetwork("capacity factorization failed");
  double log2det = 0.0;
  for (Eigen::Index i = 0; i < nr; ++i)
    log2det += 2.0 * std::log2(llt.matrixLLT()(i, i).real());
  return std::max(0.0, log2det);
}

inline double mimo_capacity(const MimoInstance& inst, const std::vector<AntennaCoder>& tx_coders,
                            const std::vector<AntennaCoder>& rx_coders) {
  return capacity_of_channel(mimo_channel(inst, tx_coders, rx_coders), inst.snr(), inst.n_tx());
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// --- channel sample file -----------------------------------------------------

inline constexpr const char* kChannelMagic = "pixelcode-channel";

inline void write_channel(std::ostream& out, const VirtualChannel& ch) {
  out << kChannelMagic << " v1\n";
  out << "k_samples " << ch.k_samples << "\n";
  out << "seed " << ch.seed << "\n";
  for (Eigen::Index i = 0; i < ch.h.rows(); ++i) {
    out << "h";
    for (Eigen::Index j = 0; j < ch.h.cols(); ++j)
      out << " " << fmt_double(ch.h(i, j).real()) << " " << fmt_double(ch.h(i, j).imag());
    out << "\n";
  }
  out << "end\n";
}

inline void export_channel(const VirtualChannel& ch, const std::string& path) {
  auto out = open_output(path);
  write_channel(out, ch);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline VirtualChannel read_channel(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  const auto head = r.next();
  if (head[0] != kChannelMagic || head.size() < 2 || head[1] != "v1")
    throw ParseError(r.context() + ": not a " + std::string(kChannelMagic) + " v1 file");
  VirtualChannel ch;
  ch.k_samples = static_cast<int>(r.expect_int("k_samples"));
  if (ch.k_samples < 1) throw InvariantViolation(name + ": k_samples must be >= 1");
  ch.seed = static_cast<std::uint64_t>(r.expect_uint("seed"));
  const int n = 2 * ch.k_samples;
  ch.h.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const auto toks = r.expect("h");
    if (toks.size() != 1 + 2 * static_cast<std::size_t>(n))
      throw ParseError(r.context() + ": expected " + std::to_string(2 * n) + " numbers");
    for (int j = 0; j < n; ++j)
      ch.h(i, j) = cxd(parse_double(toks[static_cast<std::size_t>(1 + 2 * j)], r.context()),
                       parse_double(toks[static_cast<std::size_t>(2 + 2 * j)], r.context()));
  }
  r.expect("end");
  return ch;
}

inline VirtualChannel import_channel(const std::string& path) {
  auto in = open_input(path);
  return read_channel(in, path);
}

}  // namespace pixelcode
