#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <sstream>

#include "pixelcode/antenna.hpp"
#include "pixelcode/channel.hpp"

using namespace pixelcode;
using Catch::Matchers::WithinAbs;

namespace {

// Straight-line reimplementation of the SISO gain for cross-checks: its own
// Gaussian elimination, pattern assembly, and dot product. No Eigen solve,
// no shared state with the library path.
double naive_siso_gain(const AntennaModel& m, const AntennaCoder& coder,
                       const Eigen::MatrixXcd& h_v, const Eigen::VectorXcd& e_t) {
  const int q = m.q_ports;
  std::vector<std::vector<cxd>> a(static_cast<std::size_t>(q),
                                  std::vector<cxd>(static_cast<std::size_t>(q) + 1));
  for (int i = 0; i < q; ++i) {
    for (int j = 0; j < q; ++j) a[i][j] = m.z_pp(i, j);
    if (coder.bits[static_cast<std::size_t>(i)]) a[i][i] += cxd(0.0, m.gamma);
    a[i][static_cast<std::size_t>(q)] = -m.z_pa(i);
  }
  for (int col = 0; col < q; ++col) {  // partial pivoting
    int pivot = col;
    for (int r = col + 1; r < q; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
    for (int r = 0; r < q; ++r) {
      if (r == col) continue;
      const cxd factor = a[r][col] / a[col][col];
      for (int c = col; c <= q; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<cxd> currents(static_cast<std::size_t>(q) + 1);
  currents[0] = cxd(1.0, 0.0);
  for (int i = 0; i < q; ++i)
    currents[static_cast<std::size_t>(i) + 1] = a[i][static_cast<std::size_t>(q)] / a[i][i];
  std::vector<cxd> raw(static_cast<std::size_t>(2 * m.k_samples));
  double norm2 = 0.0;
  for (int row = 0; row < 2 * m.k_samples; ++row) {
    cxd acc(0.0, 0.0);
    for (int port = 0; port <= q; ++port)
      acc += m.e_oc(row, port) * currents[static_cast<std::size_t>(port)];
    raw[static_cast<std::size_t>(row)] = acc;
    norm2 += std::norm(acc);
  }
  const double norm = std::sqrt(norm2);
  cxd h(0.0, 0.0);
  for (int i = 0; i < 2 * m.k_samples; ++i) {
    cxd hrow(0.0, 0.0);
    for (int j = 0; j < 2 * m.k_samples; ++j) hrow += h_v(i, j) * e_t(j);
    h += (raw[static_cast<std::size_t>(i)] / norm) * hrow;
  }
  return std::norm(h);
}

std::shared_ptr<const VirtualChannel> channel_of(Eigen::MatrixXcd h, int k) {
  VirtualChannel ch;
  ch.h = std::move(h);
  ch.k_samples = k;
  return std::make_shared<const VirtualChannel>(std::move(ch));
}

}  // namespace

TEST_CASE("virtual channel sampling matches the paper's dimensions") {
  const VirtualChannel ch = sample_virtual_channel(72, 9);
  REQUIRE(ch.h.rows() == 144);
  REQUIRE(ch.h.cols() == 144);
  REQUIRE(ch.theta_theta().rows() == 72);
  REQUIRE(ch.phi_phi().cols() == 72);
  // Block views tile the matrix.
  REQUIRE(ch.theta_phi()(0, 0) == ch.h(0, 72));
  REQUIRE(ch.phi_theta()(0, 0) == ch.h(72, 0));
}

TEST_CASE("virtual channel sampling is deterministic per seed") {
  const VirtualChannel a = sample_virtual_channel(8, 1234);
  const VirtualChannel b = sample_virtual_channel(8, 1234);
  const VirtualChannel c = sample_virtual_channel(8, 1235);
  REQUIRE(a.h == b.h);
  REQUIRE(a.h != c.h);
}

TEST_CASE("channel entries have unit second moment") {
  const VirtualChannel ch = sample_virtual_channel(50, 77);  // 10000 entries
  const double mean_sq = ch.h.cwiseAbs2().mean();
  REQUIRE_THAT(mean_sq, WithinAbs(1.0, 0.05));
}

TEST_CASE("siso gain on engineered instances") {
  SECTION("identity channel with e_R = e_T gives gain 1") {
    const int k = 4;
    AntennaModel m;
    m.q_ports = 1;
    m.k_samples = k;
    m.z_aa = cxd(50.0, 0.0);
    m.z_pp = Eigen::MatrixXcd::Constant(1, 1, cxd(40.0, 0.0));
    m.z_pa = Eigen::VectorXcd::Zero(1);  // pixel port decoupled: e(b) = e_A / ||e_A||
    const Eigen::VectorXcd e_t = uniform_pattern(k);
    m.e_oc = Eigen::MatrixXcd::Zero(2 * k, 2);
    m.e_oc.col(0) = e_t * 5.0;  // real positive scale, normalizes back to e_t
    const auto inst = SisoInstance(channel_of(Eigen::MatrixXcd::Identity(2 * k, 2 * k), k),
                                   e_t, std::make_shared<const AntennaModel>(m));
    REQUIRE_THAT(siso_gain(inst, AntennaCoder::from_string("0")), WithinAbs(1.0, 1e-12));
  }

  SECTION("zero channel gives zero gain for every coder") {
    const int k = 3;
    const auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(4, k, 2));
    const SisoInstance inst(channel_of(Eigen::MatrixXcd::Zero(2 * k, 2 * k), k), antenna);
    for (std::uint64_t v = 0; v < 16; ++v)
      REQUIRE(siso_gain(inst, AntennaCoder::from_index(v, 4)) == 0.0);
  }
}

TEST_CASE("siso gain matches an independent reimplementation on all Q=4 coders") {
  const int k = 5;
  const auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(4, k, 21));
  const auto channel = std::make_shared<const VirtualChannel>(sample_virtual_channel(k, 22));
  const SisoInstance inst(channel, antenna);
  for (std::uint64_t v = 0; v < 16; ++v) {
    const AntennaCoder coder = AntennaCoder::from_index(v, 4);
    const double got = siso_gain(inst, coder);
    const double want = naive_siso_gain(*antenna, coder, channel->h, inst.e_t());
    REQUIRE_THAT(got, WithinAbs(want, 1e-9 * std::max(1.0, want)));
  }
}

TEST_CASE("gain is invariant to a global phase on the receive pattern") {
  const int k = 4;
  const auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(5, k, 31));
  auto rotated = std::make_shared<AntennaModel>(*antenna);
  rotated->e_oc *= std::polar(1.0, 1.234);
  const auto channel = std::make_shared<const VirtualChannel>(sample_virtual_channel(k, 32));
  const SisoInstance a(channel, antenna);
  const SisoInstance b(channel, std::shared_ptr<const AntennaModel>(rotated));
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const AntennaCoder coder(rng.random_bits(5));
    REQUIRE_THAT(siso_gain(a, coder), WithinAbs(siso_gain(b, coder), 1e-12));
  }
}

TEST_CASE("mimo channel composes patterns around the virtual channel") {
  const int k = 4;
  const auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(5, k, 41));
  const auto channel = std::make_shared<const VirtualChannel>(sample_virtual_channel(k, 42));

  SECTION("1x1 reduces to the siso gain with the transmit pattern as e_T") {
    const MimoInstance inst(channel, {antenna}, {antenna}, 2.0);
    const AntennaCoder bt = AntennaCoder::from_string("01100");
    const AntennaCoder br = AntennaCoder::from_string("11010");
    const Eigen::MatrixXcd h = mimo_channel(inst, {bt}, {br});
    REQUIRE(h.rows() == 1);
    REQUIRE(h.cols() == 1);
    const SisoInstance siso(channel, radiation_pattern(*antenna, bt).e, antenna);
    REQUIRE_THAT(std::norm(h(0, 0)), WithinAbs(siso_gain(siso, br), 1e-12));
  }

  SECTION("zero channel gives the zero matrix") {
    const MimoInstance inst(channel_of(Eigen::MatrixXcd::Zero(2 * k, 2 * k), k),
                            {antenna, antenna}, {antenna}, 1.0);
    const std::vector<AntennaCoder> bt = {AntennaCoder::from_string("00000"),
                                          AntennaCoder::from_string("10101")};
    const std::vector<AntennaCoder> br = {AntennaCoder::from_string("01010")};
    REQUIRE(mimo_channel(inst, bt, br).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("permuting antennas permutes rows and columns") {
    const auto antenna2 = std::make_shared<const AntennaModel>(synthesize_antenna(5, k, 43));
    const std::vector<AntennaCoder> bt = {AntennaCoder::from_string("00110"),
                                          AntennaCoder::from_string("10001")};
    const std::vector<AntennaCoder> br = {AntennaCoder::from_string("01010")};
    const MimoInstance fwd(channel, {antenna, antenna2}, {antenna}, 1.0);
    const MimoInstance swapped(channel, {antenna2, antenna}, {antenna}, 1.0);
    const Eigen::MatrixXcd h1 = mimo_channel(fwd, bt, br);
    const Eigen::MatrixXcd h2 = mimo_channel(swapped, {bt[1], bt[0]}, br);
    REQUIRE((h1.col(0) - h2.col(1)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE((h1.col(1) - h2.col(0)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("capacity agrees with the eigenvalue-sum oracle") {
  SECTION("hand values") {
    REQUIRE(capacity_of_channel(Eigen::MatrixXcd::Zero(2, 3), 5.0, 3) == 0.0);
    // I + (2/2) I = 2I for 2x2 identity: log2 det = 2.
    REQUIRE_THAT(capacity_of_channel(Eigen::MatrixXcd::Identity(2, 2), 2.0, 2),
                 WithinAbs(2.0, 1e-12));
  }

  SECTION("random matrices") {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
      const int nr = 1 + static_cast<int>(rng.below(4));
      const int nt = 1 + static_cast<int>(rng.below(4));
      Eigen::MatrixXcd h(nr, nt);
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) h(i, j) = rng.complex_gaussian();
      const double snr = 0.1 + 30.0 * rng.uniform();
      const double got = capacity_of_channel(h, snr, nt);

      const Eigen::MatrixXcd gram = h * h.adjoint();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
      double want = 0.0;
      for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
        want += std::log2(1.0 + snr / nt * std::max(0.0, eig.eigenvalues()(i)));
      REQUIRE_THAT(got, WithinAbs(want, 1e-9));
    }
  }
}

TEST_CASE("capacity is monotone in snr and unitary invariant") {
  Rng rng(66);
  Eigen::MatrixXcd h(2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) h(i, j) = rng.complex_gaussian();

  double prev = 0.0;
  for (int step = 0; step <= 20; ++step) {
    const double snr = db_to_linear(-10.0 + 2.0 * step);
    const double c = capacity_of_channel(h, snr, 4);
    REQUIRE(c >= prev);
    prev = c;
  }

  // Random unitary via QR of a Gaussian matrix.
  Eigen::MatrixXcd g(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g(i, j) = rng.complex_gaussian();
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  const Eigen::MatrixXcd u = qr.householderQ();
  REQUIRE_THAT(capacity_of_channel(u * h, 7.0, 4), WithinAbs(capacity_of_channel(h, 7.0, 4), 1e-9));
}

TEST_CASE("1x1 capacity equals log2(1 + snr * gain)") {
  const int k = 4;
  const auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(6, k, 71));
  const auto channel = std::make_shared<const VirtualChannel>(sample_virtual_channel(k, 72));
  const double snr = 3.7;
  const MimoInstance mimo(channel, {antenna}, {antenna}, snr);
  const AntennaCoder bt = AntennaCoder::from_string("010011");
  const AntennaCoder br = AntennaCoder::from_string("110100");
  const SisoInstance siso(channel, radiation_pattern(*antenna, bt).e, antenna);
  const double cap = mimo_capacity(mimo, {bt}, {br});
  REQUIRE_THAT(cap, WithinAbs(std::log2(1.0 + snr * siso_gain(siso, br)), 1e-12));
}

TEST_CASE("channel files round-trip bit-exactly") {
  const VirtualChannel ch = sample_virtual_channel(5, 81);
  std::stringstream buf;
  write_channel(buf, ch);
  const VirtualChannel back = read_channel(buf, "buffer");
  REQUIRE(back.k_samples == 5);
  REQUIRE(back.seed == 81);
  REQUIRE(back.h == ch.h);

  std::stringstream cut(buf.str().substr(0, 100));
  REQUIRE_THROWS_AS(read_channel(cut, "buffer"), ParseError);
}

TEST_CASE("instance construction validates its inputs") {
  const int k = 4;
  const auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(4, k, 91));
  const auto channel = std::make_shared<const VirtualChannel>(sample_virtual_channel(k, 92));
  REQUIRE_THROWS_AS(SisoInstance(channel, Eigen::VectorXcd::Zero(2 * k), antenna),
                    InvariantViolation);
  const auto wrong_k = std::make_shared<const VirtualChannel>(sample_virtual_channel(k + 1, 93));
  REQUIRE_THROWS_AS(SisoInstance(wrong_k, antenna), InvariantViolation);
  REQUIRE_THROWS_AS(MimoInstance(channel, {antenna}, {antenna}, 0.0), ValidationError);
  REQUIRE_THROWS_AS(MimoInstance(channel, {}, {antenna}, 1.0), ValidationError);
}
