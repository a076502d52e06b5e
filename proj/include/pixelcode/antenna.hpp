#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>

#include "pixelcode/coder.hpp"
#include "pixelcode/errors.hpp"
#include "pixelcode/rng.hpp"

namespace pixelcode {

using cxd = std::complex<double>;

constexpr double kSolveResidualTol = 1e-9;
constexpr double kZeroPatternTol = 1e-12;
constexpr double kDefaultGamma = 1e10;

/// Multi-port description of one pixel antenna: a (Q+1)-port network with the
/// antenna port first, plus the open-circuit patterns of every port. The
/// model is immutable after construction and safe to share across threads.
struct AntennaModel {
  int q_ports = 0;   // Q
  int k_samples = 0; // K spatial angle samples
  cxd z_aa;                // antenna-port self-impedance
  Eigen::MatrixXcd z_pp;   // Q x Q pixel-port self/mutual impedance
  Eigen::VectorXcd z_pa;   // Q trans-impedance antenna -> pixel ports
  Eigen::MatrixXcd e_oc;   // 2K x (Q+1), antenna-port column first
  double gamma = kDefaultGamma;

  /// Full (Q+1)x(Q+1) impedance matrix [z_aa z_pa^T; z_pa z_pp].
  Eigen::MatrixXcd assemble_impedance() const {
    Eigen::MatrixXcd z(q_ports + 1, q_ports + 1);
    z(0, 0) = z_aa;
    z.block(0, 1, 1, q_ports) = z_pa.transpose();
    z.block(1, 0, q_ports, 1) = z_pa;
    z.block(1, 1, q_ports, q_ports) = z_pp;
    return z;
  }

  /// Shape/symmetry checks. `symmetry_tol` is relative to the largest entry.
  void validate(double symmetry_tol = 1e-9) const {
    if (q_ports < 1) throw InvariantViolation("q_ports must be >= 1");
    if (k_samples < 1) throw InvariantViolation("k_samples must be >= 1");
    if (gamma <= 0.0) throw InvariantViolation("gamma must be positive");
    if (z_pp.rows() != q_ports || z_pp.cols() != q_ports)
      throw InvariantViolation("z_pp must be QxQ");
    if (z_pa.size() != q_ports) throw InvariantViolation("z_pa must have Q entries");
    if (e_oc.rows() != 2 * k_samples || e_oc.cols() != q_ports + 1)
      throw InvariantViolation("e_oc must be 2K x (Q+1)");
    const Eigen::MatrixXcd z = assemble_impedance();
    const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
    const double asym = (z - z.transpose()).cwiseAbs().maxCoeff();
    if (asym > symmetry_tol * scale)
      throw InvariantViolation("impedance matrix is not symmetric (max |Z - Z^T| = " +
                               std::to_string(asym) + ")");
  }
};

/// Normalized far-field pattern: K theta components then K phi components.
struct RadiationPattern {
  Eigen::VectorXcd e;  // 2K entries, unit Euclidean norm
};

/// Switch-state load impedances as a diagonal matrix: 0 for a shorted switch
/// (bit 0), j*gamma for an open one (bit 1).
inline Eigen::MatrixXcd load_impedance(const AntennaCoder& coder, double gamma) {
  coder.validate();
  if (gamma <= 0.0) throw DomainError("gamma must be positive");
  const auto q = static_cast<Eigen::Index>(coder.size());
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(q, q);
  for (Eigen::Index i = 0; i < q; ++i)
    if (coder.bits[static_cast<std::size_t>(i)]) z(i, i) = cxd(0.0, gamma);
  return z;
}

/// Pixel-port currents i_P = -(Z_PP + Z_L(b))^-1 z_PA i_A, with the solve
/// residual checked against kSolveResidualTol * ||z_PA i_A||.
inline Eigen::VectorXcd pixel_port_currents(const AntennaModel& model,
                                            const AntennaCoder& coder, cxd i_a) {
  if (static_cast<int>(coder.size()) != model.q_ports)
    throw InvariantViolation("coder length " + std::to_string(coder.size()) +
                             " does not match q_ports " + std::to_string(model.q_ports));
  coder.validate();
  Eigen::MatrixXcd lhs = model.z_pp;
  for (int q = 0; q < model.q_ports; ++q)
    if (coder.bits[static_cast<std::size_t>(q)]) lhs(q, q) += cxd(0.0, model.gamma);
  const Eigen::VectorXcd rhs = -model.z_pa * i_a;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
  const Eigen::VectorXcd i_p = lu.solve(rhs);
  const double residual = (lhs * i_p - rhs).norm();
  const double limit = kSolveResidualTol * rhs.norm();
  if (!i_p.allFinite() || residual > limit)
    throw SingularNetwork("pixel-port solve residual " + std::to_string(residual) +
                          " exceeds tolerance for coder " + coder.to_string());
  return i_p;
}

/// Unit-norm radiation pattern e(b) = E_oc [1; i_P(b)] / ||.||. The antenna
/// port current is the normalizing scalar: the raw pattern is linear in i_A,
/// so any nonzero choice yields the same unit pattern up to phase.
inline RadiationPattern radiation_pattern(const AntennaModel& model,
                                          const AntennaCoder& coder) {
  const Eigen::VectorXcd i_p = pixel_port_currents(model, coder, cxd(1.0, 0.0));
  Eigen::VectorXcd currents(model.q_ports + 1);
  currents(0) = cxd(1.0, 0.0);
  currents.tail(model.q_ports) = i_p;
  Eigen::VectorXcd raw = model.e_oc * currents;
  const double norm = raw.norm();
  if (norm < kZeroPatternTol)
    throw ZeroPattern("coder " + coder.to_string() + " radiates nothing (||e|| = " +
                      std::to_string(norm) + ")");
  RadiationPattern p;
  p.e = raw / norm;
  return p;
}

/// Synthetic passive reciprocal network standing in for measured EM data:
/// Gram-matrix real part (positive definite, ~50 ohm scale), symmetric
/// imaginary part, complex Gaussian open-circuit patterns. Deterministic for
/// a given seed.
inline AntennaModel synthesize_antenna(int q_ports, int k_samples, std::uint64_t seed,
                                       double gamma = kDefaultGamma) {
  if (q_ports < 1) throw ValidationError("q_ports must be >= 1");
  if (k_samples < 1) throw ValidationError("k_samples must be >= 1");
  if (gamma <= 0.0) throw ValidationError("gamma must be positive");
  Rng rng(seed);
  const int n = q_ports + 1;

  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  Eigen::MatrixXd gram = a * a.transpose();
  // Exact symmetry matters downstream; GEMM output is only symmetric up to
  // rounding, the half-sum is bitwise symmetric.
  Eigen::MatrixXd re = 0.5 * (gram + gram.transpose()) * (50.0 / n);
  re.diagonal().array() += 5.0;

  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = rng.gaussian();
  const Eigen::MatrixXd im = 12.5 * (b + b.transpose());

  AntennaModel m;
  m.q_ports = q_ports;
  m.k_samples = k_samples;
  m.gamma = gamma;
  m.z_aa = cxd(re(0, 0), im(0, 0));
  m.z_pa.resize(q_ports);
  for (int q = 0; q < q_ports; ++q) m.z_pa(q) = cxd(re(q + 1, 0), im(q + 1, 0));
  m.z_pp.resize(q_ports, q_ports);
  for (int i = 0; i < q_ports; ++i)
    for (int j = 0; j < q_ports; ++j) m.z_pp(i, j) = cxd(re(i + 1, j + 1), im(i + 1, j + 1));
  m.e_oc.resize(2 * k_samples, n);
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < 2 * k_samples; ++row) m.e_oc(row, col) = rng.complex_gaussian();
  m.validate(1e-12);
  return m;
}

}  // namespace pixelcode
