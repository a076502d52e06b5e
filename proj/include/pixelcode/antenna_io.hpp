#pragma once

#include <fstream>
#include <ostream>
#include <string>

#include "pixelcode/antenna.hpp"
#include "pixelcode/textio.hpp"

namespace pixelcode {

inline constexpr const char* kAntennaMagic = "pixelcode-antenna";

inline void write_antenna(std::ostream& out, const AntennaModel& m) {
  out << kAntennaMagic << " v1\n";
  out << "q_ports " << m.q_ports << "\n";
  out << "k_samples " << m.k_samples << "\n";
  out << "gamma " << fmt_double(m.gamma) << "\n";
  out << "z_aa " << fmt_double(m.z_aa.real()) << " " << fmt_double(m.z_aa.imag()) << "\n";
  for (int i = 0; i < m.q_ports; ++i) {
    out << "z_pp";
    for (int j = 0; j < m.q_ports; ++j)
      out << " " << fmt_double(m.z_pp(i, j).real()) << " " << fmt_double(m.z_pp(i, j).imag());
    out << "\n";
  }
  out << "z_pa";
  for (int q = 0; q < m.q_ports; ++q)
    out << " " << fmt_double(m.z_pa(q).real()) << " " << fmt_double(m.z_pa(q).imag());
  out << "\n";
  for (int col = 0; col <= m.q_ports; ++col) {
    out << "e_oc";
    for (int row = 0; row < 2 * m.k_samples; ++row)
      out << " " << fmt_double(m.e_oc(row, col).real()) << " "
          << fmt_double(m.e_oc(row, col).imag());
    out << "\n";
  }
  out << "end\n";
}

inline void export_antenna(const AntennaModel& m, const std::string& path) {
  auto out = open_output(path);
  write_antenna(out, m);
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace detail {

inline void parse_complex_row(const std::vector<std::string>& toks, const std::string& where,
                              std::size_t count, Eigen::VectorXcd& dst) {
  if (toks.size() != 1 + 2 * count)
    throw ParseError(where + ": expected " + std::to_string(2 * count) + " numbers, got " +
                     std::to_string(toks.size() - 1));
  dst.resize(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    const double re = parse_double(toks[1 + 2 * i], where);
    const double im = parse_double(toks[2 + 2 * i], where);
    dst(static_cast<Eigen::Index>(i)) = cxd(re, im);
  }
}

}  // namespace detail

inline AntennaModel read_antenna(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  const auto head = r.next();
  if (head[0] != kAntennaMagic || head.size() < 2 || head[1] != "v1")
    throw ParseError(r.context() + ": not a " + std::string(kAntennaMagic) + " v1 file");
  AntennaModel m;
  m.q_ports = static_cast<int>(r.expect_int("q_ports"));
  m.k_samples = static_cast<int>(r.expect_int("k_samples"));
  if (m.q_ports < 1 || m.k_samples < 1)
    throw InvariantViolation(name + ": q_ports and k_samples must be >= 1");
  m.gamma = r.expect_double("gamma");
  const auto zaa = r.expect("z_aa", 2);
  m.z_aa = cxd(parse_double(zaa[1], r.context()), parse_double(zaa[2], r.context()));
  m.z_pp.resize(m.q_ports, m.q_ports);
  Eigen::VectorXcd row;
  for (int i = 0; i < m.q_ports; ++i) {
    detail::parse_complex_row(r.expect("z_pp"), r.context(),
                              static_cast<std::size_t>(m.q_ports), row);
    m.z_pp.row(i) = row.transpose();
  }
  detail::parse_complex_row(r.expect("z_pa"), r.context(), static_cast<std::size_t>(m.q_ports),
                            m.z_pa);
  m.e_oc.resize(2 * m.k_samples, m.q_ports + 1);
  for (int col = 0; col <= m.q_ports; ++col) {
    detail::parse_complex_row(r.expect("e_oc"), r.context(),
                              static_cast<std::size_t>(2 * m.k_samples), row);
    m.e_oc.col(col) = row;
  }
  r.expect("end");
  m.validate(1e-9);
  return m;
}

inline AntennaModel import_antenna(const std::string& path) {
  auto in = open_input(path);
  return read_antenna(in, path);
}

}  // namespace pixelcode
