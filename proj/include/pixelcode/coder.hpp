#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pixelcode/errors.hpp"

namespace pixelcode {

/// Binary switch-state vector for one pixel antenna.
/// bit = 1: switch open (off), bit = 0: switch short (on).
struct AntennaCoder {
  std::vector<std::uint8_t> bits;

  AntennaCoder() = default;
  explicit AntennaCoder(std::vector<std::uint8_t> b) : bits(std::move(b)) { validate(); }

  std::size_t size() const { return bits.size(); }

  void validate() const {
    for (std::size_t q = 0; q < bits.size(); ++q)
      if (bits[q] > 1)
        throw DomainError("coder bit " + std::to_string(q) + " is not 0/1");
  }

  /// MSB-first expansion of v over n bit positions; bits[0] is the most
  /// significant digit. Shared convention with the map encoding and the
  /// optimizer tie rule.
  static AntennaCoder from_index(std::uint64_t v, std::size_t n) {
    AntennaCoder c;
    c.bits.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      c.bits[i] = static_cast<std::uint8_t>((v >> (n - 1 - i)) & 1u);
    return c;
  }

  std::uint64_t to_index() const {
    std::uint64_t v = 0;
    for (const auto b : bits) v = (v << 1) | b;
    return v;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits.size());
    for (const auto b : bits) s.push_back(b ? '1' : '0');
    return s;
  }

  static AntennaCoder from_string(const std::string& s) {
    AntennaCoder c;
    c.bits.reserve(s.size());
    for (const char ch : s) {
      if (ch != '0' && ch != '1') throw DomainError("coder string has non-binary digit");
      c.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return c;
  }

  friend bool operator==(const AntennaCoder& a, const AntennaCoder& b) {
    return a.bits == b.bits;
  }
};

}  // namespace pixelcode
