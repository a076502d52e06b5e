#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pixelcode/coder.hpp"
#include "pixelcode/errors.hpp"

namespace pixelcode {

enum class SchemeVariant { NaturalBinary, ReflectedGray };

inline std::string to_string(SchemeVariant v) {
  return v == SchemeVariant::NaturalBinary ? "binary" : "gray";
}

inline SchemeVariant scheme_variant_from_string(const std::string& s) {
  if (s == "binary") return SchemeVariant::NaturalBinary;
  if (s == "gray") return SchemeVariant::ReflectedGray;
  throw ValidationError("unknown coding scheme '" + s + "' (want binary|gray)");
}

/// How a coder is compressed: which alphabet the M-bit groups are read in.
struct CodingScheme {
  SchemeVariant variant = SchemeVariant::NaturalBinary;
  int group_bits = 3;  // M

  CodingScheme() = default;
  CodingScheme(SchemeVariant v, int m) : variant(v), group_bits(m) { validate(); }

  void validate() const {
    if (group_bits < 1 || group_bits > 16)
      throw DomainError("group_bits must be in [1, 16], got " + std::to_string(group_bits));
  }

  int num_classes() const { return 1 << group_bits; }

  std::string label() const { return to_string(variant) + ":" + std::to_string(group_bits); }

  friend bool operator==(const CodingScheme& a, const CodingScheme& b) {
    return a.variant == b.variant && a.group_bits == b.group_bits;
  }
};

/// Group-of-M decimal compression of an antenna coder.
struct AntennaMap {
  std::vector<std::uint32_t> elements;  // each in [0, 2^M)
  CodingScheme scheme;
  std::size_t original_length = 0;  // Q

  std::size_t num_elements() const { return elements.size(); }
};

// Reflected Gray code, encode direction: g = v xor (v >> 1).
inline std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

inline std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t v = g;
  for (std::uint32_t shift = 1; shift < 32; shift <<= 1) v ^= v >> shift;
  return v;
}

/// Compress a coder into an antenna map. Bits are grouped left to right in
/// runs of M, MSB-first inside a group; the last group is zero-padded on the
/// right when M does not divide Q.
inline AntennaMap zip(const AntennaCoder& coder, const CodingScheme& scheme) {
  scheme.validate();
  coder.validate();
  const std::size_t q = coder.size();
  const int m = scheme.group_bits;
  AntennaMap map;
  map.scheme = scheme;
  map.original_length = q;
  map.elements.reserve((q + static_cast<std::size_t>(m) - 1) / static_cast<std::size_t>(m));
  for (std::size_t start = 0; start < q; start += static_cast<std::size_t>(m)) {
    std::uint32_t v = 0;
    for (int i = 0; i < m; ++i) {
      const std::size_t idx = start + static_cast<std::size_t>(i);
      const std::uint32_t bit = idx < q ? coder.bits[idx] : 0u;
      v = (v << 1) | bit;
    }
    if (scheme.variant == SchemeVariant::ReflectedGray) v = gray_encode(v);
    map.elements.push_back(v);
  }
  return map;
}

/// Exact inverse of zip for the stored scheme and original length.
inline AntennaCoder unzip(const AntennaMap& map) {
  map.scheme.validate();
  const int m = map.scheme.group_bits;
  const std::uint32_t limit = 1u << m;
  const std::size_t expected =
      (map.original_length + static_cast<std::size_t>(m) - 1) / static_cast<std::size_t>(m);
  if (map.elements.size() != expected)
    throw InvariantViolation("antenna map has " + std::to_string(map.elements.size()) +
                             " elements, expected " + std::to_string(expected));
  AntennaCoder coder;
  coder.bits.reserve(map.original_length);
  for (std::size_t e = 0; e < map.elements.size(); ++e) {
    std::uint32_t v = map.elements[e];
    if (v >= limit)
      throw ElementOutOfRange("element " + std::to_string(e) + " value " + std::to_string(v) +
                              " >= 2^" + std::to_string(m));
    if (map.scheme.variant == SchemeVariant::ReflectedGray) v = gray_decode(v);
    for (int i = m - 1; i >= 0; --i) {
      if (coder.bits.size() == map.original_length) break;  // strip right padding
      coder.bits.push_back(static_cast<std::uint8_t>((v >> i) & 1u));
    }
  }
  return coder;
}

}  // namespace pixelcode
