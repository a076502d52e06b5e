#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace pixelcode {

// FNV-1a over raw bytes. Good enough for reproducibility checks in manifests;
// not a cryptographic hash.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    state ^= p[i];
    state *= 0x100000001b3ULL;
  }
  return state;
}

inline std::string digest_hex(std::uint64_t d) {
  static const char* hexdig = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = hexdig[d & 0xf];
    d >>= 4;
  }
  return s;
}

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path);
  std::uint64_t state = 0xcbf29ce484222325ULL;
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    state = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), state);
  }
  return digest_hex(state);
}

}  // namespace pixelcode
