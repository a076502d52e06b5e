#pragma once

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "pixelcode/errors.hpp"

namespace pixelcode {

/// Shortest-exact double formatting: 17 significant digits round-trip any
/// finite double through strtod bit-exactly.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& tok, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError(where + ": bad number '" + tok + "'");
  return v;
}

inline long long parse_int(const std::string& tok, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
    throw ParseError(where + ": bad integer '" + tok + "'");
  return v;
}

inline unsigned long long parse_uint(const std::string& tok, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0' || errno == ERANGE || tok.front() == '-')
    throw ParseError(where + ": bad unsigned integer '" + tok + "'");
  return v;
}

/// Line/token cursor over a structured text file. Keeps track of the current
/// line number so errors point at the offending spot.
class LineReader {
public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  /// Next non-empty line split on whitespace. Throws ParseError at EOF.
  std::vector<std::string> next() {
    std::vector<std::string> toks;
    std::string line;
    while (std::getline(in_, line)) {
      ++lineno_;
      std::istringstream ss(line);
      std::string t;
      while (ss >> t) toks.push_back(t);
      if (!toks.empty()) return toks;
    }
    throw ParseError(context() + ": unexpected end of file");
  }

  /// Like next(), but requires the first token to equal `key`.
  std::vector<std::string> expect(const std::string& key, std::size_t min_args = 0) {
    auto toks = next();
    if (toks[0] != key)
      throw ParseError(context() + ": expected '" + key + "', got '" + toks[0] + "'");
    if (toks.size() < min_args + 1)
      throw ParseError(context() + ": '" + key + "' needs at least " +
                       std::to_string(min_args) + " field(s)");
    return toks;
  }

  double expect_double(const std::string& key) {
    return parse_double(expect(key, 1)[1], context() + " " + key);
  }

  long long expect_int(const std::string& key) {
    return parse_int(expect(key, 1)[1], context() + " " + key);
  }

  unsigned long long expect_uint(const std::string& key) {
    return parse_uint(expect(key, 1)[1], context() + " " + key);
  }

  std::string context() const { return name_ + ":" + std::to_string(lineno_); }
  int line() const { return lineno_; }

private:
  std::istream& in_;
  std::string name_;
  int lineno_ = 0;
};

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open: " + path);
  return in;
}

}  // namespace pixelcode
