#pragma once

#include <stdexcept>
#include <string>

namespace pixelcode {

/// Linear solve for the pixel-port currents failed or its residual is out of
/// tolerance; usually a sign of a degenerate network description.
class SingularNetwork : public std::runtime_error {
public:
  explicit SingularNetwork(const std::string& what) : std::runtime_error(what) {}
};

/// The requested coder radiates numerically nothing. Optimizers map such
/// coders to an objective of -inf instead of letting this escape.
class ZeroPattern : public std::runtime_error {
public:
  explicit ZeroPattern(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed file content; message carries line/field context.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Structurally valid file whose data breaks a model invariant
/// (shape mismatch, asymmetric impedance matrix, ...).
class InvariantViolation : public std::runtime_error {
public:
  explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

/// An antenna-map element does not fit the declared group width.
class ElementOutOfRange : public std::runtime_error {
public:
  explicit ElementOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

/// Guard rail: exhaustive enumeration over 2^arity refused.
class ArityTooLarge : public std::runtime_error {
public:
  explicit ArityTooLarge(const std::string& what) : std::runtime_error(what) {}
};

/// Guard rail: a SEBO block would enumerate more than 2^24 assignments.
class BlockTooLarge : public std::runtime_error {
public:
  explicit BlockTooLarge(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside a documented domain (probabilities, exponents, ...).
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Training loss became non-finite.
class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad user-facing configuration; commands fail fast with this before work starts.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pixelcode
