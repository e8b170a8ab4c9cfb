#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curvflow {

/// Argument outside the mathematical domain of an operation (bad k, bad n, divergent integral).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input data that cannot be used: non-finite samples, non-positive tables.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (e.g. eigenvalues outside the Garding cone).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The body stopped being a strictly convex body around the origin.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, std::size_t node, double value)
      : std::runtime_error(what), node_(node), value_(value) {}

  std::size_t node() const noexcept { return node_; }
  /// Offending value: minimum eigenvalue of w, or the non-positive support value.
  double value() const noexcept { return value_; }

 private:
  std::size_t node_;
  double value_;
};

/// Malformed configuration text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, std::string field)
      : std::runtime_error(what), line_(line), field_(std::move(field)) {}

  /// 1-based line number, 0 when the problem is a missing field.
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace curvflow
