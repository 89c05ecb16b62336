#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph or table file. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input violates a graph invariant (duplicate edge, nonpositive weight, ...).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Consecutive route nodes are not joined by an edge.
class InvalidRouteError : public Error {
 public:
  using Error::Error;
};

/// Requested path does not exist in the preprocessed tables.
class NoPathError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range algorithm parameter (epsilon, beta, alpha, k, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The exact oracle refuses instances above its size guard.
class SizeGuardError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace kor
