#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace orf {

/// Vector or matrix sizes that do not fit the operation.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid parameters: bad kind, non-positive sigma, empty grids.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that violates an operation's precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain where a closed-form expression is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical precondition failed at run time, e.g. a selected bandwidth of 0.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed dataset file. `line()` is 1-based; 0 means the whole file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace orf
