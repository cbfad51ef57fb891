#pragma once

#include <stdexcept>
#include <string>

namespace lzcat {

/// Invalid argument or violated precondition (negative alpha, bad index, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested Fock cutoff cannot hold the state within the tail tolerance.
class TruncationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Integration or special-function failure: step underflow, norm drift,
/// series non-convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario configuration could not be parsed or resolved.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : std::runtime_error(format(what, line, field)), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  static std::string format(const std::string& what, int line, const std::string& field) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "'" + field + "': ";
    return out + what;
  }

  int line_;
  std::string field_;
};

}  // namespace lzcat
