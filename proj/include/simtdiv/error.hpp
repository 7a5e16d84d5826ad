#pragma once

#include <stdexcept>
#include <string>

namespace simtdiv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed assembly text. `line()` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A Program that violates a structural invariant (bad target, register out
/// of range, misplaced EXIT, ...).
class ProgramError : public Error {
 public:
  using Error::Error;
};

/// The divergence model reached a state it cannot represent, e.g. a pop on an
/// empty synchronization stack or EXIT without full re-convergence.
class ModelError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Invalid profile, launch configuration or harness argument.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace simtdiv
