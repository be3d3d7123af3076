#pragma once

#include <stdexcept>
#include <string>

namespace nehari_lab {

/// Raised for inputs outside an operation's mathematical domain and for bad
/// configuration. The CLI maps every ValidationError to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BracketError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Unresolvable instanton scale; carries the smallest admissible eps.
class ResolutionError : public ValidationError {
 public:
  ResolutionError(const std::string& what, double min_eps)
      : ValidationError(what), min_eps_(min_eps) {}
  double min_eps() const { return min_eps_; }

 private:
  double min_eps_;
};

/// Numerical accuracy or convergence failure (exit code 3).
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nehari_lab
