#pragma once

#include <stdexcept>
#include <string>

namespace resetkit {

/// Base class for every error raised by resetkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ill-formed model or argument: improper transfer function, shape mismatch,
/// parameter out of its domain.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is singular (resolvent at an imaginary
/// pole, reset-matrix singularity in the describing function, ...).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// No controller in the requested family achieves the requested phase lead.
class InfeasibleDesign : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure did not converge (optimizer, steady-state search).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Closed-loop simulation diverged.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double time)
      : Error(what), time_(time) {}

  /// Simulation time (s) of the first divergent sample.
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Invalid project configuration; carries the offending line when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace resetkit
