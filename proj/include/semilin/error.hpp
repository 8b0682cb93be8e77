#pragma once

#include <stdexcept>
#include <string>

namespace semilin {

/// Base class of every error raised by the library. The harness maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExprError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Domain, Unbound };

  ExprError(Kind kind, std::string message, std::size_t position = 0,
            std::string identifier = {})
      : Error(std::move(message)),
        kind_(kind),
        position_(position),
        identifier_(std::move(identifier)) {}

  Kind kind() const noexcept { return kind_; }
  /// Character offset into the source text (syntax errors only).
  std::size_t position() const noexcept { return position_; }
  const std::string& identifier() const noexcept { return identifier_; }

 private:
  Kind kind_;
  std::size_t position_;
  std::string identifier_;
};

/// Empty domain, malformed domain spec, mismatched domains.
class DomainError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  enum class Kind { MaxIterations, NotPositiveDefinite, Breakdown };

  SolverError(Kind kind, std::string message, double residual = 0.0)
      : Error(std::move(message)), kind_(kind), residual_(residual) {}

  Kind kind() const noexcept { return kind_; }
  double residual() const noexcept { return residual_; }

 private:
  Kind kind_;
  double residual_;
};

/// Gradient coupling L is not below the admissible threshold.
class ThresholdError : public Error {
 public:
  using Error::Error;
};

/// A measured contraction ratio exceeded the theoretical bound.
class ContractionError : public Error {
 public:
  using Error::Error;
};

/// A nonlinear iteration did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A structural condition was falsified or an input invariant is violated.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string condition, std::string message)
      : Error(std::move(message)), condition_(std::move(condition)) {}
  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace semilin
