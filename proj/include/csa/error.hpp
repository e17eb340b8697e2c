#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace csa {

/// Vector or matrix sizes that do not agree with the object they are used with.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a bound, schedule, or operator is violated.
/// The message names the violated condition.
class PreconditionError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Norm pair without known tight equivalence constants, or a norm that
/// cannot play the requested role (e.g. a non-smooth squared norm).
class UnsupportedNormError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Behaviour policy does not cover the target policy.
class CoverageError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Iterative solver stopped before reaching the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string &what, double best_value, double residual)
      : std::runtime_error(what), best_value_(best_value), residual_(residual) {}

  double best_value() const noexcept { return best_value_; }
  double residual() const noexcept { return residual_; }

private:
  double best_value_;
  double residual_;
};

/// Non-finite value encountered in an iterate.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string &what, std::int64_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}

  std::int64_t iteration() const noexcept { return iteration_; }

private:
  std::int64_t iteration_;
};

/// Malformed configuration or MDP file.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace csa
