#pragma once

#include <stdexcept>
#include <string>

#include "spdmeans/convergence.hpp"

namespace spdmeans {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operands of incompatible dimension, or an empty operand list.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure of an underlying numerical kernel (eigensolver, quadrature).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iteration exhausts its budget. Carries the partial trace.
class NonConvergenceError : public NumericError {
 public:
  NonConvergenceError(const std::string& what, ConvergenceTrace trace)
      : NumericError(what), trace_(std::move(trace)) {}

  const ConvergenceTrace& trace() const noexcept { return trace_; }

 private:
  ConvergenceTrace trace_;
};

/// A matrix failed the positive-definiteness test.
class NotPositiveDefiniteError : public DomainError {
 public:
  NotPositiveDefiniteError(const std::string& what, double min_eigenvalue)
      : DomainError(what), min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

}  // namespace spdmeans
