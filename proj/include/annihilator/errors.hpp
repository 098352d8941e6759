#pragma once

#include <stdexcept>
#include <string>

namespace ann {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature did not reach its tolerance within the panel budget.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate_abs, double error_bound)
      : std::runtime_error(what), estimate_abs_(estimate_abs), error_bound_(error_bound) {}

  double estimate_abs() const { return estimate_abs_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_abs_;
  double error_bound_;
};

/// An iterative solver exhausted its budget. `best_residual` is the smallest
/// residual seen.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}

  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

class NearDependenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CertificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two routes to the same quantity disagreed beyond their combined tolerance.
class ConsistencyError : public std::logic_error {
 public:
  ConsistencyError(const std::string& what, double gap) : std::logic_error(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

}  // namespace ann
