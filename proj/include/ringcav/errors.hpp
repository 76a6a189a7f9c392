#pragma once

#include <stdexcept>
#include <string>

namespace ringcav {

/// Invalid argument outside the documented domain (empty ensembles, κ ≤ 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raw parameter combinations the effective model does not cover (β_u ≠ β_s).
class UnsupportedConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested branch is at or above its critical coupling.
class AboveThresholdError : public std::runtime_error {
 public:
  AboveThresholdError(int branch, double beta, double beta_critical)
      : std::runtime_error("branch " + std::to_string(branch) + " is not below threshold: beta = " +
                           std::to_string(beta) + ", beta_c" + std::to_string(branch) + " = " +
                           std::to_string(beta_critical)),
        branch_(branch),
        beta_critical_(beta_critical) {}

  int branch() const noexcept { return branch_; }
  double beta_critical() const noexcept { return beta_critical_; }

 private:
  int branch_;
  double beta_critical_;
};

/// Normalized observable is 0/0 (e.g. coherence degree in the vacuum).
class UndefinedObservableError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Root finding, quadrature or time stepping failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed object violates a physical invariant it must satisfy by construction.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ringcav
