#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace webspline {

// Invalid argument to a numerical routine (bad index, degenerate cell, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The grid is too coarse to resolve the domain (no inner B-splines).
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or blow-up during evaluation.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed problem setup (empty pressure space, bad parameters, ...).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative or direct solver failed. Carries the residual / update history.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace webspline
