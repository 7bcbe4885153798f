#pragma once

#include <stdexcept>
#include <string>

namespace cylscat {

/// Numerical failure inside a solver (singular systems, non-convergence).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The boundary integral system is numerically singular, typically because a
/// wavenumber sits on an interior Dirichlet/Neumann eigenvalue.
class IrregularFrequencyError : public SolverError {
 public:
  IrregularFrequencyError(const std::string& what, double condition)
      : SolverError(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// Invalid user input: configuration, data files, parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cylscat
