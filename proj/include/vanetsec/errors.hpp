#pragma once

#include <stdexcept>
#include <string>

namespace vanetsec {

// Invalid configuration, config file, or CLI override.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Base for numerical failures inside a solver.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Objective evaluated to NaN/Inf (channel pathology).
struct NonFiniteObjective : SolverError {
  using SolverError::SolverError;
};

// The expansion point violates its own convex surrogate; construction bug.
struct InfeasibleExpansion : SolverError {
  using SolverError::SolverError;
};

// Newton line search inside the barrier solver could not make progress.
struct BarrierDivergence : SolverError {
  using SolverError::SolverError;
};

// Newton system factorization failed even with ridge regularization.
struct NumericalIllConditioning : SolverError {
  using SolverError::SolverError;
};

}  // namespace vanetsec
