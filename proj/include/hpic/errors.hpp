#pragma once

#include <stdexcept>
#include <string>

namespace hpic {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CG ran out of iterations before meeting the residual target.
struct NonConvergence : SolverError {
  using SolverError::SolverError;
};

// Right-hand side of a singular (periodic) system is not in range(M);
// usually a deposition bug or a wrong neutralizing background.
struct IncompatibleRhs : SolverError {
  using SolverError::SolverError;
};

struct ParticleOutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientPeaks : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hpic
