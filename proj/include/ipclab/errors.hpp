#pragma once

#include <stdexcept>
#include <string>

namespace ipclab {

/// Invalid user configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A model quantity left its admissible range, e.g. a jump probability outside [0,1] (exit code 3).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Root finding failed; carries the last residual.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual(residual) {}
  double residual;
};

/// A generating-function moment is infinite at the requested point.
struct DivergentMoment : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace ipclab
