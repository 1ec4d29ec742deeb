#pragma once

#include <stdexcept>
#include <string>

namespace tfaccel {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
struct ConvergenceFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix handed to a linear-algebra kernel violates its preconditions
/// (e.g. a density matrix with a clearly negative eigenvalue).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A quantum state that cannot be normalized.
struct InvalidState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tfaccel
