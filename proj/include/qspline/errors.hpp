#pragma once

#include <stdexcept>
#include <string>

namespace qspline {

// Base for everything thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, bad qubit indices, invalid flags.
struct input_error : error {
  using error::error;
};

// Request exceeds the simulator's hard resource limits.
struct resource_error : error {
  using error::error;
};

// Postselection on a branch whose probability is numerically zero.
struct degenerate_postselection_error : error {
  using error::error;
};

// Numerically singular pivot or failed linear solve.
struct solver_error : error {
  using error::error;
};

// Right-hand side has weight on eigenvalues below the configured floor.
struct ill_conditioned_error : error {
  using error::error;
};

// A requested analytic bound is vacuous for the given parameters.
struct bound_inapplicable_error : error {
  using error::error;
};

// Evaluation point outside the interpolation domain.
struct domain_error : error {
  using error::error;
};

}  // namespace qspline
