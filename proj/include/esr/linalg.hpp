#pragma once

#include <functional>

#include "esr/core.hpp"

namespace esr {

struct PowerIterationResult {
  double eigenvalue = 0.0;  // Rayleigh quotient at the last iterate
  double residual = 0.0;    // ||B v - eigenvalue v|| for the unit iterate v
  int iterations = 0;
  bool converged = false;

  /// eigenvalue + residual: an upper bound on lambda_max once the iterate has
  /// locked onto the top eigenvector.
  double upper_bound() const { return eigenvalue + residual; }
};

/// Largest eigenvalue of a symmetric positive semidefinite operator given by
/// its matrix-vector product. Stops when the relative change of the Rayleigh
/// quotient drops below tol.
PowerIterationResult power_iteration(const std::function<Vector(const Vector&)>& apply, Index dim,
                                     double tol = 1e-10, int max_iterations = 100000);

}  // namespace esr
