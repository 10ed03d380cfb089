#include "esr/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "esr/rng.hpp"

namespace esr {

PowerIterationResult power_iteration(const std::function<Vector(const Vector&)>& apply, Index dim,
                                     double tol, int max_iterations) {
  if (dim <= 0) throw std::invalid_argument("power_iteration: dimension must be positive");
  // fixed private stream: the start vector must not depend on caller state
  Rng rng(0x5eedULL);
  Vector v = rng.normal_vector(dim).cwiseAbs() + Vector::Constant(dim, 1.0);
  v.normalize();

  PowerIterationResult out;
  Vector bv = apply(v);
  double rayleigh = v.dot(bv);
  for (int it = 1; it <= max_iterations; ++it) {
    const double norm = bv.norm();
    if (norm == 0.0) {
      out.eigenvalue = 0.0;
      out.residual = 0.0;
      out.iterations = it;
      out.converged = true;
      return out;
    }
    v = bv / norm;
    bv = apply(v);
    const double next = v.dot(bv);
    out.iterations = it;
    const bool done = std::abs(next - rayleigh) <= tol * std::abs(next);
    rayleigh = next;
    if (done) {
      out.converged = true;
      break;
    }
  }
  out.eigenvalue = rayleigh;
  out.residual = (bv - rayleigh * v).norm();
  return out;
}

}  // namespace esr
