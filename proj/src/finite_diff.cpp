#include "esr/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace esr {

double default_fd_step(const Vector& x) {
  const double scale = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  return 1e-5 * std::max(1.0, scale);
}

Vector fd_gradient(const Objective& obj, const Vector& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
  if (x.size() != obj.dim()) throw std::invalid_argument("fd_gradient: dimension mismatch");
  Vector g(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    double plus = 0.0;
    double minus = 0.0;
    try {
      plus = obj.value(probe);
      probe[i] = x[i] - step;
      minus = obj.value(probe);
    } catch (const NonFiniteError&) {
      throw NonFiniteError(fmt::format("fd_gradient: non-finite value at coordinate {}", i));
    }
    probe[i] = x[i];
    g[i] = (plus - minus) / (2.0 * step);
    if (!std::isfinite(g[i]))
      throw NonFiniteError(fmt::format("fd_gradient: non-finite difference at coordinate {}", i));
  }
  return g;
}

Vector fd_hvp(const Objective& obj, const Vector& x, const Vector& v, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("fd_hvp: step must be positive");
  const double norm = v.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("fd_hvp: zero direction");
  const double h = step / norm;
  Vector hv = (obj.gradient(x + h * v) - obj.gradient(x - h * v)) / (2.0 * h);
  if (!hv.allFinite()) throw NonFiniteError("fd_hvp: non-finite difference");
  return hv;
}

double relative_error(const Vector& a, const Vector& b, double floor) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace esr
