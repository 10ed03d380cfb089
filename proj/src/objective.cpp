#include "esr/objective.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace esr {

Objective::Objective(std::string name, Index dim, ValueFn value, GradientFn gradient,
                     double lipschitz)
    : name_(std::move(name)),
      dim_(dim),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      lipschitz_(lipschitz) {
  if (dim_ <= 0) throw std::invalid_argument("Objective: dimension must be positive");
  if (!value_ || !gradient_) throw std::invalid_argument("Objective: value and gradient are required");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_))
    throw std::invalid_argument("Objective: Lipschitz constant must be positive and finite");
}

Objective& Objective::with_hvp(HvpFn hvp) {
  hvp_ = std::move(hvp);
  return *this;
}

Objective& Objective::with_strong_convexity(double mu) {
  if (!(mu > 0.0) || mu > lipschitz_)
    throw std::invalid_argument(fmt::format("Objective: need 0 < mu <= L (mu={}, L={})", mu, lipschitz_));
  mu_ = mu;
  return *this;
}

Objective& Objective::with_reference(double phi_star, std::optional<Vector> minimizer) {
  if (!std::isfinite(phi_star)) throw std::invalid_argument("Objective: reference value must be finite");
  if (minimizer && minimizer->size() != dim_)
    throw std::invalid_argument("Objective: minimizer dimension mismatch");
  phi_star_ = phi_star;
  x_star_ = std::move(minimizer);
  return *this;
}

void Objective::check_point(const Vector& x, const char* where) const {
  if (x.size() != dim_)
    throw std::invalid_argument(
        fmt::format("{}: {} expects dimension {}, got {}", name_, where, dim_, x.size()));
  if (!x.allFinite()) throw NonFiniteError(fmt::format("{}: non-finite point passed to {}", name_, where));
}

double Objective::value(const Vector& x) const {
  check_point(x, "value");
  const double f = value_(x);
  if (!std::isfinite(f)) throw NonFiniteError(fmt::format("{}: non-finite function value", name_));
  return f;
}

Vector Objective::gradient(const Vector& x) const {
  check_point(x, "gradient");
  Vector g = gradient_(x);
  if (!g.allFinite()) throw NonFiniteError(fmt::format("{}: non-finite gradient", name_));
  return g;
}

Vector Objective::hvp(const Vector& x, const Vector& direction) const {
  if (!hvp_) throw CapabilityError(fmt::format("{}: no Hessian-vector product available", name_));
  check_point(x, "hvp");
  check_point(direction, "hvp direction");
  Vector hv = hvp_(x, direction);
  if (!hv.allFinite()) throw NonFiniteError(fmt::format("{}: non-finite Hessian-vector product", name_));
  return hv;
}

}  // namespace esr
