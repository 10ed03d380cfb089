#pragma once

#include <functional>
#include <optional>
#include <string>

#include "esr/core.hpp"

namespace esr {

/// A smooth convex function bundle: value, gradient, optional Hessian-vector
/// product and the constants the methods need (L, optionally mu and phi*).
///
/// Evaluations go through std::function callbacks that must be pure; the bundle
/// itself is a cheap-to-copy immutable value and may be shared across threads.
/// Every public evaluation rejects non-finite inputs and outputs.
class Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;
  using HvpFn = std::function<Vector(const Vector&, const Vector&)>;

  Objective(std::string name, Index dim, ValueFn value, GradientFn gradient, double lipschitz);

  Objective& with_hvp(HvpFn hvp);
  Objective& with_strong_convexity(double mu);
  Objective& with_reference(double phi_star, std::optional<Vector> minimizer = std::nullopt);

  const std::string& name() const { return name_; }
  Index dim() const { return dim_; }
  double lipschitz() const { return lipschitz_; }
  const std::optional<double>& strong_mu() const { return mu_; }
  const std::optional<double>& reference_value() const { return phi_star_; }
  const std::optional<Vector>& minimizer() const { return x_star_; }
  bool has_hvp() const { return static_cast<bool>(hvp_); }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  /// Throws CapabilityError when no analytic hvp was attached.
  Vector hvp(const Vector& x, const Vector& direction) const;

 private:
  void check_point(const Vector& x, const char* where) const;

  std::string name_;
  Index dim_;
  ValueFn value_;
  GradientFn gradient_;
  HvpFn hvp_;
  double lipschitz_;
  std::optional<double> mu_;
  std::optional<double> phi_star_;
  std::optional<Vector> x_star_;
};

}  // namespace esr
