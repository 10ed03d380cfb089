#pragma once

#include <cstddef>
#include <functional>

#include "esr/core.hpp"

namespace esr {

/// Dormand-Prince 5(4) with PI step-size control and the standard fourth-order
/// continuous extension. One object integrates one trajectory forward in time.
class Dopri5 {
 public:
  using Rhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

  struct Options {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    double initial_step = 0.0;  // 0: automatic
    double max_step = 0.0;      // 0: unbounded
    double min_step_factor = 1e-14;  // relative to max(1, |t|)
    std::size_t max_steps = 10'000'000;
  };

  Dopri5(Rhs rhs, double t0, Vector y0, Options options);

  /// Take one accepted step, never past t_limit. Throws IntegratorError on
  /// step-size underflow or when the step budget is exhausted.
  void step(double t_limit);

  double t() const { return t_; }
  const Vector& y() const { return y_; }
  const Vector& dydt() const { return k_[0]; }
  double t_prev() const { return t_prev_; }
  const Vector& y_prev() const { return y_prev_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }
  std::size_t rhs_evaluations() const { return evaluations_; }

  /// Interpolated state on [t_prev, t] of the last accepted step.
  Vector dense(double t) const;

  /// State at t in [t_prev, t] from a fresh, unchecked step of size t - t_prev
  /// starting at the last accepted point. Its error is bounded by that of the
  /// accepted step, unlike the fourth-order interpolant; used for event location.
  Vector restep(double t);

 private:
  double initial_step() const;
  double error_norm(const Vector& err, const Vector& y_new) const;
  void eval(double t, const Vector& y, Vector& out);

  Rhs rhs_;
  Options opt_;
  double t_;
  Vector y_;
  double t_prev_;
  Vector y_prev_;
  double h_ = 0.0;
  double err_prev_ = 1e-4;
  // k_[0] holds f(t, y) (FSAL); after a step k_[0..6] of that step are kept in
  // stage_ for dense output
  Vector k_[7];
  Vector stage_[7];
  double h_last_ = 0.0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::size_t evaluations_ = 0;
};

}  // namespace esr
