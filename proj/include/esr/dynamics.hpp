#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "esr/objective.hpp"

namespace esr::dynamics {

enum class Variant { din_avd, hr_din_avd };

/// x'' + (alpha/t) x' + beta Hess(x) x' + c(t) grad(x) = 0, with c = 1 for
/// DIN-AVD and c = gamma + r/t for the high-resolution variant.
struct OdeSpec {
  Objective objective;
  double alpha = 3.0;
  double beta = 0.0;
  Variant variant = Variant::din_avd;
  double gamma = 1.0;
  std::optional<double> r_coeff;  // defaults to alpha beta / 2
  bool allow_fd_hvp = true;       // central-difference hvp when none is attached

  double r() const { return r_coeff.value_or(0.5 * alpha * beta); }
  void validate() const;
};

enum class RestartKind { extended_speed, function_value, none };

std::string_view to_string(RestartKind kind);

struct RestartPolicy {
  RestartKind kind = RestartKind::extended_speed;
  double lambda = 0.0;
  double event_tol = 1e-9;  // bisection stops at event_tol * max(1, T)
  /// Events are ignored before this local time; default 10 * t0.
  std::optional<double> min_event_time;

  void validate() const;
};

struct IntegratorOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  /// Segment start t0 = start_fraction * tau2(alpha, beta, L).
  double start_fraction = 1e-3;
  /// Dense samples are logged every output_stride units of local time.
  double output_stride = 0.1;
  /// Converged once ||grad|| <= max(convergence_factor * max(1, ||grad(z0)||),
  /// floor_factor * L * abs_tol). The second term is the integrator's own
  /// resolution: below it restarts fire on noise and the segments collapse.
  double convergence_factor = 1e-12;
  double floor_factor = 10.0;
  int max_bisection = 60;
  std::size_t max_segments = 1'000'000;
};

/// One point of a segment in local time.
struct Sample {
  double t = 0.0;
  Vector x;
  Vector v;
  double value = 0.0;
};

enum class SegmentEnd { speed_restart, fv_restart, horizon, converged };

std::string_view to_string(SegmentEnd end);

struct TrajectorySegment {
  Vector start_state;
  double t0 = 0.0;          // local start time of the numerical flight
  double end_time = 0.0;    // local time of the terminal event (restart time T(z))
  SegmentEnd end = SegmentEnd::horizon;
  std::vector<Sample> samples;  // first sample at t0, last at end_time

  const Sample& last() const { return samples.back(); }
};

struct RestartedTrajectory {
  std::vector<TrajectorySegment> segments;
  std::vector<double> restart_times;  // global T_1 < T_2 < ...
  RestartPolicy policy;
  /// (phi(z_{k+1}) - phi*) / (phi(z_k) - phi*) per completed restart; empty
  /// without a reference value.
  std::vector<double> decrease_ratios;

  /// Global start time of segment k (0 for the first, T_k afterwards).
  double segment_start(std::size_t k) const { return k == 0 ? 0.0 : restart_times[k - 1]; }
};

/// Acceleration x''(t) for state (x, v).
Vector rhs(const OdeSpec& spec, double t, const Vector& x, const Vector& v);

/// <v, x''> + lambda (alpha/t) ||v||^2.
double speed_functional(const OdeSpec& spec, const RestartPolicy& policy, double t, const Vector& x, const Vector& v);

/// <grad(x), v> = d/dt phi(x(t)).
double fv_functional(const OdeSpec& spec, double t, const Vector& x, const Vector& v);

/// Local start time t0 = start_fraction * tau2.
double segment_start_time(const OdeSpec& spec, const IntegratorOptions& options);

/// Integrate from state z (lazy start: x(t0) = z, v(t0) = -t0 grad(z)/(alpha+1))
/// until the policy's event, the local horizon, or convergence.
/// grad_scale sets the convergence threshold (defaults to ||grad(z)||).
TrajectorySegment integrate_segment(const OdeSpec& spec, const Vector& z, const RestartPolicy& policy,
                                    double horizon, const IntegratorOptions& options = {},
                                    std::optional<double> grad_scale = std::nullopt);

/// Concatenate segments until the global horizon or convergence.
RestartedTrajectory restarted_trajectory(const OdeSpec& spec, const Vector& z0, const RestartPolicy& policy,
                                         double horizon, const IntegratorOptions& options = {});

/// (global time, phi - phi*) for every sample; requires a reference value.
std::vector<std::pair<double, double>> gap_series(const RestartedTrajectory& traj, double phi_star);

}  // namespace esr::dynamics
