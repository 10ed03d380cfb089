#include "esr/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "esr/finite_diff.hpp"
#include "esr/ode.hpp"
#include "esr/theory.hpp"

namespace esr::dynamics {

void OdeSpec::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("OdeSpec: alpha must be positive");
  if (!(beta >= 0.0)) throw std::invalid_argument("OdeSpec: beta must be nonnegative");
  if (variant == Variant::hr_din_avd && !(gamma > 0.0))
    throw std::invalid_argument("OdeSpec: the high-resolution variant needs gamma > 0");
}

void RestartPolicy::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("RestartPolicy: lambda must lie in [0, 1]");
  if (!(event_tol > 0.0)) throw std::invalid_argument("RestartPolicy: event_tol must be positive");
  if (min_event_time && !(*min_event_time > 0.0))
    throw std::invalid_argument("RestartPolicy: min_event_time must be positive");
}

std::string_view to_string(RestartKind kind) {
  switch (kind) {
    case RestartKind::extended_speed: return "extended-speed";
    case RestartKind::function_value: return "function-value";
    case RestartKind::none: return "none";
  }
  return "unknown";
}

std::string_view to_string(SegmentEnd end) {
  switch (end) {
    case SegmentEnd::speed_restart: return "speed-restart";
    case SegmentEnd::fv_restart: return "fv-restart";
    case SegmentEnd::horizon: return "horizon";
    case SegmentEnd::converged: return "converged";
  }
  return "unknown";
}

namespace {

Vector hessian_times(const OdeSpec& spec, const Vector& x, const Vector& v) {
  const Objective& obj = spec.objective;
  if (obj.has_hvp()) return obj.hvp(x, v);
  if (!spec.allow_fd_hvp)
    throw CapabilityError(fmt::format("{}: Hessian damping needs an hvp and the finite-difference fallback is off",
                                      obj.name()));
  return fd_hvp(obj, x, v, default_fd_step(x));
}

double event_value(const OdeSpec& spec, const RestartPolicy& policy, double t, const Vector& x, const Vector& v) {
  switch (policy.kind) {
    case RestartKind::extended_speed: return speed_functional(spec, policy, t, x, v);
    case RestartKind::function_value: return -fv_functional(spec, t, x, v);
    case RestartKind::none: break;
  }
  return 1.0;
}

struct StateView {
  Vector x;
  Vector v;
};

StateView split(const Vector& y) {
  const Index n = y.size() / 2;
  return {y.head(n), y.tail(n)};
}

}  // namespace

Vector rhs(const OdeSpec& spec, double t, const Vector& x, const Vector& v) {
  if (!(t > 0.0)) throw std::invalid_argument("dynamics::rhs: t must be positive");
  const double grad_coef = spec.variant == Variant::din_avd ? 1.0 : spec.gamma + spec.r() / t;
  Vector a = -(spec.alpha / t) * v - grad_coef * spec.objective.gradient(x);
  if (spec.beta != 0.0 && v.squaredNorm() > 0.0) a -= spec.beta * hessian_times(spec, x, v);
  return a;
}

double speed_functional(const OdeSpec& spec, const RestartPolicy& policy, double t, const Vector& x, const Vector& v) {
  return v.dot(rhs(spec, t, x, v)) + policy.lambda * (spec.alpha / t) * v.squaredNorm();
}

double fv_functional(const OdeSpec& spec, double t, const Vector& x, const Vector& v) {
  if (!(t > 0.0)) throw std::invalid_argument("fv_functional: t must be positive");
  return spec.objective.gradient(x).dot(v);
}

double segment_start_time(const OdeSpec& spec, const IntegratorOptions& options) {
  theory::ParamTuple p;
  p.alpha = spec.alpha;
  p.beta = spec.beta;
  p.lipschitz = spec.objective.lipschitz();
  return options.start_fraction * theory::tau2(p);
}

TrajectorySegment integrate_segment(const OdeSpec& spec, const Vector& z, const RestartPolicy& policy,
                                    double horizon, const IntegratorOptions& options,
                                    std::optional<double> grad_scale) {
  spec.validate();
  policy.validate();
  const Objective& obj = spec.objective;
  if (z.size() != obj.dim()) throw std::invalid_argument("integrate_segment: dimension mismatch");
  if (!z.allFinite()) throw std::invalid_argument("integrate_segment: non-finite start state");
  const double t0 = segment_start_time(spec, options);
  if (!(horizon > t0)) throw std::invalid_argument("integrate_segment: horizon must exceed the start time");

  const Index n = z.size();
  const Vector gz = obj.gradient(z);
  const double threshold = std::max(options.convergence_factor * std::max(1.0, grad_scale.value_or(gz.norm())),
                                    options.floor_factor * obj.lipschitz() * options.abs_tol);

  TrajectorySegment seg;
  seg.start_state = z;
  seg.t0 = t0;
  const Vector v0 = -t0 / (spec.alpha + 1.0) * gz;
  seg.samples.push_back({t0, z, v0, obj.value(z)});
  if (gz.norm() <= threshold) {
    seg.end = SegmentEnd::converged;
    seg.end_time = t0;
    return seg;
  }

  Vector y0(2 * n);
  y0 << z, v0;
  Dopri5::Options ode_opt;
  ode_opt.abs_tol = options.abs_tol;
  ode_opt.rel_tol = options.rel_tol;
  if (options.output_stride > 0.0) ode_opt.max_step = options.output_stride;
  Dopri5 solver(
      [&spec, n](double t, const Vector& y, Vector& dy) {
        dy.head(n) = y.tail(n);
        dy.tail(n) = rhs(spec, t, y.head(n), y.tail(n));
      },
      t0, y0, ode_opt);

  const bool detect = policy.kind != RestartKind::none;
  const double min_event = policy.min_event_time.value_or(10.0 * t0);
  const double stride = options.output_stride;
  double next_out = stride > 0.0 ? stride * (std::floor(t0 / stride) + 1.0) : horizon;

  auto push_sample = [&](double t, const Vector& y) {
    auto [x, v] = split(y);
    const double f = obj.value(x);
    seg.samples.push_back({t, std::move(x), std::move(v), f});
  };
  auto event_at = [&](double t, const Vector& y) {
    auto [x, v] = split(y);
    return event_value(spec, policy, t, x, v);
  };
  auto emit_until = [&](double t_end) {
    while (next_out < t_end) {
      push_sample(next_out, solver.dense(next_out));
      next_out += stride;
    }
  };

  bool have_prev = false;
  double prev_t = 0.0;

  try {
    for (;;) {
      solver.step(horizon);
      const double t = solver.t();

      std::optional<std::pair<double, double>> bracket;  // (positive side, nonpositive side)
      if (detect && t >= min_event) {
        if (!have_prev) {
          const double e_min = event_at(min_event, solver.restep(min_event));
          if (e_min <= 0.0) {
            bracket = std::make_pair(min_event, min_event);
          } else {
            have_prev = true;
            prev_t = min_event;
          }
        }
        if (!bracket) {
          const double e = event_at(t, solver.y());
          if (e <= 0.0) bracket = std::make_pair(prev_t, t);
          have_prev = true;
          prev_t = t;
        }
      }

      if (bracket) {
        double lo = bracket->first;
        double hi = bracket->second;
        for (int it = 0; it < options.max_bisection && hi - lo > policy.event_tol * std::max(1.0, hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          if (event_at(mid, solver.restep(mid)) > 0.0)
            lo = mid;
          else
            hi = mid;
        }
        emit_until(hi);
        push_sample(hi, solver.restep(hi));
        seg.end_time = hi;
        seg.end = policy.kind == RestartKind::extended_speed ? SegmentEnd::speed_restart : SegmentEnd::fv_restart;
        return seg;
      }

      emit_until(t);
      const bool at_horizon = t >= horizon;
      const bool converged = obj.gradient(solver.y().head(n)).norm() <= threshold;
      if (at_horizon || converged) {
        push_sample(t, solver.y());
        seg.end_time = t;
        seg.end = converged ? SegmentEnd::converged : SegmentEnd::horizon;
        return seg;
      }
    }
  } catch (const IntegratorError& e) {
    throw IntegratorError(fmt::format("{} (segment started from ||grad|| = {:.3e})", e.what(), gz.norm()), e.time(),
                          e.state());
  }
}

RestartedTrajectory restarted_trajectory(const OdeSpec& spec, const Vector& z0, const RestartPolicy& policy,
                                         double horizon, const IntegratorOptions& options) {
  spec.validate();
  policy.validate();
  if (!z0.allFinite()) throw std::invalid_argument("restarted_trajectory: non-finite start state");
  const Objective& obj = spec.objective;
  const auto phi_star = obj.reference_value();
  const double t0 = segment_start_time(spec, options);
  const double grad_scale = obj.gradient(z0).norm();

  RestartedTrajectory traj;
  traj.policy = policy;
  Vector z = z0;
  double global = 0.0;
  while (horizon - global > t0) {
    if (traj.segments.size() >= options.max_segments)
      throw std::runtime_error(fmt::format("restarted_trajectory: more than {} segments", options.max_segments));
    TrajectorySegment seg;
    try {
      seg = integrate_segment(spec, z, policy, horizon - global, options, grad_scale);
    } catch (const IntegratorError& e) {
      throw IntegratorError(fmt::format("segment {}: {}", traj.segments.size(), e.what()), global + e.time(),
                            e.state());
    }
    const bool restarted = seg.end == SegmentEnd::speed_restart || seg.end == SegmentEnd::fv_restart;
    Vector next = seg.last().x;
    const double f_next = seg.last().value;
    const double f_start = seg.samples.front().value;
    traj.segments.push_back(std::move(seg));
    if (!restarted) break;
    global += traj.segments.back().end_time;
    traj.restart_times.push_back(global);
    if (phi_star && f_start - *phi_star > 0.0) traj.decrease_ratios.push_back((f_next - *phi_star) / (f_start - *phi_star));
    z = std::move(next);
  }
  return traj;
}

std::vector<std::pair<double, double>> gap_series(const RestartedTrajectory& traj, double phi_star) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < traj.segments.size(); ++k) {
    const double start = traj.segment_start(k);
    for (const Sample& s : traj.segments[k].samples) out.emplace_back(start + s.t, s.value - phi_star);
  }
  return out;
}

}  // namespace esr::dynamics
