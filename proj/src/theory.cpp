#include "esr/theory.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace esr::theory {

namespace {

constexpr double kUnitP = 1e-12;  // |p - 1| below this is the p = 1 branch

void require_in_tau2(double t, const ParamTuple& p, bool open_left, const char* what) {
  const double t2 = tau2(p);
  if (!(open_left ? t > 0.0 : t >= 0.0) || !(t < t2))
    throw std::domain_error(fmt::format("{}: t = {} outside {}0, tau2 = {})", what, t, open_left ? "(" : "[", t2));
}

double root_of_shifted_quadratic(double shift, double radicand_tail) {
  // -shift + sqrt(shift^2 + tail)
  return -shift + std::sqrt(shift * shift + radicand_tail);
}

}  // namespace

void ParamTuple::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be nonnegative");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) throw std::invalid_argument("L must be positive");
  if (mu && (!(*mu > 0.0) || *mu > lipschitz)) throw std::invalid_argument("mu must lie in (0, L]");
}

std::string_view to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::ok: return "ok";
    case BoundStatus::no_guaranteed_lower_bound: return "no-guaranteed-lower-bound";
    case BoundStatus::no_bound_available: return "no-bound-available";
    case BoundStatus::outside_validity_region: return "outside-validity-region";
    case BoundStatus::missing_mu: return "missing-mu";
  }
  return "unknown";
}

double h_func(double t, const ParamTuple& p) {
  if (t < 0.0) throw std::domain_error("h_func: t must be nonnegative");
  const double a = p.alpha;
  const double lip = p.lipschitz;
  return 1.0 - p.beta * lip * t / (a + 2.0) - lip * t * t / (2.0 * (a + 3.0));
}

double tau1(const ParamTuple& p) {
  const double shift = (p.alpha + 3.0) / (p.alpha + 2.0) * p.beta;
  return root_of_shifted_quadratic(shift, 2.0 * (p.alpha + 3.0) / p.lipschitz);
}

double tau2(const ParamTuple& p) {
  const double shift = (p.alpha + 3.0) / (p.alpha + 2.0) * p.beta;
  return root_of_shifted_quadratic(shift, (p.alpha + 3.0) / p.lipschitz);
}

double g_func(double t, const ParamTuple& p) {
  if (t < 0.0 || !(t < tau1(p))) throw std::domain_error(fmt::format("g_func: t = {} outside [0, tau1)", t));
  const double a = p.alpha;
  const double l = p.lambda;
  const double lip = p.lipschitz;
  const double h = h_func(t, p);
  return (1.0 + a * l) * h * h - a * (1.0 - l) * (1.0 - h) * (1.0 - h) - p.beta * lip * t - 0.5 * lip * t * t -
         std::abs(1.0 + a * (2.0 * l - 1.0)) * h * (1.0 - h);
}

Bound tau3_bisection(const ParamTuple& p) {
  double lo = 0.0;
  double hi = tau2(p);
  if (g_func(hi, p) > 0.0) return {0.0, BoundStatus::no_guaranteed_lower_bound};
  for (int it = 0; it < 400 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g_func(mid, p) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), BoundStatus::ok};
}

Tau3Case tau3_closed_form_case(const ParamTuple& p) {
  const double a = p.alpha;
  if (a >= 1.0 + 2.0 * a * p.lambda) return Tau3Case::case_one;
  if (p.beta == 0.0) return Tau3Case::case_two_beta_zero;
  return Tau3Case::none;
}

std::optional<double> tau3_closed_form(const ParamTuple& p) {
  const double a = p.alpha;
  const double l = p.lambda;
  const double b = p.beta;
  const double lip = p.lipschitz;
  switch (tau3_closed_form_case(p)) {
    case Tau3Case::case_one: {
      // G(t) = 1 + a l - b L t (2a+3)/(a+2) - L t^2 (a+2)/(a+3)
      const double shift = (2.0 * a + 3.0) * (a + 3.0) / (2.0 * (a + 2.0) * (a + 2.0)) * b;
      return root_of_shifted_quadratic(shift, (1.0 + a * l) * (a + 3.0) / (lip * (a + 2.0)));
    }
    case Tau3Case::case_two_beta_zero: {
      const double two_al = 2.0 * a * l;
      const double inner = two_al + 3.0 - std::sqrt(2.0 * a * a * l + 6.0 * a * l + 2.0 * a + 7.0);
      return std::sqrt((a + 3.0) / ((two_al - a + 1.0) * lip) * inner);
    }
    case Tau3Case::none: break;
  }
  return std::nullopt;
}

Bound tau3(const ParamTuple& p) {
  const Bound root = tau3_bisection(p);
  const auto closed = tau3_closed_form(p);
  if (!closed) return root;
  if (!root.ok() || std::abs(*closed - root.value) > 1e-9 * *closed)
    throw std::logic_error(fmt::format("tau3: closed form {} disagrees with bisection root {}", *closed, root.value));
  return {*closed, BoundStatus::ok};
}

double psi(double t, const ParamTuple& p) {
  require_in_tau2(t, p, false, "psi");
  const double r = 2.0 - 1.0 / h_func(t, p);
  return r * r;
}

double m_tau(double tau, const ParamTuple& p) {
  require_in_tau2(tau, p, true, "m_tau");
  if (!p.mu) throw std::invalid_argument("m_tau: mu is required");
  const double h = h_func(tau, p);
  const double a1 = p.alpha + 1.0;
  const double denom = 2.0 * *p.mu * std::pow(tau, p.p() + 2.0) * (2.0 * h - 1.0) * (2.0 * h - 1.0);
  return a1 * a1 * h * h / denom;
}

Bound t_upper(const ParamTuple& p, double tau) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  require_in_tau2(tau, p, true, "t_upper");
  if (!p.mu) return {0.0, BoundStatus::missing_mu};
  const double pp = p.p();
  if (pp > 1.0 + kUnitP) return {kInf, BoundStatus::no_bound_available, kInf};
  const double m = m_tau(tau, p);
  const double bm = p.beta * *p.mu;
  double log_bound = 0.0;
  if (pp == 0.0) {
    log_bound = std::log(tau) + m / p.alpha;
    if (bm > 0.0) log_bound = std::min(log_bound, std::log(tau + m / bm));
  } else if (bm == 0.0) {
    return {kInf, BoundStatus::no_bound_available, kInf};
  } else if (std::abs(pp - 1.0) <= kUnitP) {
    log_bound = std::log(tau) + m / bm;
  } else {
    // T^{1-p} <= (1-p) M / (beta mu) + tau^{1-p}
    const double e = 1.0 - pp;
    log_bound = std::log((e * m) / bm + std::pow(tau, e)) / e;
  }
  return {std::exp(log_bound), BoundStatus::ok, log_bound};
}

GridBound t_upper_grid_min(const ParamTuple& p, int points) {
  if (points < 2) throw std::invalid_argument("t_upper_grid_min: need at least two grid points");
  const double t2 = tau2(p);
  const double lo = std::log(0.01 * t2);
  const double hi = std::log(0.99 * t2);
  GridBound best{t_upper(p, std::exp(lo)), std::exp(lo)};
  if (!best.bound.ok()) return best;
  for (int i = 1; i < points; ++i) {
    const double tau = std::exp(lo + (hi - lo) * i / (points - 1));
    const Bound b = t_upper(p, tau);
    if (b.ok() && b.log_value < best.bound.log_value) best = {b, tau};
  }
  return best;
}

Bound q_factor(const ParamTuple& p) {
  if (!p.mu) return {0.0, BoundStatus::missing_mu};
  if (p.p() > 1.0 + kUnitP) return {0.0, BoundStatus::outside_validity_region};
  const Bound t3 = tau3(p);
  if (!t3.ok()) return {0.0, t3.status};
  const double t = t3.value;
  const double mu = *p.mu;
  const double a1 = p.alpha + 1.0;
  const double bracket = 0.5 * p.alpha * (1.0 - p.lambda) + p.beta * mu * t / 3.0;
  return {1.0 - bracket * 2.0 * mu * t * t * psi(t, p) / (a1 * a1), BoundStatus::ok};
}

TheoryReport make_report(const ParamTuple& p, std::optional<double> tau) {
  p.validate();
  TheoryReport r;
  r.params = p;
  r.tau1 = tau1(p);
  r.tau2 = tau2(p);
  r.tau3 = tau3(p);
  r.q = q_factor(p);
  r.p = p.p();
  r.tau = tau.value_or(r.tau3.ok() ? r.tau3.value : 0.5 * r.tau2);
  r.t_upper_at_tau = t_upper(p, r.tau);
  r.t_upper_best = t_upper_grid_min(p);
  return r;
}

}  // namespace esr::theory
