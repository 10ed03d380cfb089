#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace esr::theory {

/// (alpha, beta, lambda, mu, L) for the restart bounds.
struct ParamTuple {
  double alpha = 3.0;
  double beta = 0.0;
  double lambda = 0.0;
  std::optional<double> mu;
  double lipschitz = 1.0;

  /// p = 2 alpha lambda
  double p() const { return 2.0 * alpha * lambda; }
  /// lambda <= 1/(2 alpha), the region where the upper bound and Q are proven.
  bool in_validity_region() const { return p() <= 1.0; }
  /// Throws std::invalid_argument on alpha <= 0, beta < 0, lambda outside
  /// [0,1], L <= 0 or mu outside (0, L].
  void validate() const;
};

enum class BoundStatus {
  ok,
  no_guaranteed_lower_bound,  // no sign change of G on (0, tau2)
  no_bound_available,         // p > 1, or beta == 0 with p > 0
  outside_validity_region,    // lambda > 1/(2 alpha) for Q
  missing_mu,
};

std::string_view to_string(BoundStatus status);

/// A value or the marker explaining why there is none.
struct Bound {
  double value = 0.0;
  BoundStatus status = BoundStatus::ok;
  /// Set by t_upper only: restart-time bounds routinely exceed the double
  /// range (exp(M/(beta mu)) with M in the thousands), so compare in logs.
  double log_value = 0.0;

  bool ok() const { return status == BoundStatus::ok; }
};

double h_func(double t, const ParamTuple& p);
double tau1(const ParamTuple& p);
double tau2(const ParamTuple& p);

/// G(t) = (1+a l)H^2 - a(1-l)(1-H)^2 - bLt - Lt^2/2 - |1 + a(2l-1)| H (1-H).
/// Throws std::domain_error for t >= tau1 (or t < 0).
double g_func(double t, const ParamTuple& p);

/// Root of G on (0, tau2) by bisection (relative tolerance 1e-12).
Bound tau3_bisection(const ParamTuple& p);

enum class Tau3Case { case_one, case_two_beta_zero, none };

/// Which closed form applies: alpha >= 1 + 2 alpha lambda, or beta == 0 otherwise.
Tau3Case tau3_closed_form_case(const ParamTuple& p);
std::optional<double> tau3_closed_form(const ParamTuple& p);

/// Closed form when available (cross-checked against bisection to 1e-9
/// relative, std::logic_error on disagreement), bisection otherwise.
Bound tau3(const ParamTuple& p);

/// (2 - 1/H(t))^2 on [0, tau2); std::domain_error outside.
double psi(double t, const ParamTuple& p);

/// (alpha+1)^2 H^2 / (2 mu t^{p+2} (2H-1)^2) on (0, tau2); needs mu.
double m_tau(double tau, const ParamTuple& p);

/// Upper bound on the restart time for a given tau in (0, tau2).
Bound t_upper(const ParamTuple& p, double tau);

/// Minimum of t_upper over a 200-point log grid on (0.01 tau2, 0.99 tau2).
struct GridBound {
  Bound bound;
  double tau = 0.0;
};
GridBound t_upper_grid_min(const ParamTuple& p, int points = 200);

/// 1 - [a(1-l)/2 + b mu T/3] * 2 mu T^2 Psi(T) / (a+1)^2 with T = tau3.
Bound q_factor(const ParamTuple& p);

struct TheoryReport {
  ParamTuple params;
  double tau1 = 0.0;
  double tau2 = 0.0;
  Bound tau3;
  Bound q;
  double p = 0.0;
  double tau = 0.0;      // tau used for t_upper_at_tau
  Bound t_upper_at_tau;
  GridBound t_upper_best;
};

/// Full report; tau defaults to tau3 (or tau2/2 when tau3 is unavailable).
TheoryReport make_report(const ParamTuple& p, std::optional<double> tau = std::nullopt);

}  // namespace esr::theory
