#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esr/objective.hpp"

namespace esr::discrete {

enum class RestartRule { extended_speed, function_value, none };

std::string_view to_string(RestartRule rule);

struct AlgoConfig {
  double alpha = 3.0;
  std::optional<double> beta;  // default 1/sqrt(L)
  std::optional<double> step;  // h, default 1/sqrt(L)
  double lambda = 0.0;
  std::size_t iterations = 1000;
  RestartRule restart = RestartRule::extended_speed;
  bool warm_start = false;
  /// Restarts are suppressed while the momentum counter j is below this.
  /// 1 disables the guard; the speed test at lambda = 0 usually wants ~10.
  int min_restart_interval = 1;
  /// Cap on the function-value phase of a warm start (default: all of N).
  std::optional<std::size_t> warm_phase_limit;
  /// Stop early once phi - phi* drops below this (needs a reference value).
  double gap_tolerance = 1e-15;

  double resolved_beta(const Objective& obj) const;
  double resolved_step(const Objective& obj) const;
  void validate() const;
};

struct IterateRecord {
  std::size_t k = 0;
  double value = 0.0;
  std::optional<double> gap;
  double delta_sq = 0.0;  // ||x_k - x_{k-1}||^2
  int j = 1;              // momentum counter used for the next step
  bool restarted = false;
  int phase = 0;          // 0 plain run, 1/2 warm-start phases
};

struct IterateLog {
  AlgoConfig config;
  std::vector<IterateRecord> records;
  std::optional<double> phi_star;
  std::size_t gradient_evaluations = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> notes;  // e.g. "no-warm-trigger"

  std::size_t restart_count() const;
  /// (k, gap) pairs; requires a reference value.
  std::vector<std::pair<double, double>> gap_series() const;
  const Vector& final_iterate() const { return last_x; }

  Vector last_x;
};

/// y = x_k + (1 - alpha/(j+alpha))(x_k - x_{k-1}) - beta h (grad x_k - grad x_{k-1});
/// returns y - h^2 grad(y).
Vector igahd_step(const Objective& obj, const Vector& x_k, const Vector& x_km1, int j, const AlgoConfig& cfg);

/// Strict test delta_next_sq < (1 - 2 alpha lambda / j) delta_sq.
bool restart_criterion(double delta_next_sq, double delta_sq, int j, const AlgoConfig& cfg);

/// Exactly cfg.iterations steps from x_0 = x_{-1} = x0 (unless the gap
/// tolerance is reached first). Ignores cfg.warm_start.
IterateLog run_algorithm1(const Objective& obj, const Vector& x0, const AlgoConfig& cfg);

/// Function-value restarts until the first trigger x_w, then an extended-speed
/// run from x_0 = x_{-1} = x_w with j = 1; N iterations in total.
IterateLog run_with_warm_start(const Objective& obj, const Vector& x0, const AlgoConfig& cfg);

/// Dispatches on cfg.warm_start.
IterateLog run(const Objective& obj, const Vector& x0, const AlgoConfig& cfg);

}  // namespace esr::discrete
