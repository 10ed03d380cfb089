#include "esr/discrete.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace esr::discrete {

std::string_view to_string(RestartRule rule) {
  switch (rule) {
    case RestartRule::extended_speed: return "extended-speed";
    case RestartRule::function_value: return "function-value";
    case RestartRule::none: return "none";
  }
  return "unknown";
}

double AlgoConfig::resolved_beta(const Objective& obj) const {
  return beta.value_or(1.0 / std::sqrt(obj.lipschitz()));
}

double AlgoConfig::resolved_step(const Objective& obj) const {
  return step.value_or(1.0 / std::sqrt(obj.lipschitz()));
}

void AlgoConfig::validate() const {
  if (!(alpha >= 1.0)) throw std::invalid_argument("AlgoConfig: alpha must be >= 1");
  if (beta && !(*beta >= 0.0)) throw std::invalid_argument("AlgoConfig: beta must be nonnegative");
  if (step && !(*step > 0.0)) throw std::invalid_argument("AlgoConfig: step must be positive");
  // Decimal renderings of 1/(2 alpha) such as 0.1667 are accepted; the
  // factor 1 - 2 alpha lambda / j then dips at most 1e-3 below zero at j = 1.
  if (!(lambda >= 0.0 && lambda <= (1.0 + 1e-3) / (2.0 * alpha)))
    throw std::invalid_argument(fmt::format("AlgoConfig: lambda = {} outside [0, 1/(2 alpha)]", lambda));
  if (iterations < 2) throw std::invalid_argument("AlgoConfig: need at least 2 iterations");
  if (min_restart_interval < 1) throw std::invalid_argument("AlgoConfig: min_restart_interval must be >= 1");
}

std::size_t IterateLog::restart_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.restarted ? 1 : 0;
  return n;
}

std::vector<std::pair<double, double>> IterateLog::gap_series() const {
  if (!phi_star) throw std::logic_error("IterateLog::gap_series: no reference value attached");
  std::vector<std::pair<double, double>> out;
  out.reserve(records.size());
  for (const auto& r : records) out.emplace_back(static_cast<double>(r.k), r.value - *phi_star);
  return out;
}

bool restart_criterion(double delta_next_sq, double delta_sq, int j, const AlgoConfig& cfg) {
  if (j < 1) throw std::invalid_argument("restart_criterion: j must be >= 1");
  const double factor = 1.0 - 2.0 * cfg.alpha * cfg.lambda / j;
  return delta_next_sq < factor * delta_sq;
}

namespace {

struct Step {
  Vector y;
  Vector x_next;
};

Step step_from(const Objective& obj, const Vector& x_k, const Vector& g_k, const Vector& x_km1,
               const Vector& g_km1, int j, double alpha, double beta, double h) {
  const double momentum = 1.0 - alpha / (j + alpha);
  Step s;
  s.y = x_k + momentum * (x_k - x_km1) - beta * h * (g_k - g_km1);
  if (!s.y.allFinite()) return s;
  s.x_next = s.y - h * h * obj.gradient(s.y);
  return s;
}

/// State carried between iterations: consecutive iterates with their gradients.
struct Carry {
  Vector x, g, x_prev, g_prev;
  double value = 0.0;
  double delta_sq = 0.0;
  int j = 1;
  std::size_t k = 0;
};

class Runner {
 public:
  Runner(const Objective& obj, const AlgoConfig& cfg, IterateLog& log)
      : obj_(obj), cfg_(cfg), log_(log), beta_(cfg.resolved_beta(obj)), h_(cfg.resolved_step(obj)) {}

  Carry start(const Vector& x0, int phase) {
    Carry c;
    c.x = x0;
    c.g = obj_.gradient(x0);
    ++log_.gradient_evaluations;
    c.x_prev = x0;
    c.g_prev = c.g;
    c.value = obj_.value(x0);
    record(c, false, phase);
    return c;
  }

  bool done(const Carry& c) const {
    if (c.k >= cfg_.iterations) return true;
    return log_.phi_star && c.value - *log_.phi_star < cfg_.gap_tolerance;
  }

  /// One iteration under `rule`; returns whether a restart fired.
  bool advance(Carry& c, RestartRule rule, int phase) {
    Step s;
    Vector g_next;
    double value_next = 0.0;
    try {
      s = step_from(obj_, c.x, c.g, c.x_prev, c.g_prev, c.j, cfg_.alpha, beta_, h_);
      ++log_.gradient_evaluations;
      if (!s.y.allFinite() || !s.x_next.allFinite())
        throw DivergenceError(fmt::format("IGAHD iterate became non-finite at step {}", c.k + 1), c.k + 1, c.x);
      g_next = obj_.gradient(s.x_next);
      ++log_.gradient_evaluations;
      value_next = obj_.value(s.x_next);
    } catch (const NonFiniteError& e) {
      throw DivergenceError(fmt::format("step {}: {}", c.k + 1, e.what()), c.k + 1, c.x);
    }

    const double delta_next = (s.x_next - c.x).squaredNorm();
    bool fire = false;
    if (c.j >= cfg_.min_restart_interval) {
      switch (rule) {
        case RestartRule::extended_speed: fire = restart_criterion(delta_next, c.delta_sq, c.j, cfg_); break;
        case RestartRule::function_value: fire = value_next >= c.value; break;
        case RestartRule::none: break;
      }
    }
    c.x_prev = std::move(c.x);
    c.g_prev = std::move(c.g);
    c.x = std::move(s.x_next);
    c.g = std::move(g_next);
    c.value = value_next;
    c.delta_sq = delta_next;
    c.j = fire ? 1 : c.j + 1;
    ++c.k;
    record(c, fire, phase);
    return fire;
  }

 private:
  void record(const Carry& c, bool restarted, int phase) {
    IterateRecord r;
    r.k = c.k;
    r.value = c.value;
    if (log_.phi_star) r.gap = c.value - *log_.phi_star;
    r.delta_sq = c.delta_sq;
    r.j = c.j;
    r.restarted = restarted;
    r.phase = phase;
    log_.records.push_back(r);
  }

  const Objective& obj_;
  const AlgoConfig& cfg_;
  IterateLog& log_;
  double beta_;
  double h_;
};

IterateLog make_log(const Objective& obj, const AlgoConfig& cfg) {
  IterateLog log;
  log.config = cfg;
  log.phi_star = obj.reference_value();
  log.records.reserve(cfg.iterations + 1);
  return log;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Vector igahd_step(const Objective& obj, const Vector& x_k, const Vector& x_km1, int j, const AlgoConfig& cfg) {
  if (j < 1) throw std::invalid_argument("igahd_step: j must be >= 1");
  if (x_k.size() != obj.dim() || x_km1.size() != obj.dim())
    throw std::invalid_argument("igahd_step: dimension mismatch");
  const Vector g_k = obj.gradient(x_k);
  const Vector g_km1 = obj.gradient(x_km1);
  Step s = step_from(obj, x_k, g_k, x_km1, g_km1, j, cfg.alpha, cfg.resolved_beta(obj), cfg.resolved_step(obj));
  if (!s.y.allFinite() || !s.x_next.allFinite())
    throw DivergenceError("igahd_step: non-finite iterate", 1, x_k);
  return s.x_next;
}

IterateLog run_algorithm1(const Objective& obj, const Vector& x0, const AlgoConfig& cfg) {
  cfg.validate();
  if (x0.size() != obj.dim()) throw std::invalid_argument("run_algorithm1: dimension mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  IterateLog log = make_log(obj, cfg);
  Runner runner(obj, cfg, log);
  Carry c = runner.start(x0, 0);
  while (!runner.done(c)) runner.advance(c, cfg.restart, 0);
  log.last_x = c.x;
  log.wall_seconds = seconds_since(t0);
  return log;
}

IterateLog run_with_warm_start(const Objective& obj, const Vector& x0, const AlgoConfig& cfg) {
  cfg.validate();
  if (!cfg.warm_start) throw std::invalid_argument("run_with_warm_start: cfg.warm_start is false");
  if (x0.size() != obj.dim()) throw std::invalid_argument("run_with_warm_start: dimension mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  IterateLog log = make_log(obj, cfg);
  Runner runner(obj, cfg, log);
  const std::size_t limit = std::min(cfg.warm_phase_limit.value_or(cfg.iterations), cfg.iterations);

  Carry c = runner.start(x0, 1);
  bool triggered = false;
  while (!runner.done(c) && c.k < limit) {
    if (runner.advance(c, RestartRule::function_value, 1)) {
      triggered = true;
      break;
    }
  }
  if (triggered) {
    // Fresh momentum from the warm point; its gradient is already known.
    c.x_prev = c.x;
    c.g_prev = c.g;
    c.delta_sq = 0.0;
    c.j = 1;
  } else {
    log.notes.emplace_back("no-warm-trigger");
  }
  while (!runner.done(c)) runner.advance(c, RestartRule::extended_speed, 2);
  log.last_x = c.x;
  log.wall_seconds = seconds_since(t0);
  return log;
}

IterateLog run(const Objective& obj, const Vector& x0, const AlgoConfig& cfg) {
  return cfg.warm_start ? run_with_warm_start(obj, x0, cfg) : run_algorithm1(obj, x0, cfg);
}

}  // namespace esr::discrete
