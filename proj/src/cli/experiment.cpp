#include "esr/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "esr/problems.hpp"
#include "esr/rng.hpp"

namespace esr::experiment {

namespace {

Problem build_problem(const ProblemConfig& cfg, Rng& rng) {
  const std::string& id = cfg.problem;
  if (id == "illposed") {
    if (cfg.rho == 1.0) {
      QuadraticSpec spec{Matrix::Identity(3, 3), Vector::Zero(3), Vector::Ones(3)};
      return {id, make_quadratic(spec, "illposed"), Vector::Ones(3)};
    }
    return {id, make_illposed_quadratic(cfg.rho), Vector::Ones(3)};
  }
  if (id == "quadratic") {
    Objective obj = make_random_quadratic(cfg.n, cfg.eig_low, cfg.eig_high, rng);
    Vector x0 = rng.normal_vector(cfg.n);
    return {id, std::move(obj), std::move(x0)};
  }
  if (id == "logsumexp") {
    Index dim = cfg.n, terms = cfg.m;
    if (!cfg.literal_lse_shape) {
      dim = std::min(cfg.n, cfg.m);
      terms = std::max(cfg.n, cfg.m);
    }
    Objective obj = make_logsumexp(dim, terms, cfg.rho, rng);
    Vector x0 = rng.normal_vector(dim);
    return {id, std::move(obj), std::move(x0)};
  }
  if (id == "kernel-logistic" || id == "kernel-multinomial") {
    const bool logistic = id == "kernel-logistic";
    const int q = logistic ? 2 : cfg.q;
    if (q < 2) throw std::invalid_argument("kernel problems need q >= 2");
    const KernelProblemSpec spec = generate_kernel_data(cfg.n, cfg.d, q, cfg.m, cfg.theta, rng);
    Objective obj = logistic ? make_kernel_logistic(spec) : make_kernel_multinomial(spec, q);
    Vector x0 = Vector::Zero(obj.dim());
    return {id, std::move(obj), std::move(x0)};
  }
  throw std::invalid_argument(fmt::format("unknown problem '{}'", id));
}

}  // namespace

Problem make_problem(const ProblemConfig& cfg) {
  Rng rng(cfg.seed);
  Problem p = build_problem(cfg, rng);
  const Index n = p.objective.dim();
  if (cfg.start == "ones") {
    p.x0 = Vector::Ones(n);
  } else if (cfg.start == "zeros") {
    p.x0 = Vector::Zero(n);
  } else if (cfg.start == "gaussian") {
    // quadratic/logsumexp already drew theirs from the same position in the stream
    if (cfg.problem != "quadratic" && cfg.problem != "logsumexp") p.x0 = rng.normal_vector(n);
  } else if (cfg.start != "default") {
    throw std::invalid_argument(fmt::format("unknown start '{}' (default|ones|zeros|gaussian)", cfg.start));
  }
  return p;
}

double effective_gap_floor(double phi_star) {
  return std::max(analysis::kDefaultGapFloor, 1e-12 * std::abs(phi_star));
}

std::vector<LambdaSpec> parse_lambdas(const std::string& list, double alpha) {
  std::vector<LambdaSpec> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    std::string tok = list.substr(pos, comma - pos);
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) throw std::invalid_argument(fmt::format("empty entry in lambda list '{}'", list));
    if (tok == "1/4a") {
      out.push_back({tok, 1.0 / (4.0 * alpha)});
    } else if (tok == "1/2a") {
      out.push_back({tok, 1.0 / (2.0 * alpha)});
    } else {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v))
        throw std::invalid_argument(fmt::format("bad lambda '{}' (use a number, 1/4a or 1/2a)", tok));
      out.push_back({tok, v});
    }
    pos = comma + 1;
  }
  return out;
}

discrete::AlgoConfig series_config(const DiscreteStudyConfig& cfg, double lambda, bool warm) {
  discrete::AlgoConfig c = cfg.algo;
  c.lambda = lambda;
  c.warm_start = warm;
  if (lambda == 0.0 && c.restart == discrete::RestartRule::extended_speed)
    c.min_restart_interval = std::max(c.min_restart_interval, cfg.speed_min_restart_interval);
  return c;
}

namespace {

void attach_reference(discrete::IterateLog& log, double phi_star) {
  log.phi_star = phi_star;
  for (auto& r : log.records) r.gap = r.value - phi_star;
}

Objective with_value(const Objective& obj, double phi_star) {
  Objective out = obj;
  out.with_reference(phi_star, obj.minimizer());
  return out;
}

}  // namespace

DiscreteStudy run_discrete_study(const Problem& problem, const DiscreteStudyConfig& cfg) {
  if (cfg.lambdas.empty()) throw std::invalid_argument("run_discrete_study: empty lambda list");
  DiscreteStudy study;
  study.problem = problem.id;
  study.reference = analysis::reference_min(problem.objective, problem.x0,
                                            cfg.reference_factor * cfg.algo.iterations, cfg.algo);
  const Objective obj = with_value(problem.objective, study.reference.value);

  for (const auto& lam : cfg.lambdas) {
    study.runs.push_back({lam.label, discrete::run(obj, problem.x0, series_config(cfg, lam.value, false))});
    if (cfg.warm)
      study.runs.push_back(
          {"warm " + lam.label, discrete::run(obj, problem.x0, series_config(cfg, lam.value, true))});
  }

  double phi_star = study.reference.value;
  if (!study.reference.closed_form)
    for (const auto& s : study.runs)
      for (const auto& r : s.log.records) phi_star = std::min(phi_star, r.value);
  study.phi_star = phi_star;

  std::vector<analysis::SeriesSummary> cols;
  for (auto& s : study.runs) {
    attach_reference(s.log, phi_star);
    cols.push_back(analysis::summarize(s.log, problem.id, s.label, effective_gap_floor(phi_star)));
  }
  study.table = analysis::make_table(std::move(cols));
  return study;
}

ContinuousStudy run_continuous_study(const Problem& problem, const ContinuousStudyConfig& cfg) {
  if (cfg.lambdas.empty()) throw std::invalid_argument("run_continuous_study: empty lambda list");
  ContinuousStudy study;
  study.problem = problem.id;
  discrete::AlgoConfig ref_cfg;
  ref_cfg.alpha = std::max(cfg.alpha, 1.0);
  const auto ref = analysis::reference_min(problem.objective, problem.x0, cfg.reference_budget, ref_cfg);
  dynamics::OdeSpec spec{with_value(problem.objective, ref.value), cfg.alpha, cfg.beta, cfg.variant, cfg.gamma,
                         std::nullopt, true};

  for (const auto& lam : cfg.lambdas) {
    dynamics::RestartPolicy policy;
    policy.kind = cfg.kind;
    policy.lambda = lam.value;
    policy.event_tol = cfg.event_tol;
    study.runs.push_back({lam.label, dynamics::restarted_trajectory(spec, problem.x0, policy, cfg.horizon,
                                                                    cfg.integrator)});
  }

  double phi_star = ref.value;
  if (!ref.closed_form)
    for (const auto& s : study.runs)
      for (const auto& seg : s.traj.segments)
        for (const auto& smp : seg.samples) phi_star = std::min(phi_star, smp.value);
  study.phi_star = phi_star;

  std::vector<analysis::SeriesSummary> cols;
  for (const auto& s : study.runs)
    cols.push_back(analysis::summarize(s.traj, phi_star, problem.id, s.label, effective_gap_floor(phi_star)));
  study.table = analysis::make_table(std::move(cols));
  return study;
}

std::string discrete_csv(const discrete::IterateLog& log, double phi_star) {
  std::string out = "k,fval,gap,delta_sq,j,restarted,phase\n";
  for (const auto& r : log.records)
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{},{},{}\n", r.k, r.value, r.value - phi_star, r.delta_sq, r.j,
                       r.restarted ? 1 : 0, r.phase);
  return out;
}

std::string continuous_samples_csv(const dynamics::RestartedTrajectory& traj, double phi_star) {
  std::string out = "t,fval,gap,speed2,segment_index\n";
  for (std::size_t k = 0; k < traj.segments.size(); ++k) {
    const double start = traj.segment_start(k);
    for (const auto& s : traj.segments[k].samples)
      out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{}\n", start + s.t, s.value, s.value - phi_star,
                         s.v.squaredNorm(), k);
  }
  return out;
}

std::string restart_times_csv(const dynamics::RestartedTrajectory& traj, double phi_star) {
  std::string out = "k,T_k,gap_at_restart\n";
  for (std::size_t k = 0; k < traj.restart_times.size(); ++k)
    out += fmt::format("{},{:.17g},{:.17g}\n", k + 1, traj.restart_times[k],
                       traj.segments[k].last().value - phi_star);
  return out;
}

}  // namespace esr::experiment
