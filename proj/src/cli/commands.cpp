#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "esr/cli.hpp"
#include "esr/experiment.hpp"
#include "esr/problems.hpp"
#include "esr/rng.hpp"
#include "esr/theory.hpp"
#include "esr/version.hpp"

namespace esr::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Settings per subcommand
// ---------------------------------------------------------------------------

struct TheoryArgs {
  double alpha = 3.0;
  double beta = 0.0;
  double lambda = 0.0;
  double lipschitz = 0.0;
  std::optional<double> mu;
  std::optional<double> tau;
  int grid = 200;
};

struct CommonRun {
  experiment::ProblemConfig problem;
  std::string lambdas = "0,1/4a,1/2a";
  std::string out_dir = "esr_out";
  std::string tag;
};

struct ContinuousArgs {
  CommonRun common;
  experiment::ContinuousStudyConfig study;
  std::string variant = "din-avd";
  std::string policy = "extended-speed";
};

struct DiscreteArgs {
  CommonRun common;
  experiment::DiscreteStudyConfig study;
  std::optional<double> beta;
  std::optional<double> step;
  std::string policy = "extended-speed";
  std::size_t warm_limit = 0;
};

struct KernelArgs {
  DiscreteArgs run;
  std::string task = "logistic";
  std::string save_data;
};

void add_problem_options(CLI::App* sub, CommonRun& c, bool kernel) {
  auto& p = c.problem;
  if (!kernel) sub->add_option("--problem", p.problem, "illposed | quadratic | logsumexp");
  sub->add_option("--seed", p.seed, "RNG seed (std::mt19937_64)");
  sub->add_option("--n", p.n, kernel ? "number of samples" : "dimension (log-sum-exp: see --lse-literal)");
  sub->add_option("--m", p.m, kernel ? "Nystrom sketch size" : "log-sum-exp terms");
  if (kernel) {
    sub->add_option("--d", p.d, "feature dimension");
    sub->add_option("--q", p.q, "number of classes (multinomial)");
    sub->add_option("--theta", p.theta, "ridge parameter");
  } else {
    sub->add_option("--rho", p.rho, "ill-posedness / log-sum-exp smoothing");
    sub->add_option("--eig-low", p.eig_low, "random quadratic: lower spectrum end");
    sub->add_option("--eig-high", p.eig_high, "random quadratic: upper spectrum end");
    sub->add_flag("--lse-literal", p.literal_lse_shape, "log-sum-exp: take (n, m) as (dimension, terms) verbatim");
  }
  sub->add_option("--start", p.start, "initial point: default | ones | zeros | gaussian");
  sub->add_option("--lambdas", c.lambdas, "comma list; 1/4a and 1/2a resolve against alpha");
  sub->add_option("--out-dir", c.out_dir, "output directory")->envname("ESR_OUTPUT_DIR");
  sub->add_option("--tag", c.tag, "file name prefix (default: command_problem)");
}

void add_discrete_options(CLI::App* sub, DiscreteArgs& a) {
  auto& algo = a.study.algo;
  sub->add_option("--alpha", algo.alpha, "alpha >= 1");
  sub->add_option("--beta", a.beta, "Hessian damping (default 1/sqrt(L))");
  sub->add_option("--step", a.step, "step size h (default 1/sqrt(L))");
  sub->add_option("--N", algo.iterations, "iterations");
  sub->add_option("--policy", a.policy, "extended-speed | function-value | none");
  sub->add_flag("--warm", a.study.warm, "also run the warm-started variant of every series");
  sub->add_option("--warm-limit", a.warm_limit, "cap on the function-value phase (0: N)");
  sub->add_option("--kmin", algo.min_restart_interval, "restart guard on the momentum counter");
  sub->add_option("--kmin-speed", a.study.speed_min_restart_interval, "guard used for the lambda = 0 series");
  sub->add_option("--ref-factor", a.study.reference_factor, "reference run length in multiples of N");
  sub->add_option("--gap-tol", algo.gap_tolerance, "early stop once the gap drops below this");
}

discrete::RestartRule parse_rule(const std::string& s) {
  if (s == "extended-speed") return discrete::RestartRule::extended_speed;
  if (s == "function-value") return discrete::RestartRule::function_value;
  if (s == "none") return discrete::RestartRule::none;
  throw UsageError(fmt::format("unknown policy '{}'", s));
}

dynamics::RestartKind parse_kind(const std::string& s) {
  if (s == "extended-speed") return dynamics::RestartKind::extended_speed;
  if (s == "function-value") return dynamics::RestartKind::function_value;
  if (s == "none") return dynamics::RestartKind::none;
  throw UsageError(fmt::format("unknown policy '{}'", s));
}

RunConfig resolved_config(const CLI::App* sub) {
  RunConfig cfg;
  cfg.command = sub->get_name();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      value = opt->results().back();  // take-last: config-file entries come first
    } else {
      value = opt->get_default_str();
      if (value.empty()) value = opt->get_items_expected_max() == 0 ? "false" : "auto";
    }
    cfg.entries.emplace_back(name, value);
  }
  return cfg;
}

std::string format_bound(const theory::Bound& b, int digits = 10) {
  if (!b.ok()) return std::string(theory::to_string(b.status));
  if (std::isfinite(b.value)) return fmt::format("{:.{}g}", b.value, digits);
  return fmt::format("exp({:.{}g})", b.log_value, digits);
}

std::string default_tag(const std::string& command, const std::string& problem) {
  const std::string prefix = command + "-";
  const bool redundant = problem.rfind(prefix, 0) == 0;  // kernel + kernel-logistic -> kernel_logistic
  return fmt::format("{}_{}", command, redundant ? problem.substr(prefix.size()) : problem);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int cmd_theory(const TheoryArgs& a, std::ostream& out) {
  theory::ParamTuple p;
  p.alpha = a.alpha;
  p.beta = a.beta;
  p.lambda = a.lambda;
  p.mu = a.mu;
  p.lipschitz = a.lipschitz;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (a.tau && !(*a.tau > 0.0 && *a.tau < theory::tau2(p)))
    throw UsageError(fmt::format("--tau must lie in (0, tau2 = {:.10g})", theory::tau2(p)));
  const theory::TheoryReport r = theory::make_report(p, a.tau);
  const theory::GridBound best = theory::t_upper_grid_min(p, a.grid);
  const std::string mu_str = p.mu ? fmt::format("{:.10g}", *p.mu) : "";

  const std::vector<std::pair<std::string, std::string>> rows{
      {"alpha", fmt::format("{:.10g}", p.alpha)},
      {"beta", fmt::format("{:.10g}", p.beta)},
      {"lambda", fmt::format("{:.10g}", p.lambda)},
      {"mu", p.mu ? mu_str : "(not given)"},
      {"L", fmt::format("{:.10g}", p.lipschitz)},
      {"tau1", fmt::format("{:.10g}", r.tau1)},
      {"tau2", fmt::format("{:.10g}", r.tau2)},
      {"tau3", format_bound(r.tau3)},
      {"Q", format_bound(r.q)},
      {"p", fmt::format("{:.10g}", r.p)},
      {fmt::format("T_upper(tau={:.6g})", r.tau), format_bound(r.t_upper_at_tau)},
      {"T_upper(grid min)",
       best.bound.ok() ? fmt::format("{} at tau={:.6g}", format_bound(best.bound), best.tau) : format_bound(best.bound)},
  };
  std::size_t w = 0;
  for (const auto& [k, v] : rows) w = std::max(w, k.size());
  for (const auto& [k, v] : rows) out << fmt::format("{:<{}}  {}\n", k, w, v);
  out << '\n'
      << "alpha,beta,lambda,mu,L,tau1,tau2,tau3,Q,p,T_upper\n"
      << fmt::format("{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g},{:.17g},{},{},{:.17g},{}\n", p.alpha, p.beta,
                     p.lambda, p.mu ? fmt::format("{:.17g}", *p.mu) : "", p.lipschitz, r.tau1, r.tau2,
                     format_bound(r.tau3, 17), format_bound(r.q, 17), r.p, format_bound(best.bound, 17));
  if (!p.in_validity_region()) {
    out << fmt::format("note: lambda > 1/(2 alpha) = {:.10g}; the restart-time upper bound and Q are not available\n",
                       1.0 / (2.0 * p.alpha));
    return kExitFailure;
  }
  return kExitOk;
}

std::filesystem::path out_path(const CommonRun& c, const std::string& command, const std::string& suffix) {
  const std::string tag = c.tag.empty() ? default_tag(command, c.problem.problem) : c.tag;
  return std::filesystem::path(c.out_dir) / fmt::format("{}_{}.csv", tag, suffix);
}

int cmd_continuous(ContinuousArgs& a, const RunConfig& cfg, std::ostream& out) {
  if (a.variant == "din-avd")
    a.study.variant = dynamics::Variant::din_avd;
  else if (a.variant == "hr")
    a.study.variant = dynamics::Variant::hr_din_avd;
  else
    throw UsageError(fmt::format("unknown variant '{}' (din-avd | hr)", a.variant));
  a.study.kind = parse_kind(a.policy);
  a.study.lambdas = experiment::parse_lambdas(a.common.lambdas, a.study.alpha);
  const experiment::Problem problem = experiment::make_problem(a.common.problem);
  const experiment::ContinuousStudy study = experiment::run_continuous_study(problem, a.study);

  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> long_series;
  for (const auto& s : study.runs) {
    const std::string label = file_label(s.label);
    write_csv_file(out_path(a.common, "continuous", label), cfg,
                   experiment::continuous_samples_csv(s.traj, study.phi_star));
    write_csv_file(out_path(a.common, "continuous", label + "_restarts"), cfg,
                   experiment::restart_times_csv(s.traj, study.phi_star));
    long_series.emplace_back(s.label, dynamics::gap_series(s.traj, study.phi_star));
  }
  write_csv_file(out_path(a.common, "continuous", "summary"), cfg, study.table.csv());
  std::ostringstream lng;
  analysis::write_long_csv(lng, long_series);
  write_csv_file(out_path(a.common, "continuous", "long"), cfg, lng.str());

  out << fmt::format("phi* = {:.17g}\n", study.phi_star) << study.table.text();
  for (const auto& s : study.runs)
    out << fmt::format("{}: {} restarts, first at t = {}\n", s.label, s.traj.restart_times.size(),
                       s.traj.restart_times.empty() ? "-" : fmt::format("{:.6g}", s.traj.restart_times.front()));
  out << fmt::format("wrote {}\n", out_path(a.common, "continuous", "summary").string());
  return kExitOk;
}

void prepare_discrete(DiscreteArgs& a) {
  a.study.algo.beta = a.beta;
  a.study.algo.step = a.step;
  a.study.algo.restart = parse_rule(a.policy);
  if (a.warm_limit > 0) a.study.algo.warm_phase_limit = a.warm_limit;
  a.study.lambdas = experiment::parse_lambdas(a.common.lambdas, a.study.algo.alpha);
}

experiment::DiscreteStudy run_and_write_discrete(const DiscreteArgs& a, const experiment::Problem& problem,
                                                 const RunConfig& cfg, const std::string& command, std::ostream& out) {
  const experiment::DiscreteStudy study = experiment::run_discrete_study(problem, a.study);
  std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> long_series;
  for (const auto& s : study.runs) {
    write_csv_file(out_path(a.common, command, file_label(s.label)), cfg,
                   experiment::discrete_csv(s.log, study.phi_star));
    long_series.emplace_back(s.label, s.log.gap_series());
    for (const auto& note : s.log.notes) out << fmt::format("{}: {}\n", s.label, note);
  }
  write_csv_file(out_path(a.common, command, "summary"), cfg, study.table.csv());
  std::ostringstream lng;
  analysis::write_long_csv(lng, long_series);
  write_csv_file(out_path(a.common, command, "long"), cfg, lng.str());

  out << fmt::format("phi* = {:.17g} ({})\n", study.phi_star,
                     study.reference.closed_form ? "closed form" : "reference run");
  if (study.reference.unbounded_suspect) out << "warning: unbounded-suspect (reference run never flattened)\n";
  out << study.table.text();
  return study;
}

int cmd_discrete(DiscreteArgs& a, const RunConfig& cfg, std::ostream& out) {
  prepare_discrete(a);
  const experiment::Problem problem = experiment::make_problem(a.common.problem);
  run_and_write_discrete(a, problem, cfg, "discrete", out);
  out << fmt::format("wrote {}\n", out_path(a.common, "discrete", "summary").string());
  return kExitOk;
}

int cmd_kernel(KernelArgs& a, const RunConfig& cfg, std::ostream& out) {
  if (a.task != "logistic" && a.task != "multinomial")
    throw UsageError(fmt::format("unknown task '{}' (logistic | multinomial)", a.task));
  a.run.common.problem.problem = "kernel-" + a.task;
  prepare_discrete(a.run);
  const experiment::Problem problem = experiment::make_problem(a.run.common.problem);
  if (!a.save_data.empty()) {
    Rng rng(a.run.common.problem.seed);
    const auto& pc = a.run.common.problem;
    const KernelProblemSpec spec =
        generate_kernel_data(pc.n, pc.d, a.task == "logistic" ? 2 : pc.q, pc.m, pc.theta, rng);
    std::ostringstream data;
    write_kernel_csv(spec, data);
    write_csv_file(a.save_data, cfg, data.str());
  }
  const experiment::DiscreteStudy study = run_and_write_discrete(a.run, problem, cfg, "kernel", out);
  const double slack = 1e-12 * std::max(1.0, std::abs(study.phi_star));
  for (const auto& s : study.runs) {
    double worst = 0.0;
    for (std::size_t i = 1; i < s.log.records.size(); ++i)
      worst = std::max(worst, s.log.records[i].value - s.log.records[i - 1].value);
    out << fmt::format("{}: gaps {} (largest increase {:.3e})\n", s.label,
                       worst <= slack ? "monotone" : "NOT monotone", worst);
  }
  out << fmt::format("wrote {}\n", out_path(a.run.common, "kernel", "summary").string());
  return kExitOk;
}

bool truthy(const std::string& v) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(fmt::format("expected a boolean, got '{}'", v));
}

/// Config-file entries become flags placed before the real command-line
/// arguments; with take-last semantics the command line wins.
std::vector<std::string> inject_config(CLI::App* sub, const std::string& path) {
  std::vector<std::string> tokens;
  for (const auto& [key, value] : read_config_file(path)) {
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr || key == "config" || key == "help")
      throw ConfigError(fmt::format("unknown key '{}' for '{}' in {}", key, sub->get_name(), path));
    if (opt->get_type_size() == 0) {
      if (truthy(value)) tokens.push_back("--" + key);
    } else {
      tokens.push_back("--" + key + "=" + value);
    }
  }
  return tokens;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extended speed restart experiments for inertial dynamics with Hessian damping", "esr"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  TheoryArgs th;
  CLI::App* theory_cmd = app.add_subcommand("theory", "restart-time bounds and contraction factor");
  theory_cmd->add_option("--alpha", th.alpha, "viscous damping alpha > 0");
  theory_cmd->add_option("--beta", th.beta, "Hessian damping beta >= 0");
  theory_cmd->add_option("--lambda", th.lambda, "extension parameter in [0, 1]");
  theory_cmd->add_option("--L", th.lipschitz, "gradient Lipschitz constant")->required();
  theory_cmd->add_option("--mu", th.mu, "strong convexity (needed for Q and T_upper)");
  theory_cmd->add_option("--tau", th.tau, "tau in (0, tau2) for T_upper (default tau3)");
  theory_cmd->add_option("--grid", th.grid, "grid points for the minimized T_upper");

  ContinuousArgs ct;
  ct.common.lambdas = "0,1/4a,1/2a";
  CLI::App* cont_cmd = app.add_subcommand("continuous", "restarted ODE trajectories and rate fits");
  add_problem_options(cont_cmd, ct.common, false);
  cont_cmd->add_option("--alpha", ct.study.alpha, "viscous damping");
  cont_cmd->add_option("--beta", ct.study.beta, "Hessian damping");
  cont_cmd->add_option("--variant", ct.variant, "din-avd | hr");
  cont_cmd->add_option("--gamma", ct.study.gamma, "hr variant: gradient coefficient gamma");
  cont_cmd->add_option("--policy", ct.policy, "extended-speed | function-value | none");
  cont_cmd->add_option("--horizon", ct.study.horizon, "global time horizon");
  cont_cmd->add_option("--event-tol", ct.study.event_tol, "restart-time tolerance");
  cont_cmd->add_option("--abs-tol", ct.study.integrator.abs_tol, "integrator absolute tolerance");
  cont_cmd->add_option("--rel-tol", ct.study.integrator.rel_tol, "integrator relative tolerance");
  cont_cmd->add_option("--stride", ct.study.integrator.output_stride, "sample spacing in local time");
  cont_cmd->add_option("--ref-budget", ct.study.reference_budget, "iterations for a non-quadratic reference");

  DiscreteArgs ds;
  CLI::App* disc_cmd = app.add_subcommand("discrete", "IGAHD with restarts and rate fits");
  add_problem_options(disc_cmd, ds.common, false);
  add_discrete_options(disc_cmd, ds);

  KernelArgs kn;
  kn.run.common.problem.n = 1024;
  kn.run.common.problem.m = 128;
  kn.run.study.algo.iterations = 2000;
  CLI::App* kern_cmd = app.add_subcommand("kernel", "kernel logistic / multinomial regression with a Nystrom sketch");
  kern_cmd->add_option("--task", kn.task, "logistic | multinomial");
  kern_cmd->add_option("--save-data", kn.save_data, "also write the generated samples to this CSV");
  add_problem_options(kern_cmd, kn.run.common, true);
  add_discrete_options(kern_cmd, kn.run);

  std::string config_path;
  for (CLI::App* sub : {theory_cmd, cont_cmd, disc_cmd, kern_cmd})
    sub->add_option("--config", config_path, "flat key=value file (command-line flags win)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Locate the subcommand and any --config before the real parse.
    CLI::App* sub = nullptr;
    if (!args.empty()) sub = app.get_subcommand_no_throw(args.front());
    if (sub != nullptr) {
      for (std::size_t i = 1; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size())
          path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
          path = args[i].substr(9);
        if (!path.empty()) {
          const auto injected = inject_config(sub, path);
          args.insert(args.begin() + 1, injected.begin(), injected.end());
          break;
        }
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (theory_cmd->parsed()) return cmd_theory(th, out);
    if (cont_cmd->parsed()) return cmd_continuous(ct, resolved_config(cont_cmd), out);
    if (disc_cmd->parsed()) return cmd_discrete(ds, resolved_config(disc_cmd), out);
    if (kern_cmd->parsed()) return cmd_kernel(kn, resolved_config(kern_cmd), out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid setting: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    err << fmt::format("diverged at step {}: {}\n", e.step(), e.what());
    return kExitFailure;
  } catch (const IntegratorError& e) {
    err << fmt::format("integrator failure at t = {:.6g}: {}\n", e.time(), e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace esr::cli
