// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "esr/analysis.hpp"
#include "esr/cli.hpp"
#include "esr/discrete.hpp"
#include "esr/dynamics.hpp"
#include "esr/experiment.hpp"
#include "esr/finite_diff.hpp"
#include "esr/problems.hpp"
#include "esr/rng.hpp"
#include "esr/theory.hpp"

using namespace esr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, std::string what) {
    if (!cond) ok = false;
    notes.push_back((cond ? "" : "!! ") + std::move(what));
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, fmt::format("exception: {}", e.what()));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.require(secs < budget_s, fmt::format("runtime {:.2f} s (limit {:.0f} s)", secs, budget_s));
  for (const auto& n : out.notes) std::cout << "    " << n << '\n';
  std::cout << fmt::format("{} {:>2}. {} ({:.1f} s)\n", out.ok ? "PASS" : "FAIL", id, name, secs) << std::flush;
  if (!out.ok) ++failures;
}

theory::ParamTuple tuple(double a, double b, double l, double L, std::optional<double> mu = std::nullopt) {
  theory::ParamTuple p;
  p.alpha = a;
  p.beta = b;
  p.lambda = l;
  p.lipschitz = L;
  p.mu = mu;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += fmt::format("{}{:.4e}", s.empty() ? "" : ", ", x);
  return s;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

const std::vector<experiment::LambdaSpec> kLambdas = experiment::parse_lambdas("0,1/4a,1/2a", 3.0);

// ---------------------------------------------------------------------------
// Experiment presets shared by criteria 7-10 and their determinism rerun.

experiment::ProblemConfig problem_cfg(const std::string& id) {
  experiment::ProblemConfig pc;
  pc.problem = id;
  pc.seed = 7;
  return pc;
}

experiment::ContinuousStudy continuous_quadratic() {
  experiment::ProblemConfig pc = problem_cfg("quadratic");
  pc.n = 40;
  pc.start = "ones";
  experiment::ContinuousStudyConfig cfg;
  cfg.lambdas = kLambdas;
  cfg.horizon = 300.0;
  return experiment::run_continuous_study(experiment::make_problem(pc), cfg);
}

experiment::DiscreteStudy discrete_study(experiment::ProblemConfig pc, std::size_t n_iter, bool warm) {
  experiment::DiscreteStudyConfig cfg;
  cfg.algo.iterations = n_iter;
  cfg.lambdas = kLambdas;
  cfg.warm = warm;
  return experiment::run_discrete_study(experiment::make_problem(pc), cfg);
}

experiment::DiscreteStudy illposed_study(bool warm) { return discrete_study(problem_cfg("illposed"), 400, warm); }

experiment::DiscreteStudy quadratic500_study() {
  experiment::ProblemConfig pc = problem_cfg("quadratic");
  pc.n = 500;
  return discrete_study(pc, 1000, false);
}

experiment::DiscreteStudy logsumexp_study(bool warm) {
  experiment::ProblemConfig pc = problem_cfg("logsumexp");
  pc.n = 50;
  pc.m = 20;
  return discrete_study(pc, 3000, warm);
}

experiment::DiscreteStudy kernel_study(const std::string& id, int q) {
  experiment::ProblemConfig pc = problem_cfg(id);
  pc.n = 1024;
  pc.m = 128;
  pc.d = 50;
  pc.q = q;
  pc.theta = 1e-4;
  return discrete_study(pc, 2000, false);
}

std::vector<double> b_values(const analysis::Table& t, const std::string& prefix = "") {
  std::vector<double> out;
  for (const auto& c : t.columns)
    if (prefix.empty() ? c.label.rfind("warm ", 0) != 0 : c.label.rfind(prefix, 0) == 0) out.push_back(c.fit.b_coef);
  return out;
}

const analysis::SeriesSummary& column(const analysis::Table& t, const std::string& label) {
  for (const auto& c : t.columns)
    if (c.label == label) return c;
  throw std::runtime_error("no column " + label);
}

// Gap CSVs written through the CLI writer and read back without the timestamp.
std::string strip_timestamp(const std::string& s) {
  std::istringstream in(s);
  std::string line, out;
  while (std::getline(in, line))
    if (line.rfind("# timestamp:", 0) != 0) out += line + '\n';
  return out;
}

std::vector<std::string> write_and_read(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& csvs) {
  std::vector<std::string> out;
  cli::RunConfig rc{"acceptance", {{"seed", "7"}}};
  for (const auto& [name, body] : csvs) {
    const fs::path p = dir / (cli::file_label(name) + ".csv");
    cli::write_csv_file(p, rc, body);
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    out.push_back(strip_timestamp(ss.str()));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> gap_csvs(const experiment::DiscreteStudy& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : s.runs)
    out.emplace_back(s.problem + "_" + r.label, experiment::discrete_csv(r.log, s.phi_star));
  return out;
}

std::vector<std::pair<std::string, std::string>> gap_csvs(const experiment::ContinuousStudy& s) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : s.runs)
    out.emplace_back("continuous_" + s.problem + "_" + r.label,
                     experiment::continuous_samples_csv(r.traj, s.phi_star));
  return out;
}

std::vector<std::pair<std::string, std::string>> first_run_csvs;

void keep(const std::vector<std::pair<std::string, std::string>>& csvs) {
  first_run_csvs.insert(first_run_csvs.end(), csvs.begin(), csvs.end());
}

// Explicit Hessians of the kernel losses, from the sketched kernel columns C:
// logistic C' diag(p(1-p)) C + theta W, multinomial blocks C' diag(p_j(d_jk - p_k)) C + d_jk theta W.
Matrix kernel_hessian(const KernelProblemSpec& spec, int q, const Vector& x) {
  const Matrix c = sketched_kernel_columns(spec);
  const Index m = spec.sketch_rows();
  Matrix w(m, m);
  for (Index r = 0; r < m; ++r) w.row(r) = c.row(spec.sketch[static_cast<std::size_t>(r)]);
  const Matrix p = multinomial_probabilities(spec, q, x);
  const int k = q - 1;
  Matrix h = Matrix::Zero(m * k, m * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      Vector d = -p.col(a).cwiseProduct(p.col(b));
      if (a == b) d += p.col(a);
      h.block(a * m, b * m, m, m) = c.transpose() * d.asDiagonal() * c;
      if (a == b) h.block(a * m, b * m, m, m) += spec.theta * w;
    }
  return h;
}

}  // namespace

int main() {
  std::cout << "acceptance suite\n" << std::flush;

  criterion(1, "closed-form tau3 values and bisection agreement", 1.0, [](Outcome& o) {
    struct Case {
      double alpha, lambda, exact, quoted;
    };
    const std::vector<Case> cases{
        {3, 0, std::sqrt(6.0 / 5.0), std::sqrt(6.0 / 5.0)},
        {3, 1.0 / 6, 3.0 / std::sqrt(5.0), 3.0 / std::sqrt(5.0)},
        {3, 1, std::sqrt(3.0), std::sqrt(3.0)},
        {0.5, 1, std::sqrt(7.0 * (8.0 - std::sqrt(46.0)) / 6.0), 1.19},
        {1, 0.5, 2.0 * std::sqrt(4.0 - std::sqrt(13.0)), 1.26},
    };
    for (const auto& c : cases) {
      const auto p = tuple(c.alpha, 0.0, c.lambda, 1.0);
      const double t3 = theory::tau3(p).value;
      const auto closed = theory::tau3_closed_form(p);
      const auto bis = theory::tau3_bisection(p);
      o.require(rel(t3, c.exact) <= 1e-6 && std::abs(t3 - c.quoted) <= 0.005,
                fmt::format("alpha={} lambda={:.4g}: tau3 = {:.10f}, expected {:.10f}", c.alpha, c.lambda, t3, c.exact));
      o.require(closed && bis.ok() && rel(bis.value, *closed) <= 1e-9,
                fmt::format("  bisection {:.12f} vs closed form {:.12f}", bis.value, closed.value_or(NAN)));
    }
  });

  criterion(2, "ordering 0 < tau3 < tau2 < tau1 and Q in (0,1) on the grid", 1.0, [](Outcome& o) {
    int count = 0, bad = 0;
    for (double a : {1.0, 3.0, 5.0})
      for (double b : {0.0, 0.5, 1.0})
        for (double l : {0.0, 1.0 / (4 * a), 1.0 / (2 * a)})
          for (double ratio : {0.01, 0.1})
            for (double L : {1.0, 10.0}) {
              const auto p = tuple(a, b, l, L, ratio * L);
              const auto t3 = theory::tau3(p);
              const auto q = theory::q_factor(p);
              const bool good = t3.ok() && t3.value > 0 && t3.value < theory::tau2(p) &&
                                theory::tau2(p) < theory::tau1(p) && q.ok() && q.value > 0 && q.value < 1;
              ++count;
              if (!good) {
                ++bad;
                o.require(false, fmt::format("violated at alpha={} beta={} lambda={:.4g} mu/L={} L={}", a, b, l, ratio, L));
              }
            }
    o.require(bad == 0, fmt::format("{} parameter tuples checked, {} violations", count, bad));
  });

  criterion(3, "gradient and hvp oracles for every packaged objective", 30.0, [](Outcome& o) {
    struct Item {
      std::string name;
      Objective obj;
      double tol;
      std::function<Matrix(const Vector&)> hessian;  // for objectives without an analytic hvp
    };
    std::vector<Item> items;
    items.push_back({"illposed", make_illposed_quadratic(10), 1e-6, nullptr});
    {
      Rng rng(7);
      items.push_back({"quadratic n=40", make_random_quadratic(40, 0.0, 1.0, rng), 1e-6, nullptr});
    }
    {
      Rng rng(7);
      items.push_back({"logsumexp 50x20", make_logsumexp(50, 20, 10.0, rng), 1e-6, nullptr});
    }
    {
      Rng rng(7);
      items.push_back({"logsumexp 20x50", make_logsumexp(20, 50, 10.0, rng), 1e-6, nullptr});
    }
    {
      Rng rng(7);
      const auto spec = std::make_shared<KernelProblemSpec>(generate_kernel_data(1024, 50, 2, 128, 1e-4, rng));
      items.push_back({"kernel logistic", make_kernel_logistic(*spec), 1e-5,
                       [spec](const Vector& x) { return kernel_hessian(*spec, 2, x); }});
    }
    {
      Rng rng(7);
      const auto spec = std::make_shared<KernelProblemSpec>(generate_kernel_data(1024, 50, 3, 128, 1e-4, rng));
      items.push_back({"kernel multinomial q=3", make_kernel_multinomial(*spec, 3), 1e-5,
                       [spec](const Vector& x) { return kernel_hessian(*spec, 3, x); }});
    }
    for (const auto& it : items) {
      Rng pts(1234);
      double worst_g = 0.0, worst_h = 0.0;
      const bool kernel = static_cast<bool>(it.hessian);
      const int n_points = 20;
      for (int i = 0; i < n_points; ++i) {
        Vector x = pts.normal_vector(it.obj.dim());
        if (kernel) x *= 0.1;
        const double h = default_fd_step(x);
        worst_g = std::max(worst_g, relative_error(it.obj.gradient(x), fd_gradient(it.obj, x, h)));
        const Vector v = pts.normal_vector(it.obj.dim());
        const Vector exact = it.obj.has_hvp() ? it.obj.hvp(x, v) : Vector(it.hessian(x) * v);
        worst_h = std::max(worst_h, relative_error(fd_hvp(it.obj, x, v, h), exact));
      }
      o.require(worst_g <= it.tol && worst_h <= it.tol,
                fmt::format("{}: worst gradient rel. error {:.2e}, hvp {:.2e} (tol {:.0e}, {} points, {})", it.name,
                            worst_g, worst_h, it.tol, n_points, it.obj.has_hvp() ? "analytic hvp" : "explicit Hessian"));
    }
  });

  criterion(4, "continuous first restart times ordered in lambda and within [tau3, T_upper]", 60.0, [](Outcome& o) {
    const Objective obj = make_illposed_quadratic(10);
    dynamics::OdeSpec spec{obj, 3.0, 1.0, dynamics::Variant::din_avd, 1.0, std::nullopt, true};
    double prev = 0.0;
    for (const auto& lam : kLambdas) {
      dynamics::RestartPolicy pol;
      pol.lambda = lam.value;
      const auto seg = dynamics::integrate_segment(spec, Vector::Ones(3), pol, 200.0);
      const auto p = tuple(3, 1, lam.value, 100.0, 1.0);
      const double t3 = theory::tau3(p).value;
      const auto up = theory::t_upper_grid_min(p).bound;
      const bool ok_low = seg.end == dynamics::SegmentEnd::speed_restart && seg.end_time >= t3 - 10 * pol.event_tol;
      const bool ok_up = !up.ok() || std::log(seg.end_time) <= up.log_value;
      const bool ok_order = seg.end_time >= prev;
      o.require(ok_low && ok_up && ok_order,
                fmt::format("lambda={}: T1 = {:.6f}, tau3 = {:.6f}, T_upper = {}", lam.label, seg.end_time, t3,
                            up.ok() ? fmt::format("exp({:.4g})", up.log_value) : std::string(theory::to_string(up.status))));
      prev = seg.end_time;
    }
  });

  criterion(5, "beta = 0, lambda = 1: speed event equals function-value event", 30.0, [](Outcome& o) {
    const Objective obj = make_illposed_quadratic(10);
    dynamics::OdeSpec spec{obj, 3.0, 0.0, dynamics::Variant::din_avd, 1.0, std::nullopt, true};
    dynamics::RestartPolicy sp, fv;
    sp.lambda = 1.0;
    fv.kind = dynamics::RestartKind::function_value;
    const auto a = dynamics::integrate_segment(spec, Vector::Ones(3), sp, 200.0);
    const auto b = dynamics::integrate_segment(spec, Vector::Ones(3), fv, 200.0);
    o.require(a.end == dynamics::SegmentEnd::speed_restart && b.end == dynamics::SegmentEnd::fv_restart &&
                  std::abs(a.end_time - b.end_time) <= 10 * sp.event_tol,
              fmt::format("T^1 = {:.12f}, T^fv = {:.12f}, difference {:.2e} (limit {:.0e})", a.end_time, b.end_time,
                          std::abs(a.end_time - b.end_time), 10 * sp.event_tol));
  });

  criterion(6, "per-restart contraction below Q on the identity quadratic", 60.0, [](Outcome& o) {
    experiment::ProblemConfig pc = problem_cfg("illposed");
    pc.rho = 1.0;
    const auto prob = experiment::make_problem(pc);
    dynamics::OdeSpec spec{prob.objective, 3.0, 1.0, dynamics::Variant::din_avd, 1.0, std::nullopt, true};
    dynamics::RestartPolicy pol;
    const auto tr = dynamics::restarted_trajectory(spec, prob.x0, pol, 60.0);
    const double q = theory::q_factor(tuple(3, 1, 0, 1, 1)).value;
    double worst = 0.0;
    for (double r : tr.decrease_ratios) worst = std::max(worst, r);
    o.require(!tr.decrease_ratios.empty() && worst <= q,
              fmt::format("{} restarts, largest ratio {:.6f}, Q = {:.6f}", tr.decrease_ratios.size(), worst, q));
  });

  criterion(7, "continuous rate trend on the n=40 random quadratic", 300.0, [](Outcome& o) {
    const auto study = continuous_quadratic();
    keep(gap_csvs(study));
    const auto b = b_values(study.table);
    o.require(strictly_increasing(b), fmt::format("B = {} strictly increasing", fmt_list(b)));
    for (double x : b)
      o.require(x >= 0.5 * 4.5618e-2 && x <= 2.0 * 5.6794e-2, fmt::format("B = {:.4e} in [{:.4e}, {:.4e}]", x,
                                                                         0.5 * 4.5618e-2, 2.0 * 5.6794e-2));
  });

  criterion(8, "discrete rate trend on ill-posed, random quadratic and log-sum-exp", 300.0, [](Outcome& o) {
    const auto ill = illposed_study(false);
    const auto quad = quadratic500_study();
    const auto lse = logsumexp_study(false);
    keep(gap_csvs(ill));
    keep(gap_csvs(quad));
    keep(gap_csvs(lse));
    const std::vector<double> ill_ref{6.711e-2, 7.746e-2, 8.911e-2};
    const std::vector<double> lse_ref{6.771e-3, 7.714e-3, 8.660e-3};
    for (const auto* s : {&ill, &quad, &lse}) {
      const auto b = b_values(s->table);
      o.require(strictly_increasing(b), fmt::format("{}: B = {} strictly increasing", s->problem, fmt_list(b)));
    }
    const auto bi = b_values(ill.table), bl = b_values(lse.table);
    for (std::size_t i = 0; i < 3; ++i) {
      o.require(rel(bi[i], ill_ref[i]) <= 0.4,
                fmt::format("illposed B[{}] = {:.4e} within 40% of {:.4e}", kLambdas[i].label, bi[i], ill_ref[i]));
      o.require(rel(bl[i], lse_ref[i]) <= 0.4,
                fmt::format("logsumexp B[{}] = {:.4e} within 40% of {:.4e}", kLambdas[i].label, bl[i], lse_ref[i]));
    }
  });

  criterion(9, "warm start: smaller A with the same B; larger B on log-sum-exp", 300.0, [](Outcome& o) {
    const auto ill = illposed_study(true);
    const auto lse = logsumexp_study(true);
    keep(gap_csvs(ill));
    keep(gap_csvs(lse));
    const auto& ext = column(ill.table, "1/2a").fit;
    const auto& warm = column(ill.table, "warm 1/2a").fit;
    o.require(warm.a_coef * 10 <= ext.a_coef,
              fmt::format("illposed A: warm {:.4e} vs extended {:.4e} ({:.1f}x)", warm.a_coef, ext.a_coef,
                          ext.a_coef / warm.a_coef));
    o.require(rel(warm.b_coef, ext.b_coef) <= 0.15,
              fmt::format("illposed B: warm {:.4e} vs extended {:.4e}", warm.b_coef, ext.b_coef));
    const auto& lext = column(lse.table, "1/2a").fit;
    const auto& lwarm = column(lse.table, "warm 1/2a").fit;
    o.require(lwarm.b_coef >= lext.b_coef,
              fmt::format("logsumexp B: warm {:.4e} >= extended {:.4e}", lwarm.b_coef, lext.b_coef));
  });

  criterion(10, "kernel problems at desk scale: monotone gaps, positive B, q=2 equals logistic", 600.0, [](Outcome& o) {
    for (const auto& [id, q] : std::vector<std::pair<std::string, int>>{{"kernel-logistic", 2}, {"kernel-multinomial", 3}}) {
      const auto study = kernel_study(id, q);
      keep(gap_csvs(study));
      const double slack = 1e-12 * std::max(1.0, std::abs(study.phi_star));
      for (std::size_t i = 0; i < study.runs.size(); ++i) {
        const auto& recs = study.runs[i].log.records;
        double worst = 0.0;
        for (std::size_t k = 1; k < recs.size(); ++k) worst = std::max(worst, recs[k].value - recs[k - 1].value);
        const double b = study.table.columns[i].fit.b_coef;
        o.require(worst <= slack && b > 0.0,
                  fmt::format("{} q={} lambda={}: largest gap increase {:.2e} (slack {:.1e}), B = {:.4e}", id, q,
                              study.runs[i].label, worst, slack, b));
      }
    }
    experiment::ProblemConfig pc = problem_cfg("kernel-logistic");
    pc.n = 1024;
    pc.m = 128;
    const auto logi = experiment::make_problem(pc);
    pc.problem = "kernel-multinomial";
    pc.q = 2;
    const auto multi = experiment::make_problem(pc);
    discrete::AlgoConfig cfg;
    cfg.lambda = 1.0 / 6;
    cfg.iterations = 2000;
    const auto a = discrete::run(logi.objective, logi.x0, cfg);
    const auto b = discrete::run(multi.objective, multi.x0, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < std::min(a.records.size(), b.records.size()); ++k)
      worst = std::max(worst, rel(b.records[k].value, a.records[k].value));
    o.require(a.records.size() == b.records.size() && worst <= 1e-10,
              fmt::format("q=2 multinomial vs logistic: worst relative value difference {:.2e} over {} iterates", worst,
                          a.records.size()));
  });

  criterion(11, "integrator self-convergence under halved tolerances", 120.0, [](Outcome& o) {
    struct Prob {
      std::string name;
      experiment::ProblemConfig cfg;
    };
    std::vector<Prob> probs;
    {
      auto c = problem_cfg("quadratic");
      c.n = 40;
      probs.push_back({"quadratic n=40", c});
      c.n = 500;
      probs.push_back({"quadratic n=500", c});
      auto l = problem_cfg("logsumexp");
      l.n = 50;
      l.m = 20;
      probs.push_back({"logsumexp 50/20", l});
    }
    const double tol = 1e-9;
    for (const auto& pr : probs) {
      const auto prob = experiment::make_problem(pr.cfg);
      dynamics::OdeSpec spec{prob.objective, 3.0, 1.0, dynamics::Variant::din_avd, 1.0, std::nullopt, true};
      const double gscale = prob.objective.gradient(prob.x0).norm();
      double worst_t = 0.0, worst_x = 0.0;
      std::size_t compared = 0;
      for (const auto& lam : kLambdas) {
        dynamics::RestartPolicy coarse_pol, fine_pol;
        coarse_pol.lambda = fine_pol.lambda = lam.value;
        coarse_pol.event_tol = tol;
        fine_pol.event_tol = tol / 2;
        dynamics::IntegratorOptions coarse, fine;
        coarse.abs_tol = coarse.rel_tol = tol;
        fine.abs_tol = fine.rel_tol = tol / 2;
        const auto tr = dynamics::restarted_trajectory(spec, prob.x0, coarse_pol, 100.0, coarse);
        for (const auto& seg : tr.segments) {
          if (seg.end != dynamics::SegmentEnd::speed_restart) continue;
          const auto again = dynamics::integrate_segment(spec, seg.start_state, fine_pol, 100.0, fine, gscale);
          worst_t = std::max(worst_t, std::abs(seg.end_time - again.end_time) / std::max(1.0, seg.end_time));
          worst_x = std::max(worst_x, (seg.last().x - again.last().x).norm() / std::max(1.0, seg.last().x.norm()));
          ++compared;
        }
      }
      o.require(compared > 0 && worst_t < 10 * tol && worst_x < 10 * tol,
                fmt::format("{}: {} segments, worst scaled change in T {:.2e}, in x(T) {:.2e} (limit {:.0e})", pr.name,
                            compared, worst_t, worst_x, 10 * tol));
    }
  });

  criterion(12, "determinism: rerun of criteria 7-10 reproduces the gap CSVs", 900.0, [](Outcome& o) {
    std::vector<std::pair<std::string, std::string>> second;
    auto add = [&second](const std::vector<std::pair<std::string, std::string>>& v) {
      second.insert(second.end(), v.begin(), v.end());
    };
    add(gap_csvs(continuous_quadratic()));
    add(gap_csvs(illposed_study(false)));
    add(gap_csvs(quadratic500_study()));
    add(gap_csvs(logsumexp_study(false)));
    add(gap_csvs(illposed_study(true)));
    add(gap_csvs(logsumexp_study(true)));
    add(gap_csvs(kernel_study("kernel-logistic", 2)));
    add(gap_csvs(kernel_study("kernel-multinomial", 3)));
    o.require(!first_run_csvs.empty() && second.size() == first_run_csvs.size(),
              fmt::format("{} CSVs from the first pass, {} from the rerun", first_run_csvs.size(), second.size()));
    if (second.size() != first_run_csvs.size()) return;
    const fs::path root = fs::temp_directory_path() / "esr_acceptance";
    fs::remove_all(root);
    const auto a = write_and_read(root / "first", first_run_csvs);
    const auto b = write_and_read(root / "second", second);
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == b[i])
        ++same;
      else
        o.require(false, fmt::format("{} differs", first_run_csvs[i].first));
    }
    o.require(same == a.size(), fmt::format("{} of {} files byte-identical apart from the timestamp line", same, a.size()));
  });

  std::cout << fmt::format("{} of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
