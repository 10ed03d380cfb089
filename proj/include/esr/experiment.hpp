#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esr/analysis.hpp"
#include "esr/discrete.hpp"
#include "esr/dynamics.hpp"
#include "esr/objective.hpp"

// Benchmark presets and series runners shared by the CLI and the acceptance suite.
namespace esr::experiment {

struct ProblemConfig {
  std::string problem = "illposed";  // illposed | quadratic | logsumexp | kernel-logistic | kernel-multinomial
  double rho = 10.0;
  Index n = 40;
  Index m = 20;
  Index d = 50;
  int q = 2;
  double theta = 1e-4;
  double eig_low = 0.0;
  double eig_high = 1.0;
  std::uint64_t seed = 7;
  /// Log-sum-exp: take (n, m) literally as (dimension, terms). By default the
  /// smaller of the two is the dimension so the function is bounded below.
  bool literal_lse_shape = false;
  /// default | ones | zeros | gaussian. The gaussian draw (also the default for
  /// quadratic and logsumexp) comes after the problem data.
  std::string start = "default";
};

struct Problem {
  std::string id;
  Objective objective;
  Vector x0;
};

/// Draw order from Rng(seed): problem data first, then the random x0.
/// Default x0 is all-ones for illposed and zeros for the kernel problems.
/// illposed with rho == 1 is the identity quadratic on R^3.
Problem make_problem(const ProblemConfig& cfg);

/// Fit floor for a study: the default 1e-13, raised to 1e-12 |phi*| when the
/// optimal value is large enough that the gaps hit roundoff earlier.
double effective_gap_floor(double phi_star);

/// Lambda column: label as typed ("1/4a") and the resolved value.
struct LambdaSpec {
  std::string label;
  double value = 0.0;
};

/// Comma-separated list of numbers or the symbols 1/4a and 1/2a (resolved
/// against alpha). Throws std::invalid_argument on bad tokens.
std::vector<LambdaSpec> parse_lambdas(const std::string& list, double alpha);

// --------------------------------------------------------------------------
// Discrete studies (Tables 2-3 shape)
// --------------------------------------------------------------------------

struct DiscreteStudyConfig {
  discrete::AlgoConfig algo;  // lambda / warm_start are overridden per series
  std::vector<LambdaSpec> lambdas;
  /// Add a warm-started run next to every lambda.
  bool warm = false;
  /// Momentum-counter guard used for the lambda = 0 series only.
  int speed_min_restart_interval = 10;
  /// Reference runs use this many times N iterations.
  std::size_t reference_factor = 10;
};

struct DiscreteSeries {
  std::string label;
  discrete::IterateLog log;
};

struct DiscreteStudy {
  std::string problem;
  analysis::ReferenceResult reference;
  double phi_star = 0.0;
  std::vector<DiscreteSeries> runs;
  analysis::Table table;
};

/// phi* is the closed form when known, else min(reference run, every series).
DiscreteStudy run_discrete_study(const Problem& problem, const DiscreteStudyConfig& cfg);

/// Config for one series of a study (what run_discrete_study uses).
discrete::AlgoConfig series_config(const DiscreteStudyConfig& cfg, double lambda, bool warm);

// --------------------------------------------------------------------------
// Continuous studies (Table 1 shape)
// --------------------------------------------------------------------------

struct ContinuousStudyConfig {
  double alpha = 3.0;
  double beta = 1.0;
  dynamics::Variant variant = dynamics::Variant::din_avd;
  double gamma = 1.0;
  dynamics::RestartKind kind = dynamics::RestartKind::extended_speed;
  std::vector<LambdaSpec> lambdas;
  double horizon = 200.0;
  double event_tol = 1e-9;
  dynamics::IntegratorOptions integrator;
  /// Iteration budget for the discrete reference of non-quadratics.
  std::size_t reference_budget = 20000;
};

struct ContinuousSeries {
  std::string label;
  dynamics::RestartedTrajectory traj;
};

struct ContinuousStudy {
  std::string problem;
  double phi_star = 0.0;
  std::vector<ContinuousSeries> runs;
  analysis::Table table;
};

ContinuousStudy run_continuous_study(const Problem& problem, const ContinuousStudyConfig& cfg);

// --------------------------------------------------------------------------
// CSV renderings (deterministic bytes; no timestamp)
// --------------------------------------------------------------------------

/// k,fval,gap,delta_sq,j,restarted,phase
std::string discrete_csv(const discrete::IterateLog& log, double phi_star);
/// t,fval,gap,speed2,segment_index
std::string continuous_samples_csv(const dynamics::RestartedTrajectory& traj, double phi_star);
/// k,T_k,gap_at_restart
std::string restart_times_csv(const dynamics::RestartedTrajectory& traj, double phi_star);

}  // namespace esr::experiment
