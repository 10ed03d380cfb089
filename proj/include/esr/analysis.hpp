#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "esr/discrete.hpp"
#include "esr/dynamics.hpp"
#include "esr/objective.hpp"

namespace esr::analysis {

/// Thrown when a fit has too few usable points.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// gap ~ A exp(-B s) over the fit window [first, last].
struct RateFit {
  double a_coef = 0.0;
  double b_coef = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> fit_range{0.0, 0.0};
  std::size_t n_points = 0;
};

inline constexpr double kDefaultGapFloor = 1e-13;
inline constexpr double kDefaultBurnIn = 0.1;

/// OLS of log(gap) on s, using points with gap > gap_floor after dropping the
/// first floor(burn_in * count) of them. R^2 is 0 for a flat series.
RateFit fit_linear_rate(const std::vector<std::pair<double, double>>& series, double gap_floor = kDefaultGapFloor,
                        double burn_in = kDefaultBurnIn);

struct ReferenceResult {
  double value = 0.0;
  bool closed_form = false;
  /// The value was still falling at an undiminished pace at the end of the budget.
  bool unbounded_suspect = false;
  std::size_t iterations = 0;
};

/// Closed-form phi(x*) when the objective carries one (and use_closed_form),
/// otherwise the best value of an extended-speed run at lambda = 1/(2 alpha).
ReferenceResult reference_min(const Objective& obj, const Vector& x0, std::size_t budget,
                              const discrete::AlgoConfig& base = {}, bool use_closed_form = true);

/// One (A, B) column of a report.
struct SeriesSummary {
  std::string problem;
  std::string policy;
  double lambda = 0.0;
  std::string label;  // column header, e.g. "1/4a" or "warm-extended"
  double phi_star = 0.0;
  RateFit fit;
};

SeriesSummary summarize(const discrete::IterateLog& log, std::string problem, std::string label,
                        double gap_floor = kDefaultGapFloor, double burn_in = kDefaultBurnIn);
SeriesSummary summarize(const dynamics::RestartedTrajectory& traj, double phi_star, std::string problem,
                        std::string label, double gap_floor = kDefaultGapFloor, double burn_in = kDefaultBurnIn);

struct Table {
  std::vector<SeriesSummary> columns;

  /// problem,policy,lambda,A,B,R2,n_points
  std::string csv() const;
  /// Rows A / B / R2, one column per series.
  std::string text() const;
};

/// Throws std::invalid_argument when the series disagree on the problem or
/// reference value.
Table make_table(std::vector<SeriesSummary> columns);

/// series_id,k_or_t,gap
void write_long_csv(std::ostream& out,
                    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series);

}  // namespace esr::analysis
