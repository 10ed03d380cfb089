#include "esr/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace esr::analysis {

RateFit fit_linear_rate(const std::vector<std::pair<double, double>>& series, double gap_floor, double burn_in) {
  if (!(gap_floor > 0.0)) throw std::invalid_argument("fit_linear_rate: gap_floor must be positive");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw std::invalid_argument("fit_linear_rate: burn_in must be in [0, 1)");
  std::vector<std::pair<double, double>> pts;
  for (const auto& [s, gap] : series)
    if (gap > gap_floor && std::isfinite(gap) && std::isfinite(s)) pts.emplace_back(s, std::log(gap));
  const auto drop = static_cast<std::size_t>(std::floor(burn_in * static_cast<double>(pts.size())));
  pts.erase(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(drop));
  if (pts.size() < 10)
    throw InsufficientDataError(fmt::format("fit_linear_rate: {} usable points, need at least 10", pts.size()));

  const double n = static_cast<double>(pts.size());
  double ms = 0.0, my = 0.0;
  for (const auto& [s, y] : pts) {
    ms += s;
    my += y;
  }
  ms /= n;
  my /= n;
  double sss = 0.0, ssy = 0.0, syy = 0.0;
  for (const auto& [s, y] : pts) {
    sss += (s - ms) * (s - ms);
    ssy += (s - ms) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sss > 0.0)) throw InsufficientDataError("fit_linear_rate: all abscissae coincide");
  const double slope = ssy / sss;
  const double intercept = my - slope * ms;
  double ss_res = 0.0;
  for (const auto& [s, y] : pts) {
    const double r = y - (intercept + slope * s);
    ss_res += r * r;
  }

  RateFit fit;
  fit.a_coef = std::exp(intercept);
  fit.b_coef = -slope;
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 0.0;
  fit.fit_range = {pts.front().first, pts.back().first};
  fit.n_points = pts.size();
  return fit;
}

ReferenceResult reference_min(const Objective& obj, const Vector& x0, std::size_t budget,
                              const discrete::AlgoConfig& base, bool use_closed_form) {
  ReferenceResult out;
  if (use_closed_form && obj.reference_value()) {
    out.value = *obj.reference_value();
    out.closed_form = true;
    return out;
  }
  if (budget < 20) throw std::invalid_argument("reference_min: budget too small");
  discrete::AlgoConfig cfg = base;
  cfg.lambda = 1.0 / (2.0 * cfg.alpha);
  cfg.restart = discrete::RestartRule::extended_speed;
  cfg.warm_start = false;
  cfg.min_restart_interval = 1;
  cfg.iterations = budget;
  // Run without a reference so the gap tolerance never stops the search.
  const discrete::IterateLog log = discrete::run_algorithm1(
      Objective(obj.name(), obj.dim(), [&obj](const Vector& x) { return obj.value(x); },
                [&obj](const Vector& x) { return obj.gradient(x); }, obj.lipschitz()),
      x0, cfg);
  double best = log.records.front().value;
  for (const auto& r : log.records) best = std::min(best, r.value);
  out.value = best;
  out.iterations = budget;

  // Compare the improvement over the last tenth of the budget to the tenth
  // before it: a converging run flattens, an unbounded one keeps going.
  const std::size_t w = std::max<std::size_t>(budget / 10, 1);
  const std::size_t last = log.records.size() - 1;
  const double late = log.records[last - w].value - log.records[last].value;
  const double early = log.records[last - 2 * w].value - log.records[last - w].value;
  const double scale = std::max(1.0, std::abs(best));
  out.unbounded_suspect = late > 1e-9 * scale && late >= 0.5 * early;
  return out;
}

SeriesSummary summarize(const discrete::IterateLog& log, std::string problem, std::string label, double gap_floor,
                        double burn_in) {
  if (!log.phi_star) throw std::invalid_argument("summarize: log has no reference value");
  SeriesSummary s;
  s.problem = std::move(problem);
  s.policy = std::string(log.config.warm_start ? "warm-" : "") + std::string(discrete::to_string(log.config.restart));
  s.lambda = log.config.lambda;
  s.label = std::move(label);
  s.phi_star = *log.phi_star;
  s.fit = fit_linear_rate(log.gap_series(), gap_floor, burn_in);
  return s;
}

SeriesSummary summarize(const dynamics::RestartedTrajectory& traj, double phi_star, std::string problem,
                        std::string label, double gap_floor, double burn_in) {
  SeriesSummary s;
  s.problem = std::move(problem);
  s.policy = std::string(dynamics::to_string(traj.policy.kind));
  s.lambda = traj.policy.lambda;
  s.label = std::move(label);
  s.phi_star = phi_star;
  s.fit = fit_linear_rate(dynamics::gap_series(traj, phi_star), gap_floor, burn_in);
  return s;
}

Table make_table(std::vector<SeriesSummary> columns) {
  if (columns.empty()) throw std::invalid_argument("make_table: no series");
  const auto& ref = columns.front();
  for (const auto& c : columns) {
    if (c.problem != ref.problem)
      throw std::invalid_argument(fmt::format("make_table: mixed problems '{}' and '{}'", ref.problem, c.problem));
    if (std::abs(c.phi_star - ref.phi_star) > 1e-12 * std::max(1.0, std::abs(ref.phi_star)))
      throw std::invalid_argument(
          fmt::format("make_table: reference values differ ({:.17g} vs {:.17g})", ref.phi_star, c.phi_star));
  }
  return Table{std::move(columns)};
}

std::string Table::csv() const {
  std::string out = "problem,policy,lambda,A,B,R2,n_points\n";
  for (const auto& c : columns)
    out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", c.problem, c.policy, c.lambda, c.fit.a_coef,
                       c.fit.b_coef, c.fit.r_squared, c.fit.n_points);
  return out;
}

std::string Table::text() const {
  std::vector<std::string> head{columns.empty() ? "" : columns.front().problem};
  std::vector<std::string> a{"A"}, b{"B"}, r2{"R2"};
  for (const auto& c : columns) {
    head.push_back(c.label.empty() ? fmt::format("{} {:.4g}", c.policy, c.lambda) : c.label);
    a.push_back(fmt::format("{:.3e}", c.fit.a_coef));
    b.push_back(fmt::format("{:.3e}", c.fit.b_coef));
    r2.push_back(fmt::format("{:.4f}", c.fit.r_squared));
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto* row : {&head, &a, &b, &r2})
    for (std::size_t i = 0; i < row->size(); ++i) width[i] = std::max(width[i], (*row)[i].size());
  std::string out;
  for (const auto* row : {&head, &a, &b, &r2}) {
    for (std::size_t i = 0; i < row->size(); ++i) {
      if (i == 0)
        out += fmt::format("{:<{}}", (*row)[i], width[i]);
      else
        out += fmt::format("  {:>{}}", (*row)[i], width[i]);
    }
    out += '\n';
  }
  return out;
}

void write_long_csv(std::ostream& out,
                    const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series) {
  out << "series_id,k_or_t,gap\n";
  for (const auto& [id, pts] : series)
    for (const auto& [s, gap] : pts) out << fmt::format("{},{:.17g},{:.17g}\n", id, s, gap);
}

}  // namespace esr::analysis
