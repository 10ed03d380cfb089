#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "esr/discrete.hpp"
#include "esr/problems.hpp"
#include "esr/rng.hpp"

using namespace esr;
using namespace esr::discrete;

namespace {

Objective half_square_1d() {
  QuadraticSpec s{Matrix::Identity(1, 1), Vector::Zero(1), Vector::Ones(1)};
  return make_quadratic(s, "half_square");
}

AlgoConfig config(double lambda, RestartRule rule, std::size_t n) {
  AlgoConfig c;
  c.lambda = lambda;
  c.restart = rule;
  c.iterations = n;
  return c;
}

}  // namespace

TEST_CASE("igahd_step by hand") {
  AlgoConfig c;
  c.beta = 0.0;
  c.step = 1.0;
  const Objective obj = half_square_1d();
  CHECK(igahd_step(obj, Vector::Ones(1), Vector::Zero(1), 1, c)[0] == doctest::Approx(0.0));

  // equal iterates: plain gradient step
  const Objective ill = make_illposed_quadratic(10);
  AlgoConfig d;
  const Vector x = Vector{{1.0, -2.0, 0.5}};
  const double h = 0.1;
  CHECK((igahd_step(ill, x, x, 4, d) - (x - h * h * ill.gradient(x))).norm() <= 1e-15);
  // minimizer is a fixed point
  CHECK(igahd_step(ill, Vector::Zero(3), Vector::Zero(3), 1, d).norm() == 0.0);
  CHECK_THROWS_AS(igahd_step(ill, x, x, 0, d), std::invalid_argument);
}

TEST_CASE("restart criterion") {
  AlgoConfig c;
  c.alpha = 3;
  c.lambda = 0.0;
  CHECK(restart_criterion(0.9, 1.0, 5, c));
  CHECK_FALSE(restart_criterion(1.0, 1.0, 5, c));  // strict
  c.lambda = 1.0 / 6.0;
  CHECK_FALSE(restart_criterion(0.0, 1.0, 1, c));  // factor 0 at j = 1
  CHECK(restart_criterion(0.49, 1.0, 2, c));
  CHECK_FALSE(restart_criterion(0.51, 1.0, 2, c));
  CHECK_THROWS_AS(restart_criterion(0.1, 1.0, 0, c), std::invalid_argument);
}

TEST_CASE("config validation and defaults") {
  const Objective ill = make_illposed_quadratic(10);
  AlgoConfig c;
  CHECK(c.resolved_beta(ill) == doctest::Approx(0.1));
  CHECK(c.resolved_step(ill) == doctest::Approx(0.1));
  CHECK_NOTHROW(config(0.1667, RestartRule::extended_speed, 10).validate());
  CHECK_THROWS_AS(config(0.2, RestartRule::extended_speed, 10).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(0.0, RestartRule::none, 1).validate(), std::invalid_argument);
  AlgoConfig a = config(0.0, RestartRule::none, 10);
  a.alpha = 0.5;
  CHECK_THROWS_AS(a.validate(), std::invalid_argument);
}

TEST_CASE("restart = none matches a hand-written IGAHD loop") {
  Rng rng(11);
  const Objective obj = make_random_quadratic(8, 0.05, 1.0, rng);
  const Vector x0 = rng.normal_vector(8);
  const IterateLog log = run_algorithm1(obj, x0, config(0.0, RestartRule::none, 60));
  const double b = 1 / std::sqrt(obj.lipschitz()), h = b;
  Vector xm = x0, x = x0;
  REQUIRE(log.records.size() == 61);
  for (int k = 1; k <= 60; ++k) {
    const Vector y = x + (1.0 - 3.0 / (k + 3.0)) * (x - xm) - b * h * (obj.gradient(x) - obj.gradient(xm));
    xm = x;
    x = y - h * h * obj.gradient(y);
    CHECK(log.records[k].value == doctest::Approx(obj.value(x)).epsilon(1e-13));
    CHECK(log.records[k].j == k + 1);
    CHECK_FALSE(log.records[k].restarted);
  }
}

TEST_CASE("j discipline, gap column and gradient budget") {
  const Objective ill = make_illposed_quadratic(10);
  for (RestartRule rule : {RestartRule::extended_speed, RestartRule::function_value}) {
    const IterateLog log = run_algorithm1(ill, Vector::Ones(3), config(1.0 / 12, rule, 300));
    std::size_t resets = 0;
    for (std::size_t i = 1; i < log.records.size(); ++i) {
      const auto& r = log.records[i];
      CHECK(r.j >= 1);
      if (r.restarted) {
        CHECK(r.j == 1);
        ++resets;
      } else {
        CHECK(r.j == log.records[i - 1].j + 1);
      }
      REQUIRE(r.gap.has_value());
      CHECK(*r.gap == doctest::Approx(r.value - 0.0));
    }
    CHECK(resets == log.restart_count());
    CHECK(resets > 0);
    CHECK(log.gradient_evaluations <= 2 * log.config.iterations + 1);
    CHECK(log.gradient_evaluations == 2 * (log.records.size() - 1) + 1);
  }
  // No reference: no gap column.
  Objective bare("bare", 2, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
                 [](const Vector& x) { return Vector(x); }, 1.0);
  const IterateLog nolog = run_algorithm1(bare, Vector::Ones(2), config(0, RestartRule::none, 5));
  CHECK_FALSE(nolog.records.back().gap.has_value());
  CHECK_THROWS(nolog.gap_series());
}

TEST_CASE("lambda = 1/(2 alpha) never restarts at j = 1") {
  const Objective ill = make_illposed_quadratic(10);
  const IterateLog log = run_algorithm1(ill, Vector::Ones(3), config(1.0 / 6, RestartRule::extended_speed, 400));
  for (std::size_t i = 1; i < log.records.size(); ++i)
    if (log.records[i].restarted) CHECK(log.records[i - 1].j >= 2);
}

TEST_CASE("min_restart_interval suppresses early restarts") {
  const Objective ill = make_illposed_quadratic(10);
  AlgoConfig c = config(0.0, RestartRule::extended_speed, 400);
  c.min_restart_interval = 10;
  const IterateLog log = run_algorithm1(ill, Vector::Ones(3), c);
  for (std::size_t i = 1; i < log.records.size(); ++i)
    if (log.records[i].restarted) CHECK(log.records[i - 1].j >= 10);
}

TEST_CASE("determinism") {
  Rng r1(5), r2(5);
  const Objective a = make_logsumexp(20, 50, 10.0, r1);
  const Objective b = make_logsumexp(20, 50, 10.0, r2);
  const Vector x0 = r1.normal_vector(20);
  const Vector y0 = r2.normal_vector(20);
  const IterateLog la = run_algorithm1(a, x0, config(1.0 / 12, RestartRule::extended_speed, 300));
  const IterateLog lb = run_algorithm1(b, y0, config(1.0 / 12, RestartRule::extended_speed, 300));
  REQUIRE(la.records.size() == lb.records.size());
  for (std::size_t i = 0; i < la.records.size(); ++i) CHECK(la.records[i].value == lb.records[i].value);
}

TEST_CASE("extended speed drives the gap to roundoff on a strongly convex problem") {
  const Objective ill = make_illposed_quadratic(10);
  const IterateLog log = run_algorithm1(ill, Vector::Ones(3), config(1.0 / 6, RestartRule::extended_speed, 2000));
  CHECK(*log.records.back().gap < 1e-14);
  CHECK(log.records.size() < 2001);  // early exit at the gap tolerance
}

TEST_CASE("warm start") {
  const Objective ill = make_illposed_quadratic(10);
  AlgoConfig c = config(1.0 / 6, RestartRule::extended_speed, 300);
  c.warm_start = true;
  const IterateLog log = run(ill, Vector::Ones(3), c);
  CHECK(log.notes.empty());
  std::size_t switch_at = 0;
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    CHECK(log.records[i].phase >= log.records[i - 1].phase);
    if (log.records[i].phase == 2 && log.records[i - 1].phase == 1) switch_at = i;
  }
  REQUIRE(switch_at > 1);
  // the trigger iterate: phi did not decrease
  CHECK(log.records[switch_at - 1].restarted);
  CHECK(log.records[switch_at - 1].value >= log.records[switch_at - 2].value);
  // phase 2 starts with fresh momentum
  CHECK(log.records[switch_at].j == 2);

  // Phase 2 is an extended-speed run from the warm point.
  Vector xw;
  {
    AlgoConfig fvc = config(0, RestartRule::function_value, switch_at - 1);
    xw = run_algorithm1(ill, Vector::Ones(3), fvc).final_iterate();
  }
  const IterateLog tail = run_algorithm1(ill, xw, config(1.0 / 6, RestartRule::extended_speed, 20));
  for (std::size_t i = 0; i <= 20 && switch_at - 1 + i < log.records.size(); ++i)
    CHECK(log.records[switch_at - 1 + i].value == doctest::Approx(tail.records[i].value).epsilon(1e-14));

  AlgoConfig never = c;
  never.warm_phase_limit = 0;
  const IterateLog nt = run(ill, Vector::Ones(3), never);
  REQUIRE(nt.notes.size() == 1);
  CHECK(nt.notes[0] == "no-warm-trigger");
  CHECK(nt.records.size() == 301);

  const IterateLog conv = run(ill, Vector::Zero(3), c);
  CHECK(conv.records.size() == 1);
}

TEST_CASE("divergence is reported with the step") {
  const Objective ill = make_illposed_quadratic(10);
  AlgoConfig c = config(0, RestartRule::none, 2000);
  c.step = 1.0;  // far beyond 1/sqrt(L)
  try {
    run_algorithm1(ill, Vector::Ones(3), c);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() > 1);
    CHECK(e.last_finite_state().allFinite());
  }
}
