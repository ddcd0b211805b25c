#include <doctest.h>

#include <cmath>

#include "levymlmc/errors.hpp"
#include "levymlmc/mlmc_engine.hpp"
#include "models.hpp"

using namespace levymlmc;
using namespace testmodels;

TEST_CASE("schedules") {
  const auto s = make_schedule(gbm_driver(), 2, 1.0, 0.0, 6, {});
  for (int k = 1; k <= 6; ++k) CHECK(s.level(k).eps == std::ldexp(1.0, -k));

  ScheduleStrategy tm;
  tm.kind = ScheduleStrategy::Kind::theta_matched;
  const LevyTriplet st{0.0, 0.2, stable01()};
  const auto t = make_schedule(st, 2, 1.0, 0.4, 8, tm);
  CHECK(t.level(1).h == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
  for (int k = 1; k <= 8; ++k) {
    CHECK(stable01().tail_mass(t.level(k).h) * t.level(k).eps == doctest::Approx(0.4).epsilon(1e-12));
  }

  const LevyTriplet cp{0.0, 0.2, LevyMeasure::compound_poisson(2.0, {JumpDistribution::Kind::constant, 1.0, 0.0})};
  CHECK_THROWS_AS(make_schedule(cp, 2, 2.0, 2.5, 1, tm), InfeasibleScheduleError);
  CHECK_THROWS_AS(make_schedule(st, 2, 1.0, 0.0, 3, tm), ConfigError);
  CHECK_THROWS_AS(make_schedule(gbm_driver(), 1, 1.0, 0.0, 3, {}), DomainError);
}

TEST_CASE("schedule diagnostics") {
  auto d = validate_schedule(make_schedule(gbm_driver(), 2, 1.0, 0.0, 6, {}), gbm_driver());
  CHECK(d.clean());
  for (const auto& l : d.levels) {
    CHECK(l.r2 == 0.0);
    CHECK(l.r3a == 0.0);
    CHECK(l.r4 == 0.0);
  }
  const LevyTriplet st{0.0, 0.2, stable01()};
  ScheduleStrategy tm;
  tm.kind = ScheduleStrategy::Kind::theta_matched;
  d = validate_schedule(make_schedule(st, 2, 1.0, 0.4, 8, tm), st);
  for (const auto& l : d.levels) CHECK(l.r2 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(d.clean());

  ScheduleStrategy bad;
  bad.gamma = 0.4;
  d = validate_schedule(make_schedule(st, 2, 1.0, 0.0, 8, bad), st);
  CHECK_FALSE(d.clean());
  CHECK(std::find(d.flagged.begin(), d.flagged.end(), "r_h") != d.flagged.end());
}

TEST_CASE("replication plans") {
  auto p = make_plan(0.1, 1.0, 2, 1.0);
  CHECK(p.L == 4);
  CHECK(p.n == std::vector<std::int64_t>{400, 200, 100, 50});
  CHECK(make_plan(0.1, 0.5, 2, 1.0).L == 7);
  p = make_plan(0.99, 1.0, 2, 1.0);
  CHECK(p.L == 1);
  CHECK(p.n[0] == 2);
  CHECK_THROWS_AS(make_plan(1.5, 1.0, 2, 1.0), DomainError);
}

TEST_CASE("estimator on degenerate and closed-form models") {
  const auto f = marginal_functional(1.0);
  const LevyTriplet st{0.1, 0.3, stable01()};
  const auto s = make_schedule(st, 2, 1.0, 0.0, 6, {});
  const auto plan = make_plan(0.1, 1.0, 2, 1.0);
  const auto e = run_estimator(constant_model(0.0), st, f, s, plan, Scheme::shot_continuous, 1);
  CHECK(e.value == 1.0);
  for (const auto& l : e.levels) CHECK(l.variance() == 0.0);

  const auto g = make_schedule(gbm_driver(), 2, 1.0, 0.0, 8, {});
  const auto est = run_estimator(gbm_model(), gbm_driver(), f, g, make_plan(0.02, 1.0, 2, 1.0),
                                 Scheme::idealised, 5);
  CHECK(std::abs(est.value - std::exp(0.05)) < 3 * est.stderr_);

  ScheduleStrategy pw;
  pw.h_scale = 0.05;
  const LevyTriplet cp = gbm_cp_driver(0.0);
  const auto c = make_schedule(cp, 2, 1.0, 0.0, 8, pw);
  const auto est2 = run_estimator(gbm_model(), cp, f, c, make_plan(0.02, 1.0, 2, 1.0),
                                  Scheme::shot_continuous, 6);
  CHECK(std::abs(est2.value - 1.0) < 3 * est2.stderr_);
}

TEST_CASE("worker count does not change results") {
  const auto f = marginal_functional(1.0);
  const LevyTriplet cp = gbm_cp_driver();
  ScheduleStrategy pw;
  pw.h_scale = 0.05;
  const auto s = make_schedule(cp, 2, 1.0, 0.0, 8, pw);
  const auto plan = make_plan(0.05, 1.0, 2, 1.0);
  EngineOptions o;
  o.block_size = 64;
  const auto serial = run_estimator(gbm_model(), cp, f, s, plan, Scheme::direct_continuous, 9, o);
  WorkerPool pool(3);
  o.pool = &pool;
  const auto par = run_estimator(gbm_model(), cp, f, s, plan, Scheme::direct_continuous, 9, o);
  CHECK(serial.value == par.value);
  CHECK(serial.stderr_ == par.stderr_);
}

TEST_CASE("level profile") {
  const auto f = marginal_functional(1.0);
  const LevyTriplet st{0.0, 0.2, stable01()};
  const auto s = make_schedule(st, 2, 1.0, 0.0, 6, {});
  const auto prof = level_profile(constant_model(0.0), st, f, s, Scheme::shot_constant, 100, 1, 2, 5);
  CHECK(prof.size() == 4);
  for (const auto& l : prof) CHECK(l.variance() == 0.0);
  CHECK_THROWS_AS(level_profile(gbm_model(), st, f, s, Scheme::shot_constant, 100, 1, 2, 9), ConfigError);
}
