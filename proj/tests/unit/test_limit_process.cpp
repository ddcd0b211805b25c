#include <doctest.h>

#include <cmath>

#include "levymlmc/accumulator.hpp"
#include "levymlmc/errors.hpp"
#include "levymlmc/limit_process.hpp"
#include "models.hpp"

using namespace levymlmc;
using namespace testmodels;

TEST_CASE("upsilon squared") {
  CHECK(upsilon_sq({0.0, 2}) == 0.25);
  CHECK(upsilon_sq({1.0, 2}) == doctest::Approx(std::exp(-1.0) / 2.0).epsilon(1e-14));
  CHECK(std::abs(upsilon_sq({1e-9, 6}) - 0.5 * 5.0 / 6.0) < 1e-9);
  // Continuity across the series switch.
  CHECK(upsilon_sq({0.999999e-6, 4}) == doctest::Approx(upsilon_sq({1.000001e-6, 4})).epsilon(1e-10));
  CHECK_THROWS_AS(upsilon_sq({-1.0, 2}), DomainError);
}

TEST_CASE("mark sampler degenerates at theta zero") {
  RandomStream rng(3);
  auto marks = sample_marks(1.0, {0.0, 2}, 100000, rng);
  MomentAccumulator m2;
  for (const auto& mk : marks) {
    CHECK((mk.sigma_s_sq == 0.0 || mk.sigma_s_sq == 0.5));
    m2.add(mk.sigma_s_sq);
  }
  CHECK(std::abs(m2.mean() - 0.25) < 4 * m2.stderr_mean());
  marks = sample_marks(1.0, {0.0, 4}, 100000, rng);
  MomentAccumulator m4;
  for (const auto& mk : marks) m4.add(mk.sigma_s_sq);
  CHECK(std::abs(m4.mean() - 3.0 / 8.0) < 4 * m4.stderr_mean());
}

TEST_CASE("mark sampler mean matches upsilon") {
  RandomStream rng(4);
  const auto marks = sample_marks(2.0, {1.0, 2}, 1000000, rng);
  MomentAccumulator m;
  for (const auto& mk : marks) m.add(mk.sigma_s_sq / 4.0);
  CHECK(std::abs(m.mean() - upsilon_sq({1.0, 2})) < 4 * m.stderr_mean());
}

TEST_CASE("error process vanishes for constant coefficients") {
  const LevyTriplet y{0.1, 0.3, LevyMeasure::compound_poisson(2.0, {JumpDistribution::Kind::normal, 0.0, 0.3})};
  const auto lp = simulate_U(constant_model(0.7), y, {0.5, 2}, 1.0 / 64, 0.01, RandomStream(2));
  for (double u : lp.u) CHECK(u == 0.0);
}

TEST_CASE("error process is linear in its noise") {
  const LevyTriplet y = gbm_cp_driver();
  LimitOptions a;
  LimitOptions b;
  b.noise_scale = 2.5;
  const auto pa = simulate_U(gbm_model(), y, {0.5, 4}, 1.0 / 64, 0.01, RandomStream(6), a);
  const auto pb = simulate_U(gbm_model(), y, {0.5, 4}, 1.0 / 64, 0.01, RandomStream(6), b);
  REQUIRE(pa.u.size() == pb.u.size());
  for (std::size_t n = 0; n < pa.u.size(); ++n) {
    CHECK(pb.u[n] == doctest::Approx(2.5 * pa.u[n]).epsilon(1e-12));
  }
}

TEST_CASE("phi for geometric Brownian motion") {
  const auto x = simulate_level(gbm_model(), gbm_driver(), {1.0 / 128, 1.0, 1.0 / 128},
                                Scheme::idealised, RandomStream(8));
  const double xT = x.fine.terminal();
  CHECK(phi_formula(gbm_model(), gbm_driver(), x.fine, 1.0, 1.0) ==
        doctest::Approx(0.0016 * xT * xT).epsilon(1e-8));
  CHECK(phi_formula(gbm_model(), gbm_driver(), x.fine, 0.0, 1.0) == 0.0);
  CHECK(phi_formula(constant_model(1.0), gbm_driver(), x.fine, 0.5, 1.0) == 0.0);
}

TEST_CASE("second moment of U for geometric Brownian motion") {
  MomentAccumulator acc;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const auto lp = simulate_U(gbm_model(), gbm_driver(), {0.0, 2}, 1.0 / 256, 1.0, RandomStream(9, 1, i));
    acc.add(lp.u.back() * lp.u.back());
  }
  const double exact = 0.25 * 0.0016 * std::exp(0.14);
  CHECK(std::abs(acc.mean() - exact) < 0.05 * exact + 3 * acc.stderr_mean());
}

TEST_CASE("oracle methods") {
  const auto f = marginal_functional(1.0);
  for (auto m : {VarianceOracleResult::Method::limit_sde, VarianceOracleResult::Method::phi_formula}) {
    const auto r = rho_sq_oracle(constant_model(1.0), gbm_driver(), f, {0.0, 2}, m, 200, 1);
    CHECK(r.rho_sq == 0.0);
  }
  const auto phi = rho_sq_oracle(gbm_model(), gbm_driver(), f, {0.0, 2},
                                 VarianceOracleResult::Method::phi_formula, 20000, 2);
  const double exact = 0.25 * 0.0016 * std::exp(0.14);
  CHECK(std::abs(phi.rho_sq - exact) < 4 * phi.mc_stderr);
  CHECK_THROWS_AS(rho_sq_oracle(gbm_model(), {0.0, 0.0, stable01()}, f, {0.0, 2},
                                VarianceOracleResult::Method::limit_sde, 10, 1),
                  DomainError);
  CHECK_THROWS_AS(rho_sq_oracle(gbm_model(), gbm_driver(), f, {0.0, 2},
                                VarianceOracleResult::Method::level_empirical, 10, 1),
                  ConfigError);
}

TEST_CASE("default simulation threshold") {
  const LevyTriplet y{0.0, 0.2, stable01()};
  const double h = default_h_sim(y);
  CHECK(stable01().truncated_second_moment(h) <= 1e-4 * (0.04 + stable01().second_moment()) * (1 + 1e-12));
  CHECK(stable01().truncated_second_moment(h * 1.01) > 1e-4 * (0.04 + stable01().second_moment()));
}
