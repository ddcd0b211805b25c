#include <doctest.h>

#include <cmath>

#include "levymlmc/accumulator.hpp"
#include "levymlmc/errors.hpp"
#include "levymlmc/path_schemes.hpp"
#include "levymlmc/stats_harness.hpp"
#include "models.hpp"

using namespace levymlmc;
using namespace testmodels;

namespace {

const Scheme kAllSchemes[] = {Scheme::idealised, Scheme::direct_continuous, Scheme::direct_constant,
                              Scheme::shot_continuous, Scheme::shot_constant};

CoupledParams pair_params(double eps_c, double h_c, double eps_f, double h_f) {
  return {{eps_c, h_c, eps_c}, {eps_f, h_f, eps_f}};
}

}  // namespace

TEST_CASE("pure grid timeline") {
  RandomStream rng(1);
  const auto tl = build_timeline(gbm_driver(), pair_params(0.5, 1, 0.25, 1), 1.0, rng);
  REQUIRE(tl.size() == 5);
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(tl.times[n] == 0.25 * n);
    CHECK(tl.has_tag(n, timeline_tag::fine_grid));
    CHECK(tl.has_tag(n, timeline_tag::coarse_grid) == (n % 2 == 0));
  }
}

TEST_CASE("jumps above both thresholds are big on both levels") {
  const LevyTriplet y{0.0, 0.1,
                      LevyMeasure::compound_poisson(2.0, {JumpDistribution::Kind::constant, 1.0, 0.0})};
  for (std::uint64_t s = 0; s < 50; ++s) {
    RandomStream rng(s);
    const auto tl = build_timeline(y, pair_params(0.5, 0.5, 0.25, 0.5), 1.0, rng);
    for (std::size_t n = 0; n < tl.size(); ++n) {
      if (tl.jump_sizes[n] != 0.0) {
        CHECK(tl.has_tag(n, timeline_tag::big_jump_fine));
        CHECK(tl.has_tag(n, timeline_tag::big_jump_coarse));
      }
    }
  }
}

TEST_CASE("fine-only big jumps follow Poisson thinning") {
  const LevyTriplet y{0.0, 0.1, stable01()};
  const double h_c = 0.2;
  const double h_f = 0.05;
  MomentAccumulator count;
  for (std::uint64_t s = 0; s < 100000; ++s) {
    RandomStream rng(s, 99);
    const auto tl = build_timeline(y, pair_params(0.5, h_c, 0.25, h_f), 1.0, rng);
    int c = 0;
    for (std::size_t n = 0; n < tl.size(); ++n) {
      if (tl.has_tag(n, timeline_tag::big_jump_fine) && !tl.has_tag(n, timeline_tag::big_jump_coarse)) ++c;
    }
    count.add(c);
  }
  const double expected = stable01().tail_mass(h_f) - stable01().tail_mass(h_c);
  CHECK(std::abs(count.mean() - expected) < 3 * count.stderr_mean());
}

TEST_CASE("zero coefficient keeps the path constant") {
  const LevyTriplet y{0.3, 0.5, stable01()};
  for (Scheme s : kAllSchemes) {
    if (s == Scheme::idealised) continue;
    const auto p = simulate_coupled(constant_model(0.0), y, pair_params(0.5, 0.2, 0.25, 0.1), s,
                                    RandomStream(3));
    for (double v : p.fine.post) CHECK(v == 1.0);
    for (double v : p.coarse->post) CHECK(v == 1.0);
  }
  const LevyTriplet cp = gbm_cp_driver();
  const auto p = simulate_coupled(constant_model(0.0), cp, pair_params(0.5, 0.2, 0.25, 0.1),
                                  Scheme::idealised, RandomStream(3));
  for (double v : p.fine.post) CHECK(v == 1.0);
}

TEST_CASE("continuous driver reduces to the Euler recursion") {
  const auto p = simulate_level(gbm_model(), gbm_driver(), {1.0 / 16, 1.0, 1.0 / 16},
                                Scheme::idealised, RandomStream(8));
  REQUIRE(p.fine.size() == 17);
  MomentAccumulator dw;
  for (std::size_t n = 1; n < p.fine.size(); ++n) {
    CHECK(p.fine.post[n] == doctest::Approx(p.fine.post[n - 1] * (1.0 + p.fine.cont[n])).epsilon(1e-14));
    CHECK(p.fine.jump[n] == 0.0);
  }
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const auto q = simulate_level(gbm_model(), gbm_driver(), {0.25, 1.0, 0.25}, Scheme::idealised,
                                  RandomStream(8, 0, i));
    dw.add(q.fine.cont[1]);
  }
  CHECK(std::abs(dw.mean() - 0.05 * 0.25) < 4 * dw.stderr_mean());
  CHECK(std::abs(dw.variance() - 0.04 * 0.25) < 4 * dw.stderr_variance());
}

TEST_CASE("terminal mean approaches the exact solution") {
  MomentAccumulator acc;
  for (std::uint64_t i = 0; i < 200000; ++i) {
    const auto p = simulate_level(gbm_model(), gbm_driver(), {1.0 / 256, 1.0, 1.0 / 256},
                                  Scheme::idealised, RandomStream(21, 0, i));
    acc.add(p.fine.terminal());
  }
  CHECK(std::abs(acc.mean() - std::exp(0.05)) < 3 * acc.stderr_mean());
}

TEST_CASE("fine path alone equals fine path in a pair") {
  const LevyTriplet stable{0.1, 0.2, stable01()};
  const LevyTriplet cp = gbm_cp_driver();
  for (Scheme s : kAllSchemes) {
    const LevyTriplet& y = s == Scheme::idealised ? cp : stable;
    const CoupledParams cpar{{0.25, 0.2, 0.5}, {0.125, 0.05, 0.25}};
    SimulationOptions opts;
    opts.track_extremes = true;
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto pair = simulate_coupled(gbm_model(), y, cpar, s, RandomStream(4, 2, i), opts);
      const auto alone = simulate_level(gbm_model(), y, cpar.fine, s, RandomStream(4, 2, i), opts);
      CHECK(pair.fine.times == alone.fine.times);
      CHECK(pair.fine.post == alone.fine.post);
      CHECK(pair.fine.interval_sup == alone.fine.interval_sup);
    }
  }
}

TEST_CASE("coarse partner has the law of the coarse level alone") {
  const LevyTriplet stable{0.1, 0.2, stable01()};
  const LevyTriplet cp = gbm_cp_driver();
  for (Scheme s : kAllSchemes) {
    CAPTURE(to_string(s));
    const LevyTriplet& y = s == Scheme::idealised ? cp : stable;
    const CoupledParams cpar{{0.25, 0.1, 0.5}, {0.125, 0.05, 0.25}};
    std::vector<double> in_pair, alone;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      in_pair.push_back(
          simulate_coupled(gbm_model(), y, cpar, s, RandomStream(6, 1, i)).coarse->terminal());
      alone.push_back(simulate_level(gbm_model(), y, cpar.coarse, s, RandomStream(6, 2, i)).fine.terminal());
    }
    CHECK(two_sample_ks(in_pair, alone).p_value > 0.001);
  }
}

TEST_CASE("replay marginal") {
  const auto p = simulate_coupled(gbm_model(), gbm_cp_driver(), pair_params(0.5, 0.05, 0.25, 0.05),
                                  Scheme::shot_constant, RandomStream(12));
  const auto [c0, f0] = replay_marginal(p, 0.0);
  CHECK(c0 == 1.0);
  CHECK(f0 == 1.0);
  const auto [cT, fT] = replay_marginal(p, 1.0);
  CHECK(cT == p.coarse->terminal());
  CHECK(fT == p.fine.terminal());
  std::size_t last = 0;
  while (last + 1 < p.fine.size() && p.fine.times[last + 1] <= 0.3) ++last;
  CHECK(replay_marginal(p.fine, 0.3) == p.fine.post[last]);
}

TEST_CASE("unsupported and invalid inputs") {
  const LevyTriplet y{0.0, 0.2, stable01()};
  CHECK_THROWS_AS(simulate_level(gbm_model(), y, {0.25, 0.1, 0.25}, Scheme::idealised, RandomStream(1)),
                  SchemeUnsupportedError);
  CHECK_THROWS_AS(simulate_coupled(gbm_model(), gbm_driver(), pair_params(0.3, 1, 0.25, 1),
                                   Scheme::shot_continuous, RandomStream(1)),
                  ConfigError);
}
