#include <doctest.h>

#include <cmath>

#include "levymlmc/errors.hpp"
#include "levymlmc/functionals.hpp"

using namespace levymlmc;

namespace {

PathSkeleton skeleton(std::vector<double> t, std::vector<double> x) {
  PathSkeleton p;
  p.times = t;
  p.pre = x;
  p.post = x;
  p.cont.assign(x.size(), 0.0);
  p.jump.assign(x.size(), 0.0);
  p.aux.assign(x.size(), 0.0);
  p.anchor.assign(x.size(), -1);
  return p;
}

const PathSkeleton kPath = skeleton({0.0, 0.5, 1.0}, {1.0, 2.0, 3.0});

}  // namespace

TEST_CASE("linear maps on a skeleton") {
  const auto leb = LinearComponent::integral_of(SignedMeasure::lebesgue(1.0));
  CHECK(eval_component(leb, kPath.times, kPath.post) == doctest::Approx(1.5));
  CHECK(eval_component(LinearComponent::marginal_at(1.0), kPath.times, kPath.post) == 3.0);
  const auto atom = LinearComponent::integral_of(SignedMeasure::dirac(0.5, 2.0));
  CHECK(eval_component(atom, kPath.times, kPath.post) == 4.0);
  // Marginal between update times reads the left value.
  CHECK(eval_component(LinearComponent::marginal_at(0.7), kPath.times, kPath.post) == 2.0);
}

TEST_CASE("node weights reproduce the quadrature") {
  SignedMeasure mu;
  mu.knots = {0.1, 0.6, 0.9};
  mu.density = {2.0, -1.0};
  mu.atoms = {{0.25, 0.5}};
  const auto c = LinearComponent::integral_of(mu);
  const std::vector<double> t{0.0, 0.2, 0.5, 0.8, 1.0};
  const std::vector<double> x{1.0, -2.0, 0.5, 4.0, 3.0};
  const auto w = node_weights(c, t);
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += w[i] * x[i];
  // density: 2*(0.1*1 + 0.3*-2 + 0.1*0.5) - (0.2*0.5 + 0.1*4); atom at 0.25 reads -2.
  const double expected = 2.0 * (0.1 - 0.6 + 0.05) - (0.1 + 0.4) + 0.5 * -2.0;
  CHECK(s == doctest::Approx(expected));
  CHECK(eval_component(c, t, x) == doctest::Approx(expected));
}

TEST_CASE("supremum on a skeleton") {
  const auto flat = skeleton({0.0, 0.5, 1.0}, {1.0, 1.0, 1.0});
  auto s = eval_supremum(flat);
  CHECK(s.value == 1.0);
  CHECK(s.time == 0.0);
  s = eval_supremum(skeleton({0.0, 0.5, 1.0}, {1.0, 3.0, 2.0}));
  CHECK(s.value == 3.0);
  CHECK(s.time == 0.5);
  s = eval_supremum(kPath);
  CHECK(s.value == 3.0);
  CHECK(s.time == 1.0);
  CHECK_THROWS_AS(eval_supremum(kPath, Monitoring::continuous), ConfigError);
}

TEST_CASE("payoffs and functionals") {
  CHECK(eval_functional(marginal_functional(1.0), kPath) == 3.0);
  const auto call = marginal_functional(1.0, Payoff{Payoff::Kind::call, 1.0, {}});
  CHECK(eval_functional(call, skeleton({0.0, 1.0}, {1.0, 1.3})) == doctest::Approx(0.3));
  FunctionalSpec two;
  two.map.components = {LinearComponent::marginal_at(1.0),
                        LinearComponent::integral_of(SignedMeasure::lebesgue(1.0))};
  two.f = Payoff{Payoff::Kind::linear, 0.0, {1.0, 1.0}};
  two.validate(1.0);
  CHECK(eval_functional(two, kPath) == doctest::Approx(4.5));
}

TEST_CASE("gradients") {
  auto g = gradient_at(marginal_functional(1.0), {2.7});
  CHECK(g.gradient == std::vector<double>{1.0});
  g = gradient_at(marginal_functional(1.0, Payoff{Payoff::Kind::square, 0.0, {}}), {3.0});
  CHECK(g.gradient[0] == 6.0);
  g = gradient_at(marginal_functional(1.0, Payoff{Payoff::Kind::call, 1.0, {}}), {1.0});
  CHECK_FALSE(g.differentiable);
  CHECK(gradient_fd_error(marginal_functional(1.0, Payoff{Payoff::Kind::square, 0.0, {}}), {1.7}) < 1e-6);
}

TEST_CASE("functional validation") {
  CHECK_THROWS_AS(marginal_functional(2.0).validate(1.0), DomainError);
  auto f = marginal_functional(1.0);
  f.alpha = 0.4;
  CHECK_THROWS_AS(f.validate(1.0), DomainError);
  CHECK_THROWS_AS(payoff_kind_from_string("digital"), ConfigError);
}
