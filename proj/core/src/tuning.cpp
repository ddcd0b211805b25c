#include "levymlmc/tuning.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "levymlmc/errors.hpp"
#include "levymlmc/random_stream.hpp"

namespace levymlmc {

double CostModel::pair_cost(int M, double eps_prev) const {
  if (M < 2) throw DomainError("cost: M must be >= 2");
  if (!(eps_prev > 0.0)) throw DomainError("cost: eps must be positive");
  return kappa_cost * (static_cast<double>(M) + beta) / eps_prev;
}

double m_curve(int M, double beta) {
  if (M < 2) throw DomainError("m_curve: M must be >= 2");
  if (!(beta >= 0.0)) throw DomainError("m_curve: beta must be >= 0");
  const double m = static_cast<double>(M);
  const double lg = std::log(m);
  return (m - 1.0) * (m + beta) / (m * lg * lg);
}

OptimalM optimal_M(double beta, int M_min, int M_max) {
  if (M_min < 2 || M_max > 64 || M_max < M_min) {
    throw DomainError("optimal_M: range must satisfy 2 <= M_min <= M_max <= 64");
  }
  OptimalM out;
  double best = 0.0;
  for (int M = M_min; M <= M_max; ++M) {
    const double g = m_curve(M, beta);
    out.curve.push_back({M, beta, g});
    if (out.M_star == 0 || g < best) {
      best = g;
      out.M_star = M;
    }
  }
  return out;
}

double rescaled_delta(double delta, double kappa_err, int M) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("rescaled_delta: delta must lie in (0, 1)");
  if (!(kappa_err > 0.0)) throw DomainError("rescaled_delta: kappa_err must be positive");
  if (M < 2) throw DomainError("rescaled_delta: M must be >= 2");
  const double r = delta / (kappa_err * std::sqrt(1.0 - 1.0 / static_cast<double>(M)));
  if (!(r < 1.0)) {
    throw DomainError("rescaled_delta: rescaled precision " + std::to_string(r) +
                      " is outside (0, 1)");
  }
  return r;
}

double predicted_cost(double delta, double alpha, int M, double beta, double kappa_cost,
                      double kappa_err) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("predicted_cost: delta must lie in (0, 1)");
  if (!(alpha >= 0.5)) throw DomainError("predicted_cost: alpha must be >= 1/2");
  if (!(kappa_cost > 0.0) || !(kappa_err > 0.0)) {
    throw DomainError("predicted_cost: kappa constants must be positive");
  }
  const double lg = std::log(1.0 / delta);
  return kappa_cost * kappa_err * kappa_err / (alpha * alpha) * m_curve(M, beta) * lg * lg /
         (delta * delta);
}

double estimate_beta(int repetitions) {
  using clock = std::chrono::steady_clock;
  RandomStream rng(0x5EEDull);
  volatile double sink = 0.0;
  double x = 1.0;

  const auto t0 = clock::now();
  for (int i = 0; i < repetitions; ++i) {
    const double dw = 0.03125 * rng.normal();
    x += x * (0.0001 + 0.2 * dw);
  }
  const auto t1 = clock::now();
  double acc = 0.0;
  double inc = 1e-9;
  for (int i = 0; i < repetitions; ++i) {
    acc += inc;
    inc = -inc * 0.999999;
  }
  const auto t2 = clock::now();
  sink = x + acc;
  (void)sink;
  const double simulate = std::chrono::duration<double>(t1 - t0).count();
  const double concat = std::chrono::duration<double>(t2 - t1).count();
  return simulate > 0.0 ? concat / simulate : 0.0;
}

}  // namespace levymlmc
