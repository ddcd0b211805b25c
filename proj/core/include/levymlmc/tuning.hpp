#pragma once

#include <vector>

namespace levymlmc {

// Level-k pair cost kappa_cost * eps_{k-1}^{-1} (M + beta).
struct CostModel {
  double beta = 0.0;
  double kappa_cost = 1.0;

  [[nodiscard]] double pair_cost(int M, double eps_prev) const;
};

// g(M, beta) = (M - 1)(M + beta) / (M (ln M)^2).
double m_curve(int M, double beta);

struct CurvePoint {
  int M = 0;
  double beta = 0.0;
  double g = 0.0;
};

struct OptimalM {
  int M_star = 0;
  std::vector<CurvePoint> curve;
};

// Integer argmin of g(., beta) over [M_min, M_max] (a subset of 2..64).
OptimalM optimal_M(double beta, int M_min = 2, int M_max = 10);

// delta / (kappa_err sqrt(1 - 1/M)); must land in (0, 1).
double rescaled_delta(double delta, double kappa_err, int M);

// (kappa_cost kappa_err^2 / alpha^2) g(M, beta) delta^{-2} (ln 1/delta)^2.
double predicted_cost(double delta, double alpha, int M, double beta, double kappa_cost = 1.0,
                      double kappa_err = 1.0);

// Host timing of one increment simulation against one coarse concatenation,
// reported as a beta estimate. Informational only.
double estimate_beta(int repetitions = 1 << 20);

}  // namespace levymlmc
