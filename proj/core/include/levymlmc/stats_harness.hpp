#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levymlmc/functionals.hpp"
#include "levymlmc/levy_model.hpp"
#include "levymlmc/mlmc_engine.hpp"
#include "levymlmc/sde_model.hpp"
#include "levymlmc/tolerances.hpp"

namespace levymlmc {

struct TestReport {
  std::string name;
  double value = 0.0;
  std::optional<double> p_value;
  bool pass = false;
  double tolerance = 0.0;
  std::vector<std::int64_t> sample_sizes;
  std::uint64_t seed = 0;
  bool degenerate = false;
  std::string note;
};

// Kolmogorov-Smirnov distance between the empirical law of the samples and
// N(sample mean, sample variance); the sample standard deviation uses n - 1.
double lilliefors_statistic(std::vector<double> samples);

// Upper-tail p-value of the Lilliefors statistic for sample size n, from the
// shipped Monte Carlo table of the scaled statistic D (sqrt(n) - 0.01 + 0.85 / sqrt(n)).
double lilliefors_p_value(double d, std::size_t n);

// Anderson-Darling A*^2 = A^2 (1 + 0.75/n + 2.25/n^2) against the fitted normal,
// with D'Agostino's p-value approximation.
struct AndersonDarling {
  double a_star_sq = 0.0;
  double p_value = 1.0;
};
AndersonDarling anderson_darling(std::vector<double> samples);

// Lilliefors KS test at level `level`; the Anderson-Darling result is attached
// in the note. Needs at least 100 samples. Constant samples give a degenerate report.
TestReport normality_test(const std::vector<double>& samples,
                          double level = tolerances::normality_level,
                          std::uint64_t seed = 0);

struct TwoSampleKs {
  double d = 0.0;
  double p_value = 1.0;
};
TwoSampleKs two_sample_ks(std::vector<double> a, std::vector<double> b);

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool pass = false;
};

// Least squares of log var_k on log eps_{k-1}; passes iff the slope lies in
// [slope_lo, slope_hi] and R^2 >= r2_min. Needs at least four levels.
RegressionFit variance_decay_regression(const std::vector<double>& eps_prev,
                                        const std::vector<double>& var,
                                        double slope_lo = tolerances::slope_lo,
                                        double slope_hi = tolerances::slope_hi,
                                        double r2_min = tolerances::r2_min);
RegressionFit variance_decay_regression(const std::vector<LevelStats>& stats, int M);

struct BiasFit {
  double kappa_hat = 0.0;
  double stderr_ = 0.0;
  std::size_t levels = 0;
};

// Weighted least squares through the origin of (mean_k - reference) on
// eps_k^alpha with weights 1 / stderr_k^2 (unit weights if any stderr is 0).
BiasFit bias_regression(const std::vector<double>& eps, const std::vector<double>& means,
                        const std::vector<double>& stderrs, double reference, double alpha);

struct CltConfig {
  SdeModel model;
  LevyTriplet levy;
  FunctionalSpec functional;
  LevelSchedule schedule;
  Scheme scheme = Scheme::idealised;
  std::vector<double> deltas{0.08, 0.04, 0.02};
  int replications = 200;
  std::optional<double> reference;
  std::optional<double> reference_delta;
  std::uint64_t seed = 1;
  double beta = 0.0;
  WorkerPool* pool = nullptr;
};

struct CltDeltaResult {
  double delta = 0.0;
  int L = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> estimates;
  std::vector<double> z;
  double mean_z = 0.0;
  double var_z = 0.0;
  double var_z_stderr = 0.0;
  // delta^{-2} sum_k var_k / n_k from level variances pooled over replications.
  double predicted_var_z = 0.0;
  std::vector<LevelStats> pooled_levels;
  double mean_cost = 0.0;
};

struct CltExperiment {
  double reference = 0.0;
  bool reference_from_run = false;
  double reference_stderr = 0.0;
  std::vector<CltDeltaResult> results;
  // Fitted at the smallest delta: rho_hat_sq is the variance of z there, the
  // bias fit regresses the pooled per-level means of F(X^k) on eps_k^alpha.
  double rho_hat_sq = 0.0;
  std::optional<BiasFit> bias;
};

// Seed of replication r at delta index d.
std::uint64_t replication_seed(std::uint64_t seed, std::size_t delta_index, std::size_t r);

CltExperiment run_clt_experiment(const CltConfig& config);

}  // namespace levymlmc
