#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levymlmc/functionals.hpp"
#include "levymlmc/levy_model.hpp"
#include "levymlmc/mlmc_engine.hpp"
#include "levymlmc/path_schemes.hpp"
#include "levymlmc/sde_model.hpp"

namespace levymlmc {

struct UpsilonParams {
  double theta = 0.0;
  int M = 2;
};

// ((e^{-theta} - 1 + theta) / theta^2) (1 - 1/M); 1/2 (1 - 1/M) at theta = 0.
double upsilon_sq(const UpsilonParams& params);

struct JumpMark {
  double xi = 0.0;        // standard normal
  double u = 0.0;         // uniform on (0, 1)
  double e_theta = 0.0;   // Exp(theta), +inf when theta = 0
  double e_mtheta = 0.0;  // Exp((M - 1) theta)
  double sigma_s_sq = 0.0;
};

// sigma^2 * [min(E^theta, U) - min(E^theta, E^{(M-1)theta}, U - (m-1)/M)] on
// the window (m-1)/M <= U < m/M.
double mark_variance(double sigma, const UpsilonParams& params, double u, double e_theta,
                     double e_mtheta);

std::vector<JumpMark> sample_marks(double sigma, const UpsilonParams& params, std::size_t n_jumps,
                                   RandomStream& rng);

// Largest h with truncated_second_moment(h) <= rel_tol * (sigma^2 + int x^2 nu).
double default_h_sim(const LevyTriplet& levy, double rel_tol = 1e-4);

struct LimitPaths {
  CoupledPaths x;          // fine skeleton of X
  std::vector<double> u;   // U at each update time
  std::vector<double> u_pre;
  double h_sim = 0.0;
  double eps_sim = 0.0;
};

struct LimitOptions {
  // Multiplies both the Brownian and the mark noise of U.
  double noise_scale = 1.0;
  bool track_extremes = false;
};

// Scheme used for the X skeleton under the limit process: the exact driver
// when nu is finite, the truncated one otherwise.
Scheme limit_x_scheme(const LevyTriplet& levy);

LimitPaths simulate_U(const SdeModel& model, const LevyTriplet& levy, const UpsilonParams& params,
                      double grid_eps, double h_sim, RandomStream rng,
                      const LimitOptions& options = {});

// Stochastic exponential of int a'(X_-) dY along the skeleton, in the product
// form E_pre[n] = E[n-1] (1 + a'(X[n-1]) cont[n]), E[n] = E_pre[n] (1 + a'(X_pre[n]) jump[n]).
struct StochasticExponential {
  std::vector<double> value;
  std::vector<double> pre;
  bool singular = false;
};

StochasticExponential stochastic_exponential(const SdeModel& model, const PathSkeleton& x);

// Increments of the conditional-variance integral I at each update time, so
// that phi_{s,t} = E_s E_t I(min(s, t)) with I(T_q) = sum_{r <= q} dI[r].
std::vector<double> phi_increments(const SdeModel& model, const LevyTriplet& levy,
                                   const PathSkeleton& x, const StochasticExponential& e);

// phi_{s,t} for update times s <= t of the skeleton. Throws NumericError on a
// singular jump (1 + a' dY = 0).
double phi_formula(const SdeModel& model, const LevyTriplet& levy, const PathSkeleton& x,
                   double s, double t);

struct VarianceOracleResult {
  enum class Method { limit_sde, phi_formula, level_empirical };
  double rho_sq = 0.0;
  Method method = Method::limit_sde;
  double mc_stderr = 0.0;
  std::int64_t n_paths = 0;
  std::int64_t excluded_paths = 0;
  std::int64_t nondifferentiable = 0;
  double h_sim = 0.0;
  double eps_sim = 0.0;
  bool exclusion_warning = false;
};

std::string to_string(VarianceOracleResult::Method method);
VarianceOracleResult::Method oracle_method_from_string(const std::string& name);

struct OracleOptions {
  double eps_sim = 1.0 / 1024.0;
  double h_sim = 0.0;  // 0 selects default_h_sim
  int level_k = 7;     // level_empirical: pairs (k, k+1)
  const LevelSchedule* schedule = nullptr;  // level_empirical
  Scheme scheme = Scheme::idealised;        // level_empirical
  WorkerPool* pool = nullptr;
  std::size_t block_size = 512;
};

VarianceOracleResult rho_sq_oracle(const SdeModel& model, const LevyTriplet& levy,
                                   const FunctionalSpec& functional, const UpsilonParams& params,
                                   VarianceOracleResult::Method method, std::int64_t n_paths,
                                   std::uint64_t seed, const OracleOptions& options = {});

}  // namespace levymlmc
