#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levymlmc/accumulator.hpp"
#include "levymlmc/functionals.hpp"
#include "levymlmc/levy_model.hpp"
#include "levymlmc/path_schemes.hpp"
#include "levymlmc/sde_model.hpp"
#include "levymlmc/worker_pool.hpp"

namespace levymlmc {

// How jump thresholds h_k are chosen.
//   theta_matched: tail_mass(h_k) = theta / eps_k, solved by bisection
//   power:         h_k = h_scale * eps_k^gamma
// The auxiliary grid is eps'_k = aux_ratio * eps_k.
struct ScheduleStrategy {
  enum class Kind { theta_matched, power };
  Kind kind = Kind::power;
  double gamma = 1.0;
  double h_scale = 1.0;
  int aux_ratio = 1;

  friend bool operator==(const ScheduleStrategy&, const ScheduleStrategy&) = default;
};

std::string to_string(ScheduleStrategy::Kind kind);
ScheduleStrategy::Kind strategy_kind_from_string(const std::string& name);

struct LevelSpec {
  int k = 1;
  double eps = 1.0;
  double h = 1.0;
  double eps_aux = 1.0;

  [[nodiscard]] LevelParams params() const noexcept { return {eps, h, eps_aux}; }
};

struct LevelSchedule {
  int M = 2;
  double T = 1.0;
  double theta = 0.0;
  ScheduleStrategy strategy;
  std::vector<LevelSpec> levels;  // k = 1 .. K_max

  [[nodiscard]] int depth() const noexcept { return static_cast<int>(levels.size()); }
  [[nodiscard]] const LevelSpec& level(int k) const;
};

LevelSchedule make_schedule(const LevyTriplet& levy, int M, double T, double theta, int K_max,
                            const ScheduleStrategy& strategy);

// Finite-level ratios whose decay the level conditions ask for.
struct LevelDiagnostics {
  int k = 0;
  double r2 = 0.0;      // tail_mass(h_k) * eps_k, should approach theta
  double r_h = 0.0;     // h_k / sqrt(eps_k)
  double r3a = 0.0;     // eps'_k m2(h_k) log^2(1 + 1/eps'_k) / eps_k
  double r3b = 0.0;     // h_k^2 log^2(1 + 1/eps'_k) / eps_k
  double r4 = 0.0;      // m2(h_k) / eps_k
  double rdrift = 0.0;  // eps_k (int_{|x| >= h_k} x nu(dx))^2
};

struct ScheduleDiagnostics {
  std::vector<LevelDiagnostics> levels;
  std::vector<std::string> flagged;  // ratio names nondecreasing over the last 3 levels
  [[nodiscard]] bool clean() const noexcept { return flagged.empty(); }
};

ScheduleDiagnostics validate_schedule(const LevelSchedule& schedule, const LevyTriplet& levy);

struct ReplicationPlan {
  double delta = 0.1;
  double alpha = 1.0;
  int L = 1;
  std::vector<std::int64_t> n;  // n_1 .. n_L
};

ReplicationPlan make_plan(double delta, double alpha, int M, double T);

struct LevelStats {
  int k = 0;
  double eps = 0.0;
  double h = 0.0;
  MomentAccumulator diff;  // F(fine) - F(coarse); F(X^1) on level 1
  MomentAccumulator fine;  // F(fine) alone
  double cost = 0.0;       // Euler-step units
  std::int64_t fallback_paths = 0;

  [[nodiscard]] std::int64_t count() const noexcept { return diff.count(); }
  [[nodiscard]] double mean() const noexcept { return diff.mean(); }
  [[nodiscard]] double variance() const noexcept { return diff.variance(); }

  void merge(const LevelStats& other);
};

struct MlmcEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  double delta = 0.0;
  int L = 0;
  double total_cost = 0.0;
  Scheme scheme = Scheme::idealised;
  std::uint64_t seed = 0;
  bool gaussian_fallback = false;
  std::vector<LevelStats> levels;
};

struct EngineOptions {
  double beta = 0.0;
  WorkerPool* pool = nullptr;  // serial when null
  std::size_t block_size = 512;
};

// One sample of level k with substream i: the pair (F(fine), F(coarse)), with
// F(coarse) = 0 on level 1.
struct LevelSample {
  double fine = 0.0;
  double coarse = 0.0;
  double cost = 0.0;
  bool fallback = false;
};

LevelSample sample_level(const SdeModel& model, const LevyTriplet& levy,
                         const FunctionalSpec& functional, const LevelSchedule& schedule,
                         int k, Scheme scheme, std::uint64_t seed, std::uint64_t i, double beta);

// Per-level statistics from n[k - k_first] samples of each level in
// [k_first, k_first + n.size()). Stream (seed, k, i) drives sample i of level k.
std::vector<LevelStats> sample_levels(const SdeModel& model, const LevyTriplet& levy,
                                      const FunctionalSpec& functional,
                                      const LevelSchedule& schedule, Scheme scheme,
                                      int k_first, const std::vector<std::int64_t>& n,
                                      std::uint64_t seed, const EngineOptions& options);

MlmcEstimate run_estimator(const SdeModel& model, const LevyTriplet& levy,
                           const FunctionalSpec& functional, const LevelSchedule& schedule,
                           const ReplicationPlan& plan, Scheme scheme, std::uint64_t seed,
                           const EngineOptions& options = {});

// Pilot statistics for levels k_min .. k_max with n_pilot samples each.
std::vector<LevelStats> level_profile(const SdeModel& model, const LevyTriplet& levy,
                                      const FunctionalSpec& functional,
                                      const LevelSchedule& schedule, Scheme scheme,
                                      std::int64_t n_pilot, std::uint64_t seed, int k_min,
                                      int k_max, const EngineOptions& options = {});

}  // namespace levymlmc
