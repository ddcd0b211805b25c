#include "levymlmc/mlmc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levymlmc/errors.hpp"

namespace levymlmc {

std::string to_string(ScheduleStrategy::Kind kind) {
  return kind == ScheduleStrategy::Kind::theta_matched ? "theta_matched" : "power";
}

ScheduleStrategy::Kind strategy_kind_from_string(const std::string& name) {
  if (name == "theta_matched") return ScheduleStrategy::Kind::theta_matched;
  if (name == "power") return ScheduleStrategy::Kind::power;
  throw ConfigError("unknown schedule strategy '" + name + "'");
}

const LevelSpec& LevelSchedule::level(int k) const {
  if (k < 1 || k > depth()) throw DomainError("schedule: level index out of range");
  return levels[static_cast<std::size_t>(k - 1)];
}

namespace {

// M^{-k} T with M^k formed exactly.
double grid_width(int M, int k, double T) {
  return T / std::pow(static_cast<double>(M), static_cast<double>(k));
}

// Solve tail_mass(h) = target on a log scale.
double invert_tail(const LevyMeasure& nu, double target) {
  if (nu.is_finite() && target > nu.total_mass()) {
    throw InfeasibleScheduleError("theta_matched: theta / eps_k = " + std::to_string(target) +
                                  " exceeds the total jump intensity " +
                                  std::to_string(nu.total_mass()));
  }
  double lo = 1.0;
  double hi = 1.0;
  if (const auto* tab = std::get_if<TabulatedMeasure>(&nu.spec())) {
    lo = tab->h.front();
    hi = tab->h.back();
    if (nu.tail_mass(hi) > target) {
      throw InfeasibleScheduleError("theta_matched: target below the atom at the table edge");
    }
  } else {
    for (int i = 0; i < 2100 && nu.tail_mass(lo) < target; ++i) lo *= 0.5;
    for (int i = 0; i < 2100 && nu.tail_mass(hi) > target; ++i) hi *= 2.0;
    if (nu.tail_mass(lo) < target || nu.tail_mass(hi) > target) {
      throw InfeasibleScheduleError("theta_matched: could not bracket the tail equation");
    }
  }
  // Invariant: tail(lo) >= target >= tail(hi).
  for (int i = 0; i < 400; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    if (nu.tail_mass(mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double h = (nu.tail_mass(hi) == target) ? hi : lo;
  const double err = std::abs(nu.tail_mass(h) - target);
  if (err > 1e-9 * std::max(1.0, target)) {
    throw InfeasibleScheduleError(
        "theta_matched: tail mass is not invertible at the target (it jumps over it)");
  }
  return h;
}

}  // namespace

LevelSchedule make_schedule(const LevyTriplet& levy, int M, double T, double theta, int K_max,
                            const ScheduleStrategy& strategy) {
  levy.validate();
  if (M < 2) throw DomainError("schedule: M must be an integer >= 2");
  if (!(T > 0.0)) throw DomainError("schedule: T must be positive");
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw DomainError("schedule: theta must be >= 0");
  if (K_max < 1) throw DomainError("schedule: K_max must be >= 1");
  if (strategy.aux_ratio < 1) throw ConfigError("schedule: aux_ratio must be a positive integer");

  LevelSchedule s;
  s.M = M;
  s.T = T;
  s.theta = theta;
  s.strategy = strategy;
  for (int k = 1; k <= K_max; ++k) {
    LevelSpec lv;
    lv.k = k;
    lv.eps = grid_width(M, k, T);
    lv.eps_aux = strategy.aux_ratio * lv.eps;
    if (strategy.kind == ScheduleStrategy::Kind::theta_matched) {
      if (!(theta > 0.0)) {
        throw ConfigError("schedule: theta_matched needs theta > 0; use the power strategy for theta = 0");
      }
      lv.h = invert_tail(levy.measure, theta / lv.eps);
    } else {
      if (!(strategy.gamma > 0.0) || !(strategy.h_scale > 0.0)) {
        throw DomainError("schedule: power strategy needs gamma > 0 and h_scale > 0");
      }
      lv.h = strategy.h_scale * std::pow(lv.eps, strategy.gamma);
    }
    if (!s.levels.empty() && lv.h > s.levels.back().h) {
      throw InfeasibleScheduleError("schedule: thresholds h_k must be nonincreasing");
    }
    s.levels.push_back(lv);
  }
  return s;
}

ScheduleDiagnostics validate_schedule(const LevelSchedule& schedule, const LevyTriplet& levy) {
  ScheduleDiagnostics out;
  const LevyMeasure& nu = levy.measure;
  const bool zero = nu.is_zero();
  for (const auto& lv : schedule.levels) {
    LevelDiagnostics d;
    d.k = lv.k;
    if (!zero) {
      const double m2 = nu.truncated_second_moment(lv.h);
      const double lg = std::log1p(1.0 / lv.eps_aux);
      const double first = nu.tail_first_moment(lv.h);
      d.r2 = nu.tail_mass(lv.h) * lv.eps;
      d.r_h = lv.h / std::sqrt(lv.eps);
      d.r3a = lv.eps_aux * m2 * lg * lg / lv.eps;
      d.r3b = lv.h * lv.h * lg * lg / lv.eps;
      d.r4 = m2 / lv.eps;
      d.rdrift = lv.eps * first * first;
    }
    out.levels.push_back(d);
  }
  if (out.levels.size() < 3) return out;

  const double theta = schedule.theta;
  const double tol = 1e-9 * std::max(1.0, theta);
  struct Probe {
    const char* name;
    double (*get)(const LevelDiagnostics&, double);
  };
  const Probe probes[] = {
      {"r2", [](const LevelDiagnostics& d, double th) { return std::abs(d.r2 - th); }},
      {"r_h", [](const LevelDiagnostics& d, double) { return d.r_h; }},
      {"r3a", [](const LevelDiagnostics& d, double) { return d.r3a; }},
      {"r3b", [](const LevelDiagnostics& d, double) { return d.r3b; }},
      {"r4", [](const LevelDiagnostics& d, double) { return d.r4; }},
      {"rdrift", [](const LevelDiagnostics& d, double) { return d.rdrift; }},
  };
  const std::size_t n = out.levels.size();
  for (const auto& p : probes) {
    const double a = p.get(out.levels[n - 3], theta);
    const double b = p.get(out.levels[n - 2], theta);
    const double c = p.get(out.levels[n - 1], theta);
    const double floor = (std::string(p.name) == "r2") ? tol : 0.0;
    if (c > floor && b <= c && a <= b) out.flagged.emplace_back(p.name);
  }
  return out;
}

namespace {

// Round values that land within float noise of an integer before ceil().
double snapped_ceil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return r;
  return std::ceil(x);
}

}  // namespace

ReplicationPlan make_plan(double delta, double alpha, int M, double T) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("plan: delta must lie in (0, 1)");
  if (!(alpha >= 0.5)) throw DomainError("plan: alpha must be >= 1/2");
  if (M < 2) throw DomainError("plan: M must be >= 2");
  if (!(T > 0.0)) throw DomainError("plan: T must be positive");
  ReplicationPlan plan;
  plan.delta = delta;
  plan.alpha = alpha;
  plan.L = std::max(1, static_cast<int>(snapped_ceil(std::log(1.0 / delta) /
                                                     (alpha * std::log(static_cast<double>(M))))));
  const double inv_d2 = 1.0 / (delta * delta);
  for (int k = 1; k <= plan.L; ++k) {
    const double eps_prev = grid_width(M, k - 1, T);
    const double n = snapped_ceil(inv_d2 * plan.L * eps_prev);
    plan.n.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(n)));
  }
  return plan;
}

void LevelStats::merge(const LevelStats& other) {
  diff.merge(other.diff);
  fine.merge(other.fine);
  cost += other.cost;
  fallback_paths += other.fallback_paths;
}

LevelSample sample_level(const SdeModel& model, const LevyTriplet& levy,
                         const FunctionalSpec& functional, const LevelSchedule& schedule,
                         int k, Scheme scheme, std::uint64_t seed, std::uint64_t i, double beta) {
  const RandomStream rng(seed, static_cast<std::uint64_t>(k), i);
  SimulationOptions opts;
  opts.track_extremes = functional.needs_extremes();
  LevelSample out;
  if (k == 1) {
    const CoupledPaths p = simulate_level(model, levy, schedule.level(1).params(), scheme, rng, opts);
    out.fine = eval_functional(functional, p.fine);
    out.cost = p.cost(beta);
    out.fallback = p.gaussian_fallback;
    return out;
  }
  const CoupledParams params{schedule.level(k - 1).params(), schedule.level(k).params()};
  const CoupledPaths p = simulate_coupled(model, levy, params, scheme, rng, opts);
  out.fine = eval_functional(functional, p.fine);
  out.coarse = eval_functional(functional, *p.coarse);
  out.cost = p.cost(beta);
  out.fallback = p.gaussian_fallback;
  return out;
}

std::vector<LevelStats> sample_levels(const SdeModel& model, const LevyTriplet& levy,
                                      const FunctionalSpec& functional,
                                      const LevelSchedule& schedule, Scheme scheme,
                                      int k_first, const std::vector<std::int64_t>& n,
                                      std::uint64_t seed, const EngineOptions& options) {
  model.validate();
  levy.validate();
  functional.validate(model.T);
  if (std::abs(schedule.T - model.T) > 1e-12 * model.T) {
    throw ConfigError("schedule horizon does not match the model horizon");
  }
  const int k_last = k_first + static_cast<int>(n.size()) - 1;
  if (k_first < 1 || k_last > schedule.depth()) {
    throw ConfigError("requested levels exceed the schedule depth");
  }
  const std::size_t block = std::max<std::size_t>(1, options.block_size);

  struct Task {
    std::size_t level;
    std::int64_t begin;
    std::int64_t end;
  };
  std::vector<Task> tasks;
  std::vector<LevelStats> result(n.size());
  for (std::size_t l = 0; l < n.size(); ++l) {
    const int k = k_first + static_cast<int>(l);
    result[l].k = k;
    result[l].eps = schedule.level(k).eps;
    result[l].h = schedule.level(k).h;
    if (n[l] < 0) throw DomainError("sample count must be nonnegative");
    for (std::int64_t b = 0; b < n[l]; b += static_cast<std::int64_t>(block)) {
      tasks.push_back({l, b, std::min<std::int64_t>(n[l], b + static_cast<std::int64_t>(block))});
    }
  }
  // Finest levels first: they are the most expensive blocks.
  std::vector<std::size_t> order(tasks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = tasks.size() - 1 - i;

  std::vector<LevelStats> partial(tasks.size());
  auto run = [&](std::size_t slot) {
    const Task& t = tasks[order[slot]];
    LevelStats& acc = partial[order[slot]];
    const int k = k_first + static_cast<int>(t.level);
    for (std::int64_t i = t.begin; i < t.end; ++i) {
      const LevelSample s = sample_level(model, levy, functional, schedule, k, scheme, seed,
                                         static_cast<std::uint64_t>(i), options.beta);
      const double d = s.fine - s.coarse;
      if (!std::isfinite(d)) throw NumericError("non-finite functional value on level " + std::to_string(k));
      acc.diff.add(d);
      acc.fine.add(s.fine);
      acc.cost += s.cost;
      if (s.fallback) ++acc.fallback_paths;
    }
  };
  if (options.pool != nullptr) {
    options.pool->parallel_for(tasks.size(), run);
  } else {
    for (std::size_t slot = 0; slot < tasks.size(); ++slot) run(slot);
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) result[tasks[i].level].merge(partial[i]);
  return result;
}

MlmcEstimate run_estimator(const SdeModel& model, const LevyTriplet& levy,
                           const FunctionalSpec& functional, const LevelSchedule& schedule,
                           const ReplicationPlan& plan, Scheme scheme, std::uint64_t seed,
                           const EngineOptions& options) {
  if (plan.L > schedule.depth()) {
    throw ConfigError("plan depth L = " + std::to_string(plan.L) +
                      " exceeds the schedule depth " + std::to_string(schedule.depth()));
  }
  MlmcEstimate est;
  est.delta = plan.delta;
  est.L = plan.L;
  est.scheme = scheme;
  est.seed = seed;
  est.levels = sample_levels(model, levy, functional, schedule, scheme, 1, plan.n, seed, options);
  double var = 0.0;
  for (const auto& lv : est.levels) {
    est.value += lv.mean();
    var += lv.variance() / static_cast<double>(lv.count());
    est.total_cost += lv.cost;
    if (lv.fallback_paths > 0) est.gaussian_fallback = true;
  }
  est.stderr_ = std::sqrt(var);
  return est;
}

std::vector<LevelStats> level_profile(const SdeModel& model, const LevyTriplet& levy,
                                      const FunctionalSpec& functional,
                                      const LevelSchedule& schedule, Scheme scheme,
                                      std::int64_t n_pilot, std::uint64_t seed, int k_min,
                                      int k_max, const EngineOptions& options) {
  if (n_pilot < 2) throw DomainError("level_profile: n_pilot must be >= 2");
  if (k_min < 1 || k_max < k_min) throw DomainError("level_profile: need 1 <= k_min <= k_max");
  const std::vector<std::int64_t> n(static_cast<std::size_t>(k_max - k_min + 1), n_pilot);
  return sample_levels(model, levy, functional, schedule, scheme, k_min, n, seed, options);
}

}  // namespace levymlmc
