#include "levymlmc/limit_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levymlmc/accumulator.hpp"
#include "levymlmc/errors.hpp"

namespace levymlmc {

namespace {

constexpr std::uint64_t kLimitBrownianTag = 5;
constexpr std::uint64_t kMarkTag = 6;
constexpr std::uint64_t kOracleStreamBase = 0x4F52000000000000ull;

void require_params(const UpsilonParams& p) {
  if (!(p.theta >= 0.0) || !std::isfinite(p.theta)) throw DomainError("upsilon: theta must be >= 0");
  if (p.M < 2) throw DomainError("upsilon: M must be >= 2");
}

void require_sigma(const LevyTriplet& levy) {
  if (!(levy.sigma > 0.0)) {
    throw DomainError("limit process: the Gaussian part must be nondegenerate (sigma > 0)");
  }
}

}  // namespace

double upsilon_sq(const UpsilonParams& params) {
  require_params(params);
  const double th = params.theta;
  const double factor = 1.0 - 1.0 / static_cast<double>(params.M);
  double g;
  if (th < 1e-6) {
    g = 0.5 - th / 6.0 + th * th / 24.0 - th * th * th / 120.0;
  } else {
    g = (std::expm1(-th) + th) / (th * th);
  }
  return g * factor;
}

double mark_variance(double sigma, const UpsilonParams& params, double u, double e_theta,
                     double e_mtheta) {
  const double M = static_cast<double>(params.M);
  // Window m with (m-1)/M <= u < m/M.
  const double m = std::min(std::floor(u * M) + 1.0, M);
  const double left = (m - 1.0) / M;
  const double bracket =
      std::min(e_theta, u) - std::min(std::min(e_theta, e_mtheta), u - left);
  return sigma * sigma * std::max(0.0, bracket);
}

std::vector<JumpMark> sample_marks(double sigma, const UpsilonParams& params, std::size_t n_jumps,
                                   RandomStream& rng) {
  require_params(params);
  std::vector<JumpMark> marks(n_jumps);
  const double rate_m = (params.M - 1) * params.theta;
  for (auto& mk : marks) {
    mk.xi = rng.normal();
    mk.u = rng.uniform();
    mk.e_theta = rng.exponential(params.theta);
    mk.e_mtheta = rng.exponential(rate_m);
    mk.sigma_s_sq = mark_variance(sigma, params, mk.u, mk.e_theta, mk.e_mtheta);
  }
  return marks;
}

double default_h_sim(const LevyTriplet& levy, double rel_tol) {
  const LevyMeasure& nu = levy.measure;
  if (nu.is_zero()) return 1.0;
  const double target = rel_tol * (levy.sigma * levy.sigma + nu.second_moment());
  double lo;
  double hi;
  if (const auto* tab = std::get_if<TabulatedMeasure>(&nu.spec())) {
    lo = tab->h.front();
    hi = tab->h.back();
    if (nu.truncated_second_moment(hi) <= target) return hi;
  } else {
    lo = 1.0;
    hi = 1.0;
    while (nu.truncated_second_moment(lo) > target && lo > 1e-300) lo *= 0.5;
    while (nu.truncated_second_moment(hi) <= target && hi < 1e300) hi *= 2.0;
    if (hi >= 1e300) return lo;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (!(mid > lo && mid < hi)) break;
    if (nu.truncated_second_moment(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Scheme limit_x_scheme(const LevyTriplet& levy) {
  return levy.measure.is_finite() ? Scheme::idealised : Scheme::shot_continuous;
}

LimitPaths simulate_U(const SdeModel& model, const LevyTriplet& levy, const UpsilonParams& params,
                      double grid_eps, double h_sim, RandomStream rng,
                      const LimitOptions& options) {
  require_params(params);
  require_sigma(levy);
  if (!(grid_eps > 0.0)) throw DomainError("simulate_U: grid_eps must be positive");
  if (!(h_sim > 0.0)) throw DomainError("simulate_U: h_sim must be positive");

  LimitPaths out;
  out.h_sim = h_sim;
  out.eps_sim = grid_eps;
  SimulationOptions sim;
  sim.track_extremes = options.track_extremes;
  out.x = simulate_level(model, levy, LevelParams{grid_eps, h_sim, grid_eps},
                         limit_x_scheme(levy), rng, sim);

  RandomStream b_rng = rng.fork(kLimitBrownianTag);
  RandomStream m_rng = rng.fork(kMarkTag);
  const PathSkeleton& x = out.x.fine;
  const double sigma = levy.sigma;
  const double noise = options.noise_scale * sigma * sigma * std::sqrt(upsilon_sq(params));
  const Coefficient& a = model.a;

  out.u.assign(x.size(), 0.0);
  out.u_pre.assign(x.size(), 0.0);
  for (std::size_t n = 1; n < x.size(); ++n) {
    const double dt = x.times[n] - x.times[n - 1];
    const double xl = x.post[n - 1];
    const double ul = out.u[n - 1];
    const double db = dt > 0.0 ? std::sqrt(dt) * b_rng.normal() : 0.0;
    const double upre = ul + a.derivative(xl) * ul * x.cont[n] + noise * a.value(xl) * a.derivative(xl) * db;
    double u = upre;
    if (x.jump[n] != 0.0) {
      const double xp = x.pre[n];
      const double mark = mark_variance(sigma, params, m_rng.uniform(),
                                        m_rng.exponential(params.theta),
                                        m_rng.exponential((params.M - 1) * params.theta));
      const double xi = m_rng.normal();
      const double jump = x.jump[n];
      u += a.derivative(xp) * upre * jump +
           options.noise_scale * std::sqrt(mark) * xi * a.value(xp) * a.derivative(xp) * jump;
    }
    out.u_pre[n] = upre;
    out.u[n] = u;
  }
  return out;
}

StochasticExponential stochastic_exponential(const SdeModel& model, const PathSkeleton& x) {
  StochasticExponential e;
  e.value.assign(x.size(), 1.0);
  e.pre.assign(x.size(), 1.0);
  for (std::size_t n = 1; n < x.size(); ++n) {
    const double fc = 1.0 + model.a.derivative(x.post[n - 1]) * x.cont[n];
    const double fj = 1.0 + model.a.derivative(x.pre[n]) * x.jump[n];
    if (std::abs(fj) <= 1e-12 || std::abs(fc) <= 1e-12) e.singular = true;
    e.pre[n] = e.value[n - 1] * fc;
    e.value[n] = e.pre[n] * fj;
  }
  return e;
}

std::vector<double> phi_increments(const SdeModel& model, const LevyTriplet& levy,
                                   const PathSkeleton& x, const StochasticExponential& e) {
  const double s2 = levy.sigma * levy.sigma;
  const double s4 = s2 * s2;
  const Coefficient& a = model.a;
  std::vector<double> d(x.size(), 0.0);
  for (std::size_t n = 1; n < x.size(); ++n) {
    const double dt = x.times[n] - x.times[n - 1];
    const double xl = x.post[n - 1];
    const double gl = a.value(xl) * a.derivative(xl) / e.value[n - 1];
    double inc = s4 * gl * gl * dt;
    if (x.jump[n] != 0.0) {
      const double xp = x.pre[n];
      const double fj = 1.0 + a.derivative(xp) * x.jump[n];
      const double gj = a.value(xp) * a.derivative(xp) * x.jump[n] / (fj * e.pre[n]);
      inc += s2 * gj * gj;
    }
    d[n] = inc;
  }
  return d;
}

double phi_formula(const SdeModel& model, const LevyTriplet& levy, const PathSkeleton& x,
                   double s, double t) {
  require_sigma(levy);
  if (!(s <= t)) throw DomainError("phi_formula: need s <= t");
  if (s < 0.0 || t > x.times.back()) throw DomainError("phi_formula: times outside [0, T]");
  const StochasticExponential e = stochastic_exponential(model, x);
  if (e.singular) throw NumericError("phi_formula: singular jump, 1 + a'(X_-) dY = 0");
  const std::vector<double> d = phi_increments(model, levy, x, e);
  auto index_of = [&](double time) {
    const auto it = std::upper_bound(x.times.begin(), x.times.end(), time);
    return static_cast<std::size_t>(it - x.times.begin()) - 1;
  };
  const std::size_t qs = index_of(s);
  const std::size_t qt = index_of(t);
  double integral = 0.0;
  for (std::size_t r = 1; r <= qs; ++r) integral += d[r];
  return e.value[qs] * e.value[qt] * integral;
}

std::string to_string(VarianceOracleResult::Method method) {
  switch (method) {
    case VarianceOracleResult::Method::limit_sde:
      return "limit_sde";
    case VarianceOracleResult::Method::phi_formula:
      return "phi_formula";
    case VarianceOracleResult::Method::level_empirical:
      return "level_empirical";
  }
  return "unknown";
}

VarianceOracleResult::Method oracle_method_from_string(const std::string& name) {
  if (name == "limit_sde") return VarianceOracleResult::Method::limit_sde;
  if (name == "phi_formula") return VarianceOracleResult::Method::phi_formula;
  if (name == "level_empirical") return VarianceOracleResult::Method::level_empirical;
  throw ConfigError("unknown rho method '" + name + "'");
}

namespace {

enum class PathStatus { ok, excluded, nondifferentiable };

struct OracleBlock {
  MomentAccumulator acc;
  std::int64_t excluded = 0;
  std::int64_t nondiff = 0;
};

// sum_{m,n} wa[m] wb[n] E[m] E[n] I(min(m, n)) via suffix sums.
double double_integral(const std::vector<double>& wa, const std::vector<double>& wb,
                       const std::vector<double>& e, const std::vector<double>& d) {
  double sa = 0.0;
  double sb = 0.0;
  double total = 0.0;
  for (std::size_t q = wa.size(); q-- > 0;) {
    sa += wa[q] * e[q];
    sb += wb[q] * e[q];
    total += d[q] * sa * sb;
  }
  return total;
}

}  // namespace

VarianceOracleResult rho_sq_oracle(const SdeModel& model, const LevyTriplet& levy,
                                   const FunctionalSpec& functional, const UpsilonParams& params,
                                   VarianceOracleResult::Method method, std::int64_t n_paths,
                                   std::uint64_t seed, const OracleOptions& options) {
  model.validate();
  levy.validate();
  functional.validate(model.T);
  require_params(params);
  require_sigma(levy);
  if (n_paths < 2) throw DomainError("rho_sq_oracle: need at least two paths");

  VarianceOracleResult res;
  res.method = method;
  res.n_paths = n_paths;
  res.eps_sim = options.eps_sim;
  res.h_sim = options.h_sim > 0.0 ? options.h_sim : default_h_sim(levy);

  double scale = 1.0;  // level_empirical divides by eps_k
  const double ups2 = upsilon_sq(params);
  if (method == VarianceOracleResult::Method::level_empirical) {
    if (options.schedule == nullptr) {
      throw ConfigError("rho_sq_oracle: level_empirical needs a level schedule");
    }
    if (options.level_k < 1 || options.level_k + 1 > options.schedule->depth()) {
      throw ConfigError("rho_sq_oracle: level_empirical level k+1 exceeds the schedule depth");
    }
    scale = 1.0 / options.schedule->level(options.level_k).eps;
    res.eps_sim = options.schedule->level(options.level_k).eps;
    res.h_sim = options.schedule->level(options.level_k).h;
  }

  const bool sup = functional.kind == FunctionalSpec::Kind::supremum;
  const std::uint64_t stream = kOracleStreamBase + static_cast<std::uint64_t>(method);

  auto one_path = [&](std::uint64_t i, double& value) -> PathStatus {
    if (method == VarianceOracleResult::Method::level_empirical) {
      const LevelSample s = sample_level(model, levy, functional, *options.schedule,
                                         options.level_k + 1, options.scheme, seed, i, 0.0);
      value = s.fine - s.coarse;
      return PathStatus::ok;
    }
    const RandomStream rng(seed, stream, i);
    LimitOptions lo;
    lo.track_extremes = functional.needs_extremes();
    if (method == VarianceOracleResult::Method::limit_sde) {
      const LimitPaths lp = simulate_U(model, levy, params, res.eps_sim, res.h_sim, rng, lo);
      const PathSkeleton& x = lp.x.fine;
      if (sup) {
        const SupremumResult s = eval_supremum(x, functional.monitoring);
        const GradientResult g = gradient_at(functional, {s.value});
        if (!g.differentiable) return PathStatus::nondifferentiable;
        value = g.gradient[0] * lp.u[s.index];
        return PathStatus::ok;
      }
      const std::vector<double> z = eval_linear(functional.map, x.times, x.post);
      const GradientResult g = gradient_at(functional, z);
      if (!g.differentiable) return PathStatus::nondifferentiable;
      const std::vector<double> au = eval_linear(functional.map, x.times, lp.u);
      value = 0.0;
      for (std::size_t c = 0; c < au.size(); ++c) value += g.gradient[c] * au[c];
      return PathStatus::ok;
    }
    // phi_formula: conditional variance given the driver, averaged over paths.
    SimulationOptions so;
    so.track_extremes = lo.track_extremes;
    const CoupledPaths xp = simulate_level(model, levy, LevelParams{res.eps_sim, res.h_sim, res.eps_sim},
                                           limit_x_scheme(levy), rng, so);
    const PathSkeleton& x = xp.fine;
    const StochasticExponential e = stochastic_exponential(model, x);
    if (e.singular) return PathStatus::excluded;
    const std::vector<double> d = phi_increments(model, levy, x, e);
    if (sup) {
      const SupremumResult s = eval_supremum(x, functional.monitoring);
      const GradientResult g = gradient_at(functional, {s.value});
      if (!g.differentiable) return PathStatus::nondifferentiable;
      double integral = 0.0;
      for (std::size_t r = 1; r <= s.index; ++r) integral += d[r];
      const double phi = e.value[s.index] * e.value[s.index] * integral;
      value = ups2 * g.gradient[0] * g.gradient[0] * phi;
      return PathStatus::ok;
    }
    const std::vector<double> z = eval_linear(functional.map, x.times, x.post);
    const GradientResult g = gradient_at(functional, z);
    if (!g.differentiable) return PathStatus::nondifferentiable;
    std::vector<std::vector<double>> w;
    w.reserve(functional.map.components.size());
    for (const auto& c : functional.map.components) w.push_back(node_weights(c, x.times));
    double total = 0.0;
    for (std::size_t i1 = 0; i1 < w.size(); ++i1) {
      for (std::size_t j1 = 0; j1 < w.size(); ++j1) {
        const double gg = g.gradient[i1] * g.gradient[j1];
        if (gg == 0.0) continue;
        total += gg * double_integral(w[i1], w[j1], e.value, d);
      }
    }
    value = ups2 * total;
    return PathStatus::ok;
  };

  const std::size_t block = std::max<std::size_t>(1, options.block_size);
  const std::size_t n_blocks = static_cast<std::size_t>((n_paths + static_cast<std::int64_t>(block) - 1) /
                                                        static_cast<std::int64_t>(block));
  std::vector<OracleBlock> blocks(n_blocks);
  auto run = [&](std::size_t b) {
    const std::int64_t begin = static_cast<std::int64_t>(b * block);
    const std::int64_t end = std::min<std::int64_t>(n_paths, begin + static_cast<std::int64_t>(block));
    for (std::int64_t i = begin; i < end; ++i) {
      double v = 0.0;
      switch (one_path(static_cast<std::uint64_t>(i), v)) {
        case PathStatus::ok:
          blocks[b].acc.add(v);
          break;
        case PathStatus::excluded:
          ++blocks[b].excluded;
          break;
        case PathStatus::nondifferentiable:
          ++blocks[b].nondiff;
          break;
      }
    }
  };
  if (options.pool != nullptr) {
    options.pool->parallel_for(n_blocks, run);
  } else {
    for (std::size_t b = 0; b < n_blocks; ++b) run(b);
  }
  MomentAccumulator acc;
  for (const auto& b : blocks) {
    acc.merge(b.acc);
    res.excluded_paths += b.excluded;
    res.nondifferentiable += b.nondiff;
  }
  if (acc.count() < 2) throw NumericError("rho_sq_oracle: too few usable paths");
  if (method == VarianceOracleResult::Method::phi_formula) {
    res.rho_sq = acc.mean();
    res.mc_stderr = acc.stderr_mean();
  } else {
    res.rho_sq = acc.variance() * scale;
    res.mc_stderr = acc.stderr_variance() * scale;
  }
  res.exclusion_warning = static_cast<double>(res.excluded_paths) > 1e-3 * static_cast<double>(n_paths);
  return res;
}

}  // namespace levymlmc
