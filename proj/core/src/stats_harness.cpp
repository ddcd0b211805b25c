#include "levymlmc/stats_harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "levymlmc/errors.hpp"
#include "levymlmc/random_stream.hpp"
#include "levymlmc/special_functions.hpp"
#include "lilliefors_table.inc"

namespace levymlmc {

namespace {

struct Fitted {
  double mean = 0.0;
  double sd = 0.0;
};

Fitted fit_normal(const std::vector<double>& x) {
  MomentAccumulator acc;
  for (double v : x) acc.add(v);
  return {acc.mean(), std::sqrt(acc.variance())};
}

bool is_degenerate(const std::vector<double>& x) {
  if (x.empty()) return true;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *lo == *hi;
}

double scaled_statistic(double d, std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  return d * (rn - 0.01 + 0.85 / rn);
}

// p-value for one table row by interpolating log p in the critical value.
double row_p_value(const double* crit, double dstar) {
  const std::size_t m = detail::kLillieforsLevels;
  const double* probs = detail::kLillieforsProbs;
  if (dstar <= crit[0]) return probs[0] + (1.0 - probs[0]) * (1.0 - dstar / crit[0]);
  for (std::size_t i = 1; i < m; ++i) {
    if (dstar <= crit[i]) {
      const double w = (dstar - crit[i - 1]) / (crit[i] - crit[i - 1]);
      return std::exp(std::log(probs[i - 1]) + w * (std::log(probs[i]) - std::log(probs[i - 1])));
    }
  }
  // Beyond the table: log p linear in d^2 through the last two points.
  const double x0 = crit[m - 2] * crit[m - 2];
  const double x1 = crit[m - 1] * crit[m - 1];
  const double slope = (std::log(probs[m - 1]) - std::log(probs[m - 2])) / (x1 - x0);
  return std::exp(std::log(probs[m - 1]) + slope * (dstar * dstar - x1));
}

}  // namespace

double lilliefors_statistic(std::vector<double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw InsufficientDataError("lilliefors_statistic: need at least two samples");
  const Fitted f = fit_normal(samples);
  if (!(f.sd > 0.0)) return 0.0;
  std::sort(samples.begin(), samples.end());
  double d = 0.0;
  const double nn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = normal_cdf((samples[i] - f.mean) / f.sd);
    d = std::max(d, std::max(static_cast<double>(i + 1) / nn - c, c - static_cast<double>(i) / nn));
  }
  return d;
}

double lilliefors_p_value(double d, std::size_t n) {
  if (n < 4) throw InsufficientDataError("lilliefors_p_value: need at least four samples");
  const double dstar = scaled_statistic(d, n);
  const std::size_t rows = detail::kLillieforsSizeCount;
  const auto* sizes = detail::kLillieforsSizes;
  if (n <= static_cast<std::size_t>(sizes[0])) return row_p_value(detail::kLillieforsCritical[0], dstar);
  if (n >= static_cast<std::size_t>(sizes[rows - 1])) {
    return row_p_value(detail::kLillieforsCritical[rows - 1], dstar);
  }
  std::size_t r = 1;
  while (static_cast<std::size_t>(sizes[r]) < n) ++r;
  // Interpolate in 1/sqrt(n) between neighbouring rows on the log-p scale.
  const double x = 1.0 / std::sqrt(static_cast<double>(n));
  const double x0 = 1.0 / std::sqrt(static_cast<double>(sizes[r - 1]));
  const double x1 = 1.0 / std::sqrt(static_cast<double>(sizes[r]));
  const double w = (x - x0) / (x1 - x0);
  const double p0 = row_p_value(detail::kLillieforsCritical[r - 1], dstar);
  const double p1 = row_p_value(detail::kLillieforsCritical[r], dstar);
  return std::exp((1.0 - w) * std::log(p0) + w * std::log(p1));
}

AndersonDarling anderson_darling(std::vector<double> samples) {
  const std::size_t n = samples.size();
  if (n < 8) throw InsufficientDataError("anderson_darling: need at least eight samples");
  const Fitted f = fit_normal(samples);
  AndersonDarling out;
  if (!(f.sd > 0.0)) return out;
  std::sort(samples.begin(), samples.end());
  const double nn = static_cast<double>(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = (samples[i] - f.mean) / f.sd;
    const double zj = (samples[n - 1 - i] - f.mean) / f.sd;
    const double lo = std::log(std::max(normal_cdf(zi), 1e-300));
    const double hi = std::log(std::max(normal_sf(zj), 1e-300));
    s += (2.0 * static_cast<double>(i) + 1.0) * (lo + hi);
  }
  const double a2 = -nn - s / nn;
  const double a = a2 * (1.0 + 0.75 / nn + 2.25 / (nn * nn));
  out.a_star_sq = a;
  double p;
  if (a >= 153.0) {
    // The fitted quadratic turns upward past its vertex near 153.5.
    p = 0.0;
  } else if (a >= 0.6) {
    p = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  } else if (a >= 0.34) {
    p = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  } else if (a >= 0.2) {
    p = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  } else {
    p = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  }
  out.p_value = std::clamp(p, 0.0, 1.0);
  return out;
}

TestReport normality_test(const std::vector<double>& samples, double level, std::uint64_t seed) {
  TestReport r;
  r.name = "lilliefors_ks";
  r.tolerance = level;
  r.seed = seed;
  r.sample_sizes = {static_cast<std::int64_t>(samples.size())};
  if (samples.size() < 100) {
    throw InsufficientDataError("normality_test: need at least 100 samples");
  }
  if (is_degenerate(samples)) {
    r.degenerate = true;
    r.pass = false;
    r.note = "degenerate input: all samples equal";
    return r;
  }
  r.value = lilliefors_statistic(samples);
  r.p_value = lilliefors_p_value(r.value, samples.size());
  r.pass = *r.p_value > level;
  const AndersonDarling ad = anderson_darling(samples);
  std::ostringstream os;
  os << "anderson_darling A*2=" << ad.a_star_sq << " p=" << ad.p_value;
  r.note = os.str();
  return r;
}

TwoSampleKs two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InsufficientDataError("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d)};
}

RegressionFit variance_decay_regression(const std::vector<double>& eps_prev,
                                        const std::vector<double>& var, double slope_lo,
                                        double slope_hi, double r2_min) {
  if (eps_prev.size() != var.size()) throw DomainError("regression: size mismatch");
  if (var.size() < 4) throw InsufficientDataError("variance_decay_regression: need at least 4 levels");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < var.size(); ++i) {
    if (!(var[i] > 0.0) || !(eps_prev[i] > 0.0)) {
      throw NumericError("variance_decay_regression: variances and widths must be positive");
    }
    x.push_back(std::log(eps_prev[i]));
    y.push_back(std::log(var[i]));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  RegressionFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.pass = fit.slope >= slope_lo && fit.slope <= slope_hi && fit.r_squared >= r2_min;
  return fit;
}

RegressionFit variance_decay_regression(const std::vector<LevelStats>& stats, int M) {
  std::vector<double> eps_prev, var;
  for (const auto& s : stats) {
    eps_prev.push_back(s.eps * M);
    var.push_back(s.variance());
  }
  return variance_decay_regression(eps_prev, var);
}

BiasFit bias_regression(const std::vector<double>& eps, const std::vector<double>& means,
                        const std::vector<double>& stderrs, double reference, double alpha) {
  if (eps.size() != means.size() || eps.size() != stderrs.size()) {
    throw DomainError("bias_regression: size mismatch");
  }
  if (eps.size() < 3) throw InsufficientDataError("bias_regression: need at least 3 levels");
  const bool unit = std::any_of(stderrs.begin(), stderrs.end(), [](double s) { return !(s > 0.0); });
  double sxx = 0.0, sxy = 0.0;
  std::vector<double> xs(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double x = std::pow(eps[i], alpha);
    const double w = unit ? 1.0 : 1.0 / (stderrs[i] * stderrs[i]);
    xs[i] = x;
    sxx += w * x * x;
    sxy += w * x * (means[i] - reference);
  }
  BiasFit fit;
  fit.levels = eps.size();
  fit.kappa_hat = sxy / sxx;
  if (unit) {
    double rss = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const double r = means[i] - reference - fit.kappa_hat * xs[i];
      rss += r * r;
    }
    fit.stderr_ = std::sqrt(rss / static_cast<double>(eps.size() - 1) / sxx);
  } else {
    fit.stderr_ = 1.0 / std::sqrt(sxx);
  }
  return fit;
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t delta_index, std::size_t r) {
  return splitmix64(splitmix64(seed + 0x9E3779B97F4A7C15ull * (delta_index + 1)) ^
                    static_cast<std::uint64_t>(r));
}

CltExperiment run_clt_experiment(const CltConfig& cfg) {
  if (cfg.replications < 100) {
    throw InsufficientDataError("run_clt_experiment: need at least 100 replications");
  }
  if (cfg.deltas.empty()) throw ConfigError("run_clt_experiment: empty delta grid");
  const double alpha = cfg.functional.alpha;
  const int M = cfg.schedule.M;
  const double T = cfg.model.T;

  CltExperiment exp;
  if (cfg.reference) {
    exp.reference = *cfg.reference;
  } else if (cfg.reference_delta) {
    const ReplicationPlan plan = make_plan(*cfg.reference_delta, alpha, M, T);
    EngineOptions opts{cfg.beta, cfg.pool, 512};
    const MlmcEstimate ref = run_estimator(cfg.model, cfg.levy, cfg.functional, cfg.schedule, plan,
                                           cfg.scheme, splitmix64(cfg.seed ^ 0xF00DF00Dull), opts);
    exp.reference = ref.value;
    exp.reference_stderr = ref.stderr_;
    exp.reference_from_run = true;
  } else {
    throw ConfigError("run_clt_experiment: no reference value (give reference or reference_delta)");
  }

  for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
    const double delta = cfg.deltas[di];
    const ReplicationPlan plan = make_plan(delta, alpha, M, T);
    if (plan.L > cfg.schedule.depth()) {
      throw ConfigError("run_clt_experiment: schedule too shallow for delta " + std::to_string(delta));
    }
    CltDeltaResult res;
    res.delta = delta;
    res.L = plan.L;
    const std::size_t R = static_cast<std::size_t>(cfg.replications);
    std::vector<MlmcEstimate> runs(R);
    res.seeds.resize(R);
    for (std::size_t r = 0; r < R; ++r) res.seeds[r] = replication_seed(cfg.seed, di, r);
    auto one = [&](std::size_t r) {
      EngineOptions opts{cfg.beta, nullptr, 512};
      runs[r] = run_estimator(cfg.model, cfg.levy, cfg.functional, cfg.schedule, plan, cfg.scheme,
                              res.seeds[r], opts);
    };
    if (cfg.pool != nullptr) {
      cfg.pool->parallel_for(R, one);
    } else {
      for (std::size_t r = 0; r < R; ++r) one(r);
    }
    MomentAccumulator zacc;
    double cost = 0.0;
    res.pooled_levels = runs[0].levels;
    for (std::size_t r = 0; r < R; ++r) {
      res.estimates.push_back(runs[r].value);
      const double z = (runs[r].value - exp.reference) / delta;
      res.z.push_back(z);
      zacc.add(z);
      cost += runs[r].total_cost;
      if (r > 0) {
        for (std::size_t k = 0; k < res.pooled_levels.size(); ++k) {
          res.pooled_levels[k].merge(runs[r].levels[k]);
        }
      }
    }
    res.mean_z = zacc.mean();
    res.var_z = zacc.variance();
    res.var_z_stderr = zacc.stderr_variance();
    res.mean_cost = cost / static_cast<double>(R);
    double pred = 0.0;
    for (std::size_t k = 0; k < res.pooled_levels.size(); ++k) {
      pred += res.pooled_levels[k].variance() / static_cast<double>(plan.n[k]);
    }
    res.predicted_var_z = pred / (delta * delta);
    exp.results.push_back(std::move(res));
  }

  const auto finest = std::min_element(exp.results.begin(), exp.results.end(),
                                       [](const auto& a, const auto& b) { return a.delta < b.delta; });
  exp.rho_hat_sq = finest->var_z;
  if (finest->pooled_levels.size() >= 3) {
    std::vector<double> eps, means, se;
    for (const auto& l : finest->pooled_levels) {
      eps.push_back(l.eps);
      means.push_back(l.fine.mean());
      se.push_back(l.fine.stderr_mean());
    }
    exp.bias = bias_regression(eps, means, se, exp.reference, alpha);
  }
  return exp;
}

}  // namespace levymlmc
