#include "levymlmc/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levymlmc/errors.hpp"

namespace levymlmc {

SignedMeasure SignedMeasure::lebesgue(double T, double scale) {
  SignedMeasure mu;
  mu.knots = {0.0, T};
  mu.density = {scale};
  return mu;
}

SignedMeasure SignedMeasure::dirac(double t, double mass) {
  SignedMeasure mu;
  mu.atoms.emplace_back(t, mass);
  return mu;
}

double SignedMeasure::total_variation() const {
  double tv = 0.0;
  for (const auto& [t, m] : atoms) tv += std::abs(m);
  for (std::size_t i = 0; i < density.size(); ++i) {
    tv += std::abs(density[i]) * (knots[i + 1] - knots[i]);
  }
  return tv;
}

double SignedMeasure::cumulative_density(double t) const {
  double total = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    const double lo = knots[i];
    const double hi = std::min(knots[i + 1], t);
    if (hi <= lo) break;
    total += density[i] * (hi - lo);
  }
  return total;
}

LinearComponent LinearComponent::marginal_at(double t) {
  LinearComponent c;
  c.kind = Kind::marginal;
  c.t = t;
  return c;
}

LinearComponent LinearComponent::integral_of(SignedMeasure mu) {
  LinearComponent c;
  c.kind = Kind::integral;
  c.measure = std::move(mu);
  return c;
}

std::string to_string(Payoff::Kind kind) {
  switch (kind) {
    case Payoff::Kind::identity:
      return "identity";
    case Payoff::Kind::call:
      return "call";
    case Payoff::Kind::put:
      return "put";
    case Payoff::Kind::square:
      return "square";
    case Payoff::Kind::linear:
      return "linear";
  }
  return "unknown";
}

Payoff::Kind payoff_kind_from_string(const std::string& name) {
  if (name == "identity") return Payoff::Kind::identity;
  if (name == "call") return Payoff::Kind::call;
  if (name == "put") return Payoff::Kind::put;
  if (name == "square") return Payoff::Kind::square;
  if (name == "linear") return Payoff::Kind::linear;
  throw ConfigError("unknown payoff '" + name + "'");
}

double Payoff::value(const std::vector<double>& z) const {
  switch (kind) {
    case Kind::identity:
      return z[0];
    case Kind::call:
      return std::max(z[0] - strike, 0.0);
    case Kind::put:
      return std::max(strike - z[0], 0.0);
    case Kind::square:
      return z[0] * z[0];
    case Kind::linear: {
      double s = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) s += weights[i] * z[i];
      return s;
    }
  }
  return 0.0;
}

void FunctionalSpec::validate(double T) const {
  if (!(alpha >= 0.5)) throw DomainError("functional: alpha must be >= 1/2");
  const std::size_t d = dimension();
  if (d == 0) throw ConfigError("functional: the linear map has no components");
  if (f.kind == Payoff::Kind::linear) {
    if (f.weights.size() != d) {
      throw ConfigError("functional: linear payoff needs one weight per component");
    }
  } else if (d != 1) {
    throw ConfigError("functional: scalar payoff '" + to_string(f.kind) +
                      "' needs a one-dimensional argument");
  }
  if (kind != Kind::linear) return;
  const double slack = 1e-12 * T;
  for (const auto& c : map.components) {
    if (c.kind == LinearComponent::Kind::marginal) {
      if (!(c.t >= 0.0 && c.t <= T + slack)) throw DomainError("functional: marginal time outside [0, T]");
      continue;
    }
    const auto& mu = c.measure;
    for (const auto& [t, m] : mu.atoms) {
      if (!(t >= 0.0 && t <= T + slack) || !std::isfinite(m)) {
        throw DomainError("functional: atom outside [0, T] or with non-finite mass");
      }
    }
    if (!mu.density.empty() || !mu.knots.empty()) {
      if (mu.knots.size() != mu.density.size() + 1) {
        throw ConfigError("functional: density needs one more knot than values");
      }
      for (std::size_t i = 0; i + 1 < mu.knots.size(); ++i) {
        if (!(mu.knots[i + 1] > mu.knots[i])) throw ConfigError("functional: knots must increase");
      }
      if (mu.knots.front() < 0.0 || mu.knots.back() > T + slack) {
        throw DomainError("functional: density support outside [0, T]");
      }
      for (double v : mu.density) {
        if (!std::isfinite(v)) throw DomainError("functional: density values must be finite");
      }
    }
  }
}

FunctionalSpec marginal_functional(double t, Payoff f) {
  FunctionalSpec spec;
  spec.kind = FunctionalSpec::Kind::linear;
  spec.map.components.push_back(LinearComponent::marginal_at(t));
  spec.f = std::move(f);
  return spec;
}

FunctionalSpec integral_average_functional(double T, Payoff f) {
  FunctionalSpec spec;
  spec.kind = FunctionalSpec::Kind::linear;
  spec.map.components.push_back(LinearComponent::integral_of(SignedMeasure::lebesgue(T, 1.0 / T)));
  spec.f = std::move(f);
  return spec;
}

FunctionalSpec supremum_functional(Payoff f, Monitoring monitoring) {
  FunctionalSpec spec;
  spec.kind = FunctionalSpec::Kind::supremum;
  spec.f = std::move(f);
  spec.monitoring = monitoring;
  return spec;
}

namespace {

std::size_t last_index_at_or_before(const std::vector<double>& times, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

}  // namespace

std::vector<double> node_weights(const LinearComponent& component,
                                 const std::vector<double>& times) {
  std::vector<double> w(times.size(), 0.0);
  if (component.kind == LinearComponent::Kind::marginal) {
    w[last_index_at_or_before(times, component.t)] = 1.0;
    return w;
  }
  const SignedMeasure& mu = component.measure;
  if (!mu.density.empty()) {
    double prev = mu.cumulative_density(times[0]);
    for (std::size_t n = 1; n < times.size(); ++n) {
      const double cur = mu.cumulative_density(times[n]);
      w[n - 1] += cur - prev;
      prev = cur;
    }
  }
  for (const auto& [t, m] : mu.atoms) w[last_index_at_or_before(times, t)] += m;
  return w;
}

double eval_component(const LinearComponent& component, const std::vector<double>& times,
                      const std::vector<double>& values) {
  if (component.kind == LinearComponent::Kind::marginal) {
    return values[last_index_at_or_before(times, component.t)];
  }
  const SignedMeasure& mu = component.measure;
  double total = 0.0;
  if (!mu.density.empty()) {
    // Walk the density segments and the update intervals together.
    std::size_t seg = 0;
    for (std::size_t n = 1; n < times.size(); ++n) {
      const double a = times[n - 1];
      const double b = times[n];
      if (b <= a) continue;
      while (seg < mu.density.size() && mu.knots[seg + 1] <= a) ++seg;
      double mass = 0.0;
      for (std::size_t s = seg; s < mu.density.size() && mu.knots[s] < b; ++s) {
        const double lo = std::max(a, mu.knots[s]);
        const double hi = std::min(b, mu.knots[s + 1]);
        if (hi > lo) mass += mu.density[s] * (hi - lo);
      }
      total += values[n - 1] * mass;
    }
  }
  for (const auto& [t, m] : mu.atoms) total += m * values[last_index_at_or_before(times, t)];
  return total;
}

std::vector<double> eval_linear(const LinearMapSpec& map, const std::vector<double>& times,
                                const std::vector<double>& values) {
  if (times.empty() || times.size() != values.size()) {
    throw DomainError("eval_linear: times and values must be non-empty and aligned");
  }
  std::vector<double> out;
  out.reserve(map.components.size());
  for (const auto& c : map.components) out.push_back(eval_component(c, times, values));
  return out;
}

std::vector<double> eval_linear(const LinearMapSpec& map, const PathSkeleton& path) {
  return eval_linear(map, path.times, path.post);
}

SupremumResult eval_supremum(const PathSkeleton& path, Monitoring monitoring) {
  if (path.post.empty()) throw DomainError("eval_supremum: empty skeleton");
  const bool bridge = monitoring == Monitoring::continuous && !path.piecewise_constant;
  if (bridge && path.interval_sup.size() != path.size()) {
    throw ConfigError("eval_supremum: continuous monitoring needs a path simulated with extremes");
  }
  SupremumResult best{path.post[0], path.times[0], 0};
  for (std::size_t n = 1; n < path.size(); ++n) {
    if (bridge && path.interval_sup[n] > best.value) {
      best = {path.interval_sup[n], path.times[n - 1], n - 1};
    }
    if (path.pre[n] > best.value) best = {path.pre[n], path.times[n], n > 0 ? n - 1 : 0};
    if (path.post[n] > best.value) best = {path.post[n], path.times[n], n};
  }
  return best;
}

double eval_functional(const FunctionalSpec& spec, const PathSkeleton& path) {
  if (spec.kind == FunctionalSpec::Kind::supremum) {
    return spec.f.value({eval_supremum(path, spec.monitoring).value});
  }
  return spec.f.value(eval_linear(spec.map, path));
}

GradientResult gradient_at(const FunctionalSpec& spec, const std::vector<double>& point) {
  GradientResult r;
  const Payoff& f = spec.f;
  if (point.size() != spec.dimension()) {
    throw DomainError("gradient_at: point dimension does not match the functional");
  }
  auto at_kink = [&](double z) {
    return std::abs(z - f.strike) <= 1e-12 * std::max(1.0, std::abs(f.strike));
  };
  switch (f.kind) {
    case Payoff::Kind::identity:
      r.gradient = {1.0};
      break;
    case Payoff::Kind::call:
      r.differentiable = !at_kink(point[0]);
      r.gradient = {point[0] > f.strike ? 1.0 : 0.0};
      break;
    case Payoff::Kind::put:
      r.differentiable = !at_kink(point[0]);
      r.gradient = {point[0] < f.strike ? -1.0 : 0.0};
      break;
    case Payoff::Kind::square:
      r.gradient = {2.0 * point[0]};
      break;
    case Payoff::Kind::linear:
      r.gradient = f.weights;
      break;
  }
  return r;
}

double gradient_fd_error(const FunctionalSpec& spec, const std::vector<double>& point,
                         double step) {
  const GradientResult g = gradient_at(spec, point);
  double worst = 0.0;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(point[i]));
    std::vector<double> up = point, dn = point;
    up[i] += h;
    dn[i] -= h;
    const double fd = (spec.f.value(up) - spec.f.value(dn)) / (2.0 * h);
    const double scale = std::max(1.0, std::abs(g.gradient[i]));
    worst = std::max(worst, std::abs(fd - g.gradient[i]) / scale);
  }
  return worst;
}

}  // namespace levymlmc
