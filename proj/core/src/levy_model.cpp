#include "levymlmc/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "levymlmc/errors.hpp"
#include "levymlmc/special_functions.hpp"

namespace levymlmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive_h(double h, const char* what) {
  if (!(h > 0.0) || std::isnan(h)) {
    throw DomainError(std::string(what) + ": threshold h must be positive");
  }
}

// Moments of a jump law restricted to lo <= |x| < hi (hi may be infinite).
struct BandMoments {
  double mass = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// P(a < Z < b) computed on the side that avoids cancellation.
double normal_mass(double a, double b) {
  if (a >= 0.0) return normal_sf(a) - normal_sf(b);
  if (b <= 0.0) return normal_cdf(b) - normal_cdf(a);
  return 1.0 - normal_cdf(a) - normal_sf(b);
}

// Moments of N(mu, s^2) on the interval (x_lo, x_hi).
BandMoments normal_interval(double mu, double s, double x_lo, double x_hi) {
  BandMoments out;
  if (!(x_hi > x_lo)) return out;
  const double a = (x_lo - mu) / s;
  const double b = (x_hi - mu) / s;
  const double pa = std::isfinite(a) ? normal_pdf(a) : 0.0;
  const double pb = std::isfinite(b) ? normal_pdf(b) : 0.0;
  const double apa = std::isfinite(a) ? a * pa : 0.0;
  const double bpb = std::isfinite(b) ? b * pb : 0.0;
  const double mass = normal_mass(a, b);
  out.mass = mass;
  out.m1 = mu * mass + s * (pa - pb);
  out.m2 = (mu * mu + s * s) * mass + 2.0 * mu * s * (pa - pb) + s * s * (apa - bpb);
  return out;
}

BandMoments uniform_interval(double u, double v, double x_lo, double x_hi) {
  BandMoments out;
  const double lo = std::max(u, x_lo);
  const double hi = std::min(v, x_hi);
  if (!(hi > lo)) return out;
  const double width = v - u;
  out.mass = (hi - lo) / width;
  out.m1 = (hi * hi - lo * lo) / (2.0 * width);
  out.m2 = (hi * hi * hi - lo * lo * lo) / (3.0 * width);
  return out;
}

BandMoments add(BandMoments x, const BandMoments& y) {
  x.mass += y.mass;
  x.m1 += y.m1;
  x.m2 += y.m2;
  return x;
}

BandMoments jump_law_band(const JumpDistribution& law, double lo, double hi) {
  switch (law.kind) {
    case JumpDistribution::Kind::constant: {
      const double c = law.p1;
      const double mag = std::abs(c);
      if (mag >= lo && mag < hi) return {1.0, c, c * c};
      return {};
    }
    case JumpDistribution::Kind::uniform:
      return add(uniform_interval(law.p1, law.p2, lo, hi),
                 uniform_interval(law.p1, law.p2, -hi, -lo));
    case JumpDistribution::Kind::normal:
      return add(normal_interval(law.p1, law.p2, lo, hi),
                 normal_interval(law.p1, law.p2, -hi, -lo));
  }
  return {};
}

// Draw from N(mu, s^2) conditioned on (x_lo, x_hi) by inversion.
double sample_normal_interval(double mu, double s, double x_lo, double x_hi, double u) {
  const double a = (x_lo - mu) / s;
  const double b = (x_hi - mu) / s;
  double z;
  if (a >= 0.0) {
    const double sa = normal_sf(a);
    const double sb = normal_sf(b);
    z = -normal_quantile(std::clamp(sb + u * (sa - sb), 1e-300, 1.0 - 1e-16));
  } else if (b <= 0.0) {
    const double ca = normal_cdf(a);
    const double cb = normal_cdf(b);
    z = normal_quantile(std::clamp(ca + u * (cb - ca), 1e-300, 1.0 - 1e-16));
  } else {
    const double ca = normal_cdf(a);
    const double cb = normal_cdf(b);
    z = normal_quantile(std::clamp(ca + u * (cb - ca), 1e-300, 1.0 - 1e-16));
  }
  return std::clamp(mu + s * z, x_lo, x_hi);
}

double sample_jump_law_band(const JumpDistribution& law, double lo, double hi,
                            RandomStream& rng) {
  switch (law.kind) {
    case JumpDistribution::Kind::constant:
      return law.p1;
    case JumpDistribution::Kind::uniform: {
      const double pos_lo = std::max(law.p1, lo), pos_hi = std::min(law.p2, hi);
      const double neg_lo = std::max(law.p1, -hi), neg_hi = std::min(law.p2, -lo);
      const double wp = std::max(0.0, pos_hi - pos_lo);
      const double wn = std::max(0.0, neg_hi - neg_lo);
      const double pick = rng.uniform() * (wp + wn);
      const double u = rng.uniform();
      if (pick < wp) return pos_lo + u * wp;
      return neg_lo + u * wn;
    }
    case JumpDistribution::Kind::normal: {
      const double mu = law.p1, s = law.p2;
      const double mp = normal_mass((lo - mu) / s, (hi - mu) / s);
      const double mn = normal_mass((-hi - mu) / s, (-lo - mu) / s);
      const double pick = rng.uniform() * (mp + mn);
      const double u = rng.uniform();
      if (pick < mp) return sample_normal_interval(mu, s, lo, hi, u);
      return sample_normal_interval(mu, s, -hi, -lo, u);
    }
  }
  return 0.0;
}

// Stable-like: magnitude band [lo, hi) clipped to (0, 1].
BandMoments stable_band(const StableLikeMeasure& m, double lo, double hi) {
  BandMoments out;
  hi = std::min(hi, 1.0);
  if (!(hi > lo)) return out;
  const double c = m.c_plus + m.c_minus;
  const double a = m.alpha;
  out.mass = (lo > 0.0) ? c / a * (std::pow(lo, -a) - std::pow(hi, -a)) : kInf;
  out.m2 = c / (2.0 - a) * (std::pow(hi, 2.0 - a) - std::pow(lo, 2.0 - a));
  const double d = m.c_plus - m.c_minus;
  if (d == 0.0) {
    out.m1 = 0.0;
  } else if (a == 1.0) {
    out.m1 = (lo > 0.0) ? d * std::log(hi / lo) : d * kInf;
  } else if (lo > 0.0 || a < 1.0) {
    out.m1 = d * (std::pow(hi, 1.0 - a) - std::pow(lo, 1.0 - a)) / (1.0 - a);
  } else {
    out.m1 = d * kInf;
  }
  return out;
}

// Tabulated: power-law exponent on segment i.
double segment_exponent(const TabulatedMeasure& t, std::size_t i) {
  return -std::log(t.tail[i + 1] / t.tail[i]) / std::log(t.h[i + 1] / t.h[i]);
}

double tabulated_tail(const TabulatedMeasure& t, double h) {
  if (h < t.h.front() || h > t.h.back()) {
    throw DomainError("tabulated measure queried outside its table range");
  }
  if (h == t.h.back()) return t.tail.back();
  const auto it = std::upper_bound(t.h.begin(), t.h.end(), h);
  const std::size_t i = static_cast<std::size_t>(it - t.h.begin()) - 1;
  if (h == t.h[i]) return t.tail[i];
  return t.tail[i] * std::pow(h / t.h[i], -segment_exponent(t, i));
}

// Integral of |x|^k over the continuous part on magnitudes [lo, hi).
double tabulated_abs_moment(const TabulatedMeasure& t, double lo, double hi, int k) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < t.h.size(); ++i) {
    const double u = std::max(lo, t.h[i]);
    const double v = std::min(hi, t.h[i + 1]);
    if (!(v > u)) continue;
    const double p = segment_exponent(t, i);
    if (p == 0.0) continue;
    const double scale = t.tail[i] * p * std::pow(t.h[i], p);
    const double e = k - p;
    if (std::abs(e) < 1e-12) {
      total += scale * std::log(v / u);
    } else {
      total += scale * (std::pow(v, e) - std::pow(u, e)) / e;
    }
  }
  return total;
}

double tabulated_inverse_tail(const TabulatedMeasure& t, double tau) {
  if (tau <= t.tail.back()) return t.h.back();
  for (std::size_t i = 0; i + 1 < t.h.size(); ++i) {
    if (tau > t.tail[i + 1]) {
      const double p = segment_exponent(t, i);
      return std::clamp(t.h[i] * std::pow(tau / t.tail[i], -1.0 / p), t.h[i], t.h[i + 1]);
    }
  }
  return t.h.front();
}

double tabulated_tail_clamped(const TabulatedMeasure& t, double h) {
  if (h <= t.h.front()) return t.tail.front();
  if (h > t.h.back()) return 0.0;
  return tabulated_tail(t, h);
}

}  // namespace

LevyMeasure::LevyMeasure(Spec spec) : spec_(std::move(spec)) { validate(); }

LevyMeasure LevyMeasure::compound_poisson(double rate, JumpDistribution jumps) {
  return LevyMeasure(CompoundPoissonMeasure{rate, jumps});
}

LevyMeasure LevyMeasure::stable_like(double c_plus, double c_minus, double alpha) {
  return LevyMeasure(StableLikeMeasure{c_plus, c_minus, alpha});
}

LevyMeasure LevyMeasure::tabulated(std::vector<double> h, std::vector<double> tail) {
  return LevyMeasure(TabulatedMeasure{std::move(h), std::move(tail)});
}

void LevyMeasure::validate() const {
  std::visit(
      Overloaded{
          [](const ZeroMeasure&) {},
          [](const CompoundPoissonMeasure& m) {
            if (!(m.rate >= 0.0) || !std::isfinite(m.rate)) {
              throw DomainError("compound_poisson: rate must be finite and >= 0");
            }
            const auto& j = m.jumps;
            if (!std::isfinite(j.p1) || !std::isfinite(j.p2)) {
              throw DomainError("compound_poisson: jump parameters must be finite");
            }
            switch (j.kind) {
              case JumpDistribution::Kind::constant:
                if (j.p1 == 0.0) throw DomainError("compound_poisson: constant jump must be nonzero");
                break;
              case JumpDistribution::Kind::uniform:
                if (!(j.p2 > j.p1)) throw DomainError("compound_poisson: uniform jumps need p1 < p2");
                break;
              case JumpDistribution::Kind::normal:
                if (!(j.p2 > 0.0)) throw DomainError("compound_poisson: normal jumps need sd > 0");
                break;
            }
          },
          [](const StableLikeMeasure& m) {
            if (!(m.alpha > 0.0 && m.alpha < 2.0)) {
              throw DomainError("stable_like: alpha must lie in (0, 2)");
            }
            if (!(m.c_plus >= 0.0 && m.c_minus >= 0.0) || m.c_plus + m.c_minus <= 0.0 ||
                !std::isfinite(m.c_plus) || !std::isfinite(m.c_minus)) {
              throw DomainError("stable_like: c+ and c- must be >= 0 with a positive sum");
            }
          },
          [](const TabulatedMeasure& t) {
            if (t.h.size() < 2 || t.h.size() != t.tail.size()) {
              throw DomainError("user_tabulated: need at least two (h, tail) knots of equal length");
            }
            for (std::size_t i = 0; i < t.h.size(); ++i) {
              if (!(t.h[i] > 0.0) || !std::isfinite(t.h[i])) {
                throw DomainError("user_tabulated: knots must be positive and finite");
              }
              if (!(t.tail[i] > 0.0) || !std::isfinite(t.tail[i])) {
                throw DomainError("user_tabulated: tail values must be positive and finite");
              }
              if (i > 0 && !(t.h[i] > t.h[i - 1])) {
                throw DomainError("user_tabulated: knots must be strictly increasing");
              }
              if (i > 0 && t.tail[i] > t.tail[i - 1]) {
                throw DomainError("user_tabulated: tail must be nonincreasing");
              }
            }
          },
      },
      spec_);
}

std::string LevyMeasure::kind_name() const {
  return std::visit(Overloaded{
                        [](const ZeroMeasure&) { return std::string("zero"); },
                        [](const CompoundPoissonMeasure&) { return std::string("compound_poisson"); },
                        [](const StableLikeMeasure&) { return std::string("stable_like"); },
                        [](const TabulatedMeasure&) { return std::string("user_tabulated"); },
                    },
                    spec_);
}

bool LevyMeasure::is_zero() const noexcept {
  if (std::holds_alternative<ZeroMeasure>(spec_)) return true;
  if (const auto* cp = std::get_if<CompoundPoissonMeasure>(&spec_)) return cp->rate == 0.0;
  return false;
}

bool LevyMeasure::is_finite() const noexcept {
  return !std::holds_alternative<StableLikeMeasure>(spec_);
}

double LevyMeasure::total_mass() const {
  return std::visit(Overloaded{
                        [](const ZeroMeasure&) { return 0.0; },
                        [](const CompoundPoissonMeasure& m) { return m.rate; },
                        [](const StableLikeMeasure&) { return kInf; },
                        [](const TabulatedMeasure& t) { return t.tail.front(); },
                    },
                    spec_);
}

double LevyMeasure::tail_mass(double h) const {
  require_positive_h(h, "tail_mass");
  return std::visit(
      Overloaded{
          [](const ZeroMeasure&) { return 0.0; },
          [h](const CompoundPoissonMeasure& m) {
            return m.rate * jump_law_band(m.jumps, h, kInf).mass;
          },
          [h](const StableLikeMeasure& m) {
            if (h > 1.0) return 0.0;
            return (m.c_plus + m.c_minus) / m.alpha * (std::pow(h, -m.alpha) - 1.0);
          },
          [h](const TabulatedMeasure& t) { return tabulated_tail(t, h); },
      },
      spec_);
}

double LevyMeasure::truncated_second_moment(double h) const {
  require_positive_h(h, "truncated_second_moment");
  return std::visit(
      Overloaded{
          [](const ZeroMeasure&) { return 0.0; },
          [h](const CompoundPoissonMeasure& m) {
            return m.rate * jump_law_band(m.jumps, 0.0, h).m2;
          },
          [h](const StableLikeMeasure& m) {
            return (m.c_plus + m.c_minus) / (2.0 - m.alpha) *
                   std::pow(std::min(h, 1.0), 2.0 - m.alpha);
          },
          [h](const TabulatedMeasure& t) {
            tabulated_tail(t, h);  // range check
            return tabulated_abs_moment(t, t.h.front(), h, 2);
          },
      },
      spec_);
}

double LevyMeasure::second_moment() const {
  return std::visit(
      Overloaded{
          [](const ZeroMeasure&) { return 0.0; },
          [](const CompoundPoissonMeasure& m) {
            return m.rate * jump_law_band(m.jumps, 0.0, kInf).m2;
          },
          [](const StableLikeMeasure& m) {
            return (m.c_plus + m.c_minus) / (2.0 - m.alpha);
          },
          [](const TabulatedMeasure& t) {
            return tabulated_abs_moment(t, t.h.front(), t.h.back(), 2) +
                   t.tail.back() * t.h.back() * t.h.back();
          },
      },
      spec_);
}

double LevyMeasure::tail_first_moment(double h) const {
  require_positive_h(h, "tail_first_moment");
  return std::visit(
      Overloaded{
          [](const ZeroMeasure&) { return 0.0; },
          [h](const CompoundPoissonMeasure& m) {
            return m.rate * jump_law_band(m.jumps, h, kInf).m1;
          },
          [h](const StableLikeMeasure& m) { return stable_band(m, h, 1.0).m1; },
          [h](const TabulatedMeasure& t) {
            tabulated_tail(t, h);
            return 0.0;
          },
      },
      spec_);
}

double LevyMeasure::small_first_moment(double h) const {
  require_positive_h(h, "small_first_moment");
  return std::visit(
      Overloaded{
          [](const ZeroMeasure&) { return 0.0; },
          [h](const CompoundPoissonMeasure& m) {
            return m.rate * jump_law_band(m.jumps, 0.0, h).m1;
          },
          [h](const StableLikeMeasure& m) { return stable_band(m, 0.0, h).m1; },
          [](const TabulatedMeasure&) { return 0.0; },
      },
      spec_);
}

double LevyMeasure::sample_size(double lo, double hi, RandomStream& rng) const {
  return std::visit(
      Overloaded{
          [](const ZeroMeasure&) -> double {
            throw DomainError("sample_size: the zero measure has no jumps");
          },
          [&](const CompoundPoissonMeasure& m) {
            return sample_jump_law_band(m.jumps, lo, hi, rng);
          },
          [&](const StableLikeMeasure& m) {
            // Inverse transform on the magnitude tail (x^{-alpha} - 1).
            const double a = m.alpha;
            const double t_hi = (hi >= 1.0) ? 0.0 : std::pow(hi, -a) - 1.0;
            const double t_lo = std::pow(lo, -a) - 1.0;
            const double tau = t_hi + rng.uniform() * (t_lo - t_hi);
            const double mag = std::clamp(std::pow(1.0 + tau, -1.0 / a), lo, std::min(hi, 1.0));
            const double p_plus = m.c_plus / (m.c_plus + m.c_minus);
            return rng.uniform() < p_plus ? mag : -mag;
          },
          [&](const TabulatedMeasure& t) {
            const double t_hi = tabulated_tail_clamped(t, hi);
            const double t_lo = tabulated_tail_clamped(t, lo);
            const double tau = t_hi + rng.uniform() * (t_lo - t_hi);
            const double mag = tabulated_inverse_tail(t, tau);
            return rng.uniform() < 0.5 ? mag : -mag;
          },
      },
      spec_);
}

void LevyTriplet::validate() const {
  if (!std::isfinite(b)) throw DomainError("levy: drift b must be finite");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError("levy: sigma must be finite and >= 0");
  }
}

double tail_mass(const LevyMeasure& measure, double h) { return measure.tail_mass(h); }

double truncated_second_moment(const LevyMeasure& measure, double h) {
  return measure.truncated_second_moment(h);
}

double compensated_drift(const LevyTriplet& triplet, double h) {
  return triplet.b - triplet.measure.tail_first_moment(h);
}

namespace {

double band_mass(const LevyMeasure& measure, double lo, double hi) {
  const double upper = std::isinf(hi) ? 0.0 : measure.tail_mass(hi);
  const double lower = (lo <= 0.0) ? measure.total_mass() : measure.tail_mass(lo);
  return std::max(0.0, lower - upper);
}

}  // namespace

BigJumpBatch sample_jumps_between(const LevyMeasure& measure, double lo, double hi,
                                  double T, RandomStream& rng) {
  BigJumpBatch batch;
  if (measure.is_zero() || !(hi > lo)) return batch;
  const double rate = band_mass(measure, lo, hi);
  if (!(rate > 0.0)) return batch;
  if (!std::isfinite(rate)) {
    throw DomainError("sample_jumps_between: band has infinite mass");
  }
  double t = rng.exponential(rate);
  while (t <= T) {
    batch.times.push_back(t);
    batch.sizes.push_back(measure.sample_size(lo, hi, rng));
    t += rng.exponential(rate);
  }
  return batch;
}

BigJumpBatch sample_big_jumps(const LevyMeasure& measure, double h, double T,
                              RandomStream& rng) {
  require_positive_h(h, "sample_big_jumps");
  if (!(T > 0.0)) throw DomainError("sample_big_jumps: T must be positive");
  return sample_jumps_between(measure, h, kInf, T, rng);
}

SmallJumpDraw small_jump_increment(const LevyTriplet& triplet, double h, double dt,
                                   RandomStream& rng) {
  require_positive_h(h, "small_jump_increment");
  if (!(dt > 0.0)) throw DomainError("small_jump_increment: dt must be positive");
  const LevyMeasure& nu = triplet.measure;
  if (nu.is_zero()) return {0.0, true};
  if (nu.is_finite()) {
    const double rate = band_mass(nu, 0.0, h);
    if (!(rate > 0.0)) return {0.0, true};
    double sum = 0.0;
    double t = rng.exponential(rate);
    while (t <= dt) {
      sum += nu.sample_size(0.0, h, rng);
      t += rng.exponential(rate);
    }
    return {sum - dt * nu.small_first_moment(h), true};
  }
  const double var = dt * nu.truncated_second_moment(h);
  return {std::sqrt(var) * rng.normal(), false};
}

}  // namespace levymlmc
