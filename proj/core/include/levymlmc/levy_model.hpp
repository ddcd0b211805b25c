#pragma once

#include <string>
#include <variant>
#include <vector>

#include "levymlmc/random_stream.hpp"

namespace levymlmc {

// Jump-size law of a compound Poisson measure.
//   constant: every jump equals p1
//   uniform:  uniform on [p1, p2]
//   normal:   N(p1, p2^2)
struct JumpDistribution {
  enum class Kind { constant, uniform, normal };
  Kind kind = Kind::constant;
  double p1 = 0.0;
  double p2 = 0.0;

  friend bool operator==(const JumpDistribution&, const JumpDistribution&) = default;
};

struct ZeroMeasure {
  friend bool operator==(const ZeroMeasure&, const ZeroMeasure&) = default;
};

struct CompoundPoissonMeasure {
  double rate = 0.0;
  JumpDistribution jumps;
  friend bool operator==(const CompoundPoissonMeasure&, const CompoundPoissonMeasure&) = default;
};

// Density c_plus x^{-1-alpha} on (0, 1] and c_minus |x|^{-1-alpha} on [-1, 0).
struct StableLikeMeasure {
  double c_plus = 0.0;
  double c_minus = 0.0;
  double alpha = 1.0;
  friend bool operator==(const StableLikeMeasure&, const StableLikeMeasure&) = default;
};

// Symmetric measure given by its magnitude tail nu(|x| >= h) at knots
// h_1 < ... < h_n, interpolated linearly in log-log coordinates. The
// measure lives on h_1 <= |x| <= h_n with an atom of mass tail_n at |x| = h_n.
// Queries outside [h_1, h_n] are domain errors.
struct TabulatedMeasure {
  std::vector<double> h;
  std::vector<double> tail;
  friend bool operator==(const TabulatedMeasure&, const TabulatedMeasure&) = default;
};

// Jumps with |size| >= h, sorted by time in (0, T].
struct BigJumpBatch {
  std::vector<double> times;
  std::vector<double> sizes;
};

struct SmallJumpDraw {
  double value = 0.0;
  bool exact = true;  // false when the Gaussian fallback was used
};

// Levy measure on R \ {0} with finite second moment. "Big" always means
// |x| >= h: tail_mass(h) = nu(|x| >= h) and truncated_second_moment(h)
// integrates over |x| < h, so the two partition every moment exactly.
class LevyMeasure {
 public:
  using Spec = std::variant<ZeroMeasure, CompoundPoissonMeasure, StableLikeMeasure,
                            TabulatedMeasure>;

  LevyMeasure() = default;
  explicit LevyMeasure(Spec spec);

  static LevyMeasure zero() { return LevyMeasure(ZeroMeasure{}); }
  static LevyMeasure compound_poisson(double rate, JumpDistribution jumps);
  static LevyMeasure stable_like(double c_plus, double c_minus, double alpha);
  static LevyMeasure tabulated(std::vector<double> h, std::vector<double> tail);

  [[nodiscard]] const Spec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::string kind_name() const;

  [[nodiscard]] bool is_zero() const noexcept;
  [[nodiscard]] bool is_finite() const noexcept;
  // +infinity for infinite-activity measures.
  [[nodiscard]] double total_mass() const;

  [[nodiscard]] double tail_mass(double h) const;
  [[nodiscard]] double truncated_second_moment(double h) const;
  [[nodiscard]] double second_moment() const;
  // Integral of x over |x| >= h.
  [[nodiscard]] double tail_first_moment(double h) const;
  // Integral of x over |x| < h; only finite for finite measures or symmetric ones.
  [[nodiscard]] double small_first_moment(double h) const;

  // One jump from nu restricted to lo <= |x| < hi, normalised. hi may be +inf.
  double sample_size(double lo, double hi, RandomStream& rng) const;

  friend bool operator==(const LevyMeasure&, const LevyMeasure&) = default;

 private:
  void validate() const;
  Spec spec_ = ZeroMeasure{};
};

struct LevyTriplet {
  double b = 0.0;
  double sigma = 0.0;
  LevyMeasure measure;

  // sigma >= 0 and finite parameters. Limit-process routines additionally
  // require sigma > 0 and check it themselves.
  void validate() const;

  friend bool operator==(const LevyTriplet&, const LevyTriplet&) = default;
};

double tail_mass(const LevyMeasure& measure, double h);
double truncated_second_moment(const LevyMeasure& measure, double h);

// b_h = b - int_{|x| >= h} x nu(dx): drift of Y^h between big jumps.
double compensated_drift(const LevyTriplet& triplet, double h);

BigJumpBatch sample_big_jumps(const LevyMeasure& measure, double h, double T,
                              RandomStream& rng);

// Jumps with lo <= |size| < hi over (0, T]; used for thinning and mid-band jumps.
BigJumpBatch sample_jumps_between(const LevyMeasure& measure, double lo, double hi,
                                  double T, RandomStream& rng);

// Increment over a window of length dt of M^h, the compensated martingale of
// jumps with |x| < h. Exact compound Poisson minus compensator when that
// restriction is finite, otherwise N(0, dt * truncated_second_moment(h)).
SmallJumpDraw small_jump_increment(const LevyTriplet& triplet, double h, double dt,
                                   RandomStream& rng);

}  // namespace levymlmc
