#pragma once

#include <string>
#include <utility>
#include <vector>

#include "levymlmc/path_schemes.hpp"

namespace levymlmc {

// Finite signed measure on [0, T]: point masses plus a piecewise-constant
// density taking value density[i] on [knots[i], knots[i+1]).
struct SignedMeasure {
  std::vector<std::pair<double, double>> atoms;  // (time, mass)
  std::vector<double> knots;
  std::vector<double> density;

  static SignedMeasure lebesgue(double T, double scale = 1.0);
  static SignedMeasure dirac(double t, double mass = 1.0);

  [[nodiscard]] double total_variation() const;
  // Density mass of (0, t].
  [[nodiscard]] double cumulative_density(double t) const;

  friend bool operator==(const SignedMeasure&, const SignedMeasure&) = default;
};

struct LinearComponent {
  enum class Kind { marginal, integral };
  Kind kind = Kind::marginal;
  double t = 0.0;  // marginal time
  SignedMeasure measure;

  static LinearComponent marginal_at(double t);
  static LinearComponent integral_of(SignedMeasure mu);

  friend bool operator==(const LinearComponent&, const LinearComponent&) = default;
};

struct LinearMapSpec {
  std::vector<LinearComponent> components;
  friend bool operator==(const LinearMapSpec&, const LinearMapSpec&) = default;
};

// Payoff f. Scalar payoffs act on a one-dimensional argument; `linear`
// computes sum_i weights[i] * z_i.
struct Payoff {
  enum class Kind { identity, call, put, square, linear };
  Kind kind = Kind::identity;
  double strike = 0.0;
  std::vector<double> weights;

  [[nodiscard]] double value(const std::vector<double>& z) const;
  friend bool operator==(const Payoff&, const Payoff&) = default;
};

std::string to_string(Payoff::Kind kind);
Payoff::Kind payoff_kind_from_string(const std::string& name);

// How the running supremum is observed. `continuous` adds the exact
// Brownian-bridge excursion inside each update interval; `skeleton` takes
// the maximum over update-time values only.
enum class Monitoring { continuous, skeleton };

struct FunctionalSpec {
  enum class Kind { linear, supremum };
  Kind kind = Kind::linear;
  LinearMapSpec map;
  Payoff f;
  double alpha = 1.0;
  Monitoring monitoring = Monitoring::continuous;

  [[nodiscard]] std::size_t dimension() const noexcept {
    return kind == Kind::supremum ? 1 : map.components.size();
  }
  [[nodiscard]] bool needs_extremes() const noexcept {
    return kind == Kind::supremum && monitoring == Monitoring::continuous;
  }
  // Checks f against the dimension, alpha >= 1/2 and times inside [0, T].
  void validate(double T) const;

  friend bool operator==(const FunctionalSpec&, const FunctionalSpec&) = default;
};

// Presets.
FunctionalSpec marginal_functional(double t, Payoff f = {});
FunctionalSpec integral_average_functional(double T, Payoff f = {});
FunctionalSpec supremum_functional(Payoff f = {}, Monitoring monitoring = Monitoring::continuous);

struct SupremumResult {
  double value = 0.0;
  double time = 0.0;
  std::size_t index = 0;  // update index at (or just before) the maximiser
};

// Node weights w with A x = sum_n w[n] * x(T_n) for a path that is
// piecewise constant between the given update times.
std::vector<double> node_weights(const LinearComponent& component,
                                 const std::vector<double>& times);

double eval_component(const LinearComponent& component, const std::vector<double>& times,
                      const std::vector<double>& values);
std::vector<double> eval_linear(const LinearMapSpec& map, const std::vector<double>& times,
                                const std::vector<double>& values);
std::vector<double> eval_linear(const LinearMapSpec& map, const PathSkeleton& path);

SupremumResult eval_supremum(const PathSkeleton& path,
                             Monitoring monitoring = Monitoring::skeleton);

double eval_functional(const FunctionalSpec& spec, const PathSkeleton& path);

struct GradientResult {
  std::vector<double> gradient;
  bool differentiable = true;
};

GradientResult gradient_at(const FunctionalSpec& spec, const std::vector<double>& point);

// Largest relative deviation between gradient_at and central differences.
double gradient_fd_error(const FunctionalSpec& spec, const std::vector<double>& point,
                         double step = 1e-6);

}  // namespace levymlmc
