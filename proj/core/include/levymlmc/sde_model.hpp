#pragma once

#include <string>

namespace levymlmc {

// Named coefficient families. Parameters c1, c2 are interpreted per kind:
//   constant          a(x) = c1
//   linear            a(x) = c1 * x           (c1 defaults to 1)
//   affine            a(x) = c1 + c2 * x
//   logistic_damped   a(x) = c1 * x / (1 + x^2)
struct Coefficient {
  enum class Kind { constant, linear, affine, logistic_damped };
  Kind kind = Kind::linear;
  double c1 = 1.0;
  double c2 = 0.0;

  [[nodiscard]] double value(double x) const noexcept;
  [[nodiscard]] double derivative(double x) const noexcept;
  // a' identically zero, so the error process vanishes.
  [[nodiscard]] bool is_constant() const noexcept;

  friend bool operator==(const Coefficient&, const Coefficient&) = default;
};

std::string to_string(Coefficient::Kind kind);
Coefficient::Kind coefficient_kind_from_string(const std::string& name);

// dX = a(X_-) dY on [0, T], X_0 = x0.
struct SdeModel {
  Coefficient a;
  double x0 = 1.0;
  double T = 1.0;

  [[nodiscard]] double coeff(double x) const noexcept { return a.value(x); }
  [[nodiscard]] double coeff_prime(double x) const noexcept { return a.derivative(x); }

  void validate() const;

  friend bool operator==(const SdeModel&, const SdeModel&) = default;
};

// Largest difference quotient of a over a uniform probe grid on [lo, hi].
// Recorded for diagnostics; the families above are all globally Lipschitz.
double lipschitz_probe(const Coefficient& a, double lo, double hi, int points = 1001);

}  // namespace levymlmc
