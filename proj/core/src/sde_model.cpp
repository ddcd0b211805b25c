#include "levymlmc/sde_model.hpp"

#include <algorithm>
#include <cmath>

#include "levymlmc/errors.hpp"

namespace levymlmc {

double Coefficient::value(double x) const noexcept {
  switch (kind) {
    case Kind::constant:
      return c1;
    case Kind::linear:
      return c1 * x;
    case Kind::affine:
      return c1 + c2 * x;
    case Kind::logistic_damped:
      return c1 * x / (1.0 + x * x);
  }
  return 0.0;
}

double Coefficient::derivative(double x) const noexcept {
  switch (kind) {
    case Kind::constant:
      return 0.0;
    case Kind::linear:
      return c1;
    case Kind::affine:
      return c2;
    case Kind::logistic_damped: {
      const double d = 1.0 + x * x;
      return c1 * (1.0 - x * x) / (d * d);
    }
  }
  return 0.0;
}

bool Coefficient::is_constant() const noexcept {
  switch (kind) {
    case Kind::constant:
      return true;
    case Kind::linear:
    case Kind::logistic_damped:
      return c1 == 0.0;
    case Kind::affine:
      return c2 == 0.0;
  }
  return false;
}

std::string to_string(Coefficient::Kind kind) {
  switch (kind) {
    case Coefficient::Kind::constant:
      return "constant";
    case Coefficient::Kind::linear:
      return "linear";
    case Coefficient::Kind::affine:
      return "affine";
    case Coefficient::Kind::logistic_damped:
      return "logistic_damped";
  }
  return "unknown";
}

Coefficient::Kind coefficient_kind_from_string(const std::string& name) {
  if (name == "constant") return Coefficient::Kind::constant;
  if (name == "linear") return Coefficient::Kind::linear;
  if (name == "affine") return Coefficient::Kind::affine;
  if (name == "logistic_damped") return Coefficient::Kind::logistic_damped;
  throw ConfigError("unknown coefficient family '" + name + "'");
}

void SdeModel::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("model: horizon T must be positive");
  if (!std::isfinite(x0)) throw DomainError("model: x0 must be finite");
  if (!std::isfinite(a.c1) || !std::isfinite(a.c2)) {
    throw DomainError("model: coefficient parameters must be finite");
  }
}

double lipschitz_probe(const Coefficient& a, double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw DomainError("lipschitz_probe: need hi > lo and >= 2 points");
  double best = 0.0;
  const double step = (hi - lo) / (points - 1);
  double prev = a.value(lo);
  for (int i = 1; i < points; ++i) {
    const double cur = a.value(lo + i * step);
    best = std::max(best, std::abs(cur - prev) / step);
    prev = cur;
  }
  return best;
}

}  // namespace levymlmc
