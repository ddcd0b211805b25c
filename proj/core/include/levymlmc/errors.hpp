#pragma once

#include <stdexcept>
#include <string>

namespace levymlmc {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the domain of a function (h <= 0, t outside
// [0, T], M < 2, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid configuration: incompatible grids, unknown keys,
// missing fields.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A requested level schedule cannot be realised by the Lévy measure.
class InfeasibleScheduleError : public Error {
 public:
  using Error::Error;
};

// The chosen path scheme cannot simulate the given driver exactly.
class SchemeUnsupportedError : public Error {
 public:
  using Error::Error;
};

// Runtime numerical failure (singular stochastic exponential, NaN, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Too few data points for a statistical procedure.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace levymlmc
