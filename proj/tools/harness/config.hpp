#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "levymlmc/functionals.hpp"
#include "levymlmc/levy_model.hpp"
#include "levymlmc/limit_process.hpp"
#include "levymlmc/mlmc_engine.hpp"
#include "levymlmc/path_schemes.hpp"
#include "levymlmc/sde_model.hpp"

namespace levymlmc::harness {

// Functional as written in the config. `preset` is one of marginal,
// integral_average, supremum or linear; only `linear` reads `components`.
struct FunctionalConfig {
  std::string preset = "marginal";
  double t = 1.0;
  Payoff payoff;
  double alpha = 1.0;
  Monitoring monitoring = Monitoring::continuous;
  std::vector<LinearComponent> components;

  friend bool operator==(const FunctionalConfig&, const FunctionalConfig&) = default;
};

struct ScheduleConfig {
  int M = 2;
  double theta = 0.0;
  int K_max = 12;
  ScheduleStrategy strategy;

  friend bool operator==(const ScheduleConfig&, const ScheduleConfig&) = default;
};

struct LevelsConfig {
  std::int64_t n_pilot = 10000;
  int k_min = 2;
  int k_max = 7;

  friend bool operator==(const LevelsConfig&, const LevelsConfig&) = default;
};

struct CltSection {
  int replications = 200;
  std::optional<double> reference;
  std::optional<double> reference_delta;
  double level = 0.01;
  // Compare var(z) at the smallest delta against this oracle when set.
  std::optional<double> rho_sq;

  friend bool operator==(const CltSection&, const CltSection&) = default;
};

struct RhoConfig {
  std::vector<std::string> methods{"limit_sde", "phi_formula", "level_empirical"};
  std::int64_t n_paths = 100000;
  double eps_sim = 1.0 / 1024.0;
  double h_sim = 0.0;
  int level_k = 7;

  friend bool operator==(const RhoConfig&, const RhoConfig&) = default;
};

struct TuneConfig {
  int M_min = 2;
  int M_max = 10;
  std::vector<double> betas{0.0, 1.0};

  friend bool operator==(const TuneConfig&, const TuneConfig&) = default;
};

struct RunConfig {
  SdeModel model;
  LevyTriplet levy;
  FunctionalConfig functional;
  ScheduleConfig schedule;
  double delta = 0.02;
  std::vector<double> deltas{0.08, 0.04, 0.02};
  Scheme scheme = Scheme::idealised;
  std::uint64_t seed = 1;
  double beta = 0.0;
  std::string output_dir = "out";
  LevelsConfig levels;
  CltSection clt;
  RhoConfig rho;
  TuneConfig tune;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Strict parsing: unknown keys and wrong types are ConfigErrors. Missing keys
// take the defaults above.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Fully resolved config; parse_config(emit_config(c)) == c.
nlohmann::json emit_config(const RunConfig& config);

// FNV-1a 64 over the compact dump of emit_config.
std::uint64_t config_hash(const RunConfig& config);
std::string hex64(std::uint64_t v);

// Resolves the functional. Marginal times that are not on the level-1 grid
// are moved to the nearest grid time; each move appends a warning.
FunctionalSpec resolve_functional(const RunConfig& config, std::vector<std::string>* warnings = nullptr);

LevelSchedule resolve_schedule(const RunConfig& config);

}  // namespace levymlmc::harness
