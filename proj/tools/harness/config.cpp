#include "config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "levymlmc/errors.hpp"

namespace levymlmc::harness {

using nlohmann::json;

namespace {

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* a : keys) known = known || k == a;
    if (!known) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_number(const json& j, const char* key, double& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  out = j.at(key).get<double>();
}

void read_optional(const json& j, const char* key, std::optional<double>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number or null");
  out = j.at(key).get<double>();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---- model

SdeModel parse_model(const json& j) {
  allow_keys(j, "model", {"coefficient", "x0", "T"});
  SdeModel m;
  if (j.contains("coefficient")) {
    const json& c = j.at("coefficient");
    allow_keys(c, "model.coefficient", {"kind", "c1", "c2"});
    std::string kind = to_string(m.a.kind);
    read(c, "kind", kind, "model.coefficient");
    m.a.kind = coefficient_kind_from_string(kind);
    read_number(c, "c1", m.a.c1, "model.coefficient");
    read_number(c, "c2", m.a.c2, "model.coefficient");
  }
  read_number(j, "x0", m.x0, "model");
  read_number(j, "T", m.T, "model");
  m.validate();
  return m;
}

json emit_model(const SdeModel& m) {
  return {{"coefficient", {{"kind", to_string(m.a.kind)}, {"c1", m.a.c1}, {"c2", m.a.c2}}},
          {"x0", m.x0},
          {"T", m.T}};
}

// ---- levy

std::string jump_kind_name(JumpDistribution::Kind k) {
  switch (k) {
    case JumpDistribution::Kind::constant:
      return "constant";
    case JumpDistribution::Kind::uniform:
      return "uniform";
    case JumpDistribution::Kind::normal:
      return "normal";
  }
  return "constant";
}

JumpDistribution::Kind jump_kind(const std::string& s) {
  if (s == "constant") return JumpDistribution::Kind::constant;
  if (s == "uniform") return JumpDistribution::Kind::uniform;
  if (s == "normal") return JumpDistribution::Kind::normal;
  throw ConfigError("levy.measure.jumps: unknown jump law '" + s + "'");
}

LevyMeasure parse_measure(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("levy.measure: needs a 'kind'");
  std::string kind;
  read(j, "kind", kind, "levy.measure");
  if (kind == "zero") {
    allow_keys(j, "levy.measure", {"kind"});
    return LevyMeasure::zero();
  }
  if (kind == "compound_poisson") {
    allow_keys(j, "levy.measure", {"kind", "rate", "jumps"});
    double rate = 0.0;
    read_number(j, "rate", rate, "levy.measure");
    JumpDistribution d;
    if (!j.contains("jumps")) throw ConfigError("levy.measure: compound_poisson needs 'jumps'");
    const json& jj = j.at("jumps");
    allow_keys(jj, "levy.measure.jumps", {"kind", "p1", "p2"});
    std::string jk = "constant";
    read(jj, "kind", jk, "levy.measure.jumps");
    d.kind = jump_kind(jk);
    read_number(jj, "p1", d.p1, "levy.measure.jumps");
    read_number(jj, "p2", d.p2, "levy.measure.jumps");
    return LevyMeasure::compound_poisson(rate, d);
  }
  if (kind == "stable_like") {
    allow_keys(j, "levy.measure", {"kind", "c_plus", "c_minus", "alpha"});
    double cp = 0.0, cm = 0.0, a = 1.0;
    read_number(j, "c_plus", cp, "levy.measure");
    read_number(j, "c_minus", cm, "levy.measure");
    read_number(j, "alpha", a, "levy.measure");
    return LevyMeasure::stable_like(cp, cm, a);
  }
  if (kind == "tabulated") {
    allow_keys(j, "levy.measure", {"kind", "h", "tail"});
    std::vector<double> h, tail;
    read(j, "h", h, "levy.measure");
    read(j, "tail", tail, "levy.measure");
    return LevyMeasure::tabulated(h, tail);
  }
  throw ConfigError("levy.measure: unknown kind '" + kind + "'");
}

json emit_measure(const LevyMeasure& m) {
  return std::visit(
      [](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ZeroMeasure>) {
          return {{"kind", "zero"}};
        } else if constexpr (std::is_same_v<S, CompoundPoissonMeasure>) {
          return {{"kind", "compound_poisson"},
                  {"rate", s.rate},
                  {"jumps", {{"kind", jump_kind_name(s.jumps.kind)}, {"p1", s.jumps.p1}, {"p2", s.jumps.p2}}}};
        } else if constexpr (std::is_same_v<S, StableLikeMeasure>) {
          return {{"kind", "stable_like"}, {"c_plus", s.c_plus}, {"c_minus", s.c_minus}, {"alpha", s.alpha}};
        } else {
          return {{"kind", "tabulated"}, {"h", s.h}, {"tail", s.tail}};
        }
      },
      m.spec());
}

LevyTriplet parse_levy(const json& j) {
  allow_keys(j, "levy", {"b", "sigma", "measure"});
  LevyTriplet t;
  read_number(j, "b", t.b, "levy");
  read_number(j, "sigma", t.sigma, "levy");
  if (j.contains("measure")) t.measure = parse_measure(j.at("measure"));
  t.validate();
  return t;
}

// ---- functional

SignedMeasure parse_signed_measure(const json& j, const std::string& where) {
  allow_keys(j, where, {"atoms", "knots", "density"});
  SignedMeasure mu;
  read(j, "atoms", mu.atoms, where);
  read(j, "knots", mu.knots, where);
  read(j, "density", mu.density, where);
  return mu;
}

LinearComponent parse_component(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::string kind = "marginal";
  read(j, "kind", kind, where);
  if (kind == "marginal") {
    allow_keys(j, where, {"kind", "t"});
    double t = 1.0;
    read_number(j, "t", t, where);
    return LinearComponent::marginal_at(t);
  }
  if (kind == "integral") {
    allow_keys(j, where, {"kind", "measure"});
    if (!j.contains("measure")) throw ConfigError(where + ": integral component needs 'measure'");
    return LinearComponent::integral_of(parse_signed_measure(j.at("measure"), where + ".measure"));
  }
  throw ConfigError(where + ": unknown component kind '" + kind + "'");
}

json emit_component(const LinearComponent& c) {
  if (c.kind == LinearComponent::Kind::marginal) return {{"kind", "marginal"}, {"t", c.t}};
  return {{"kind", "integral"},
          {"measure", {{"atoms", c.measure.atoms}, {"knots", c.measure.knots}, {"density", c.measure.density}}}};
}

FunctionalConfig parse_functional(const json& j) {
  allow_keys(j, "functional", {"preset", "t", "payoff", "alpha", "monitoring", "components"});
  FunctionalConfig f;
  read(j, "preset", f.preset, "functional");
  if (f.preset != "marginal" && f.preset != "integral_average" && f.preset != "supremum" &&
      f.preset != "linear") {
    throw ConfigError("functional: unknown preset '" + f.preset + "'");
  }
  read_number(j, "t", f.t, "functional");
  read_number(j, "alpha", f.alpha, "functional");
  if (j.contains("payoff")) {
    const json& p = j.at("payoff");
    allow_keys(p, "functional.payoff", {"kind", "strike", "weights"});
    std::string kind = "identity";
    read(p, "kind", kind, "functional.payoff");
    f.payoff.kind = payoff_kind_from_string(kind);
    read_number(p, "strike", f.payoff.strike, "functional.payoff");
    read(p, "weights", f.payoff.weights, "functional.payoff");
  }
  if (j.contains("monitoring")) {
    std::string m;
    read(j, "monitoring", m, "functional");
    if (m == "continuous") {
      f.monitoring = Monitoring::continuous;
    } else if (m == "skeleton") {
      f.monitoring = Monitoring::skeleton;
    } else {
      throw ConfigError("functional.monitoring: expected 'continuous' or 'skeleton'");
    }
  }
  if (j.contains("components")) {
    if (!j.at("components").is_array()) throw ConfigError("functional.components: expected an array");
    std::size_t i = 0;
    for (const auto& c : j.at("components")) {
      f.components.push_back(parse_component(c, "functional.components[" + std::to_string(i++) + "]"));
    }
  }
  if (f.preset == "linear" && f.components.empty()) {
    throw ConfigError("functional: preset 'linear' needs components");
  }
  if (f.preset != "linear" && !f.components.empty()) {
    throw ConfigError("functional: components are only read by preset 'linear'");
  }
  return f;
}

json emit_functional(const FunctionalConfig& f) {
  json comps = json::array();
  for (const auto& c : f.components) comps.push_back(emit_component(c));
  return {{"preset", f.preset},
          {"t", f.t},
          {"payoff", {{"kind", to_string(f.payoff.kind)}, {"strike", f.payoff.strike}, {"weights", f.payoff.weights}}},
          {"alpha", f.alpha},
          {"monitoring", f.monitoring == Monitoring::continuous ? "continuous" : "skeleton"},
          {"components", comps}};
}

// ---- schedule and sections

ScheduleConfig parse_schedule(const json& j) {
  allow_keys(j, "schedule", {"M", "theta", "K_max", "strategy", "gamma", "h_scale", "aux_ratio"});
  ScheduleConfig s;
  read(j, "M", s.M, "schedule");
  read_number(j, "theta", s.theta, "schedule");
  read(j, "K_max", s.K_max, "schedule");
  if (j.contains("strategy")) {
    std::string k;
    read(j, "strategy", k, "schedule");
    s.strategy.kind = strategy_kind_from_string(k);
  }
  read_number(j, "gamma", s.strategy.gamma, "schedule");
  read_number(j, "h_scale", s.strategy.h_scale, "schedule");
  read(j, "aux_ratio", s.strategy.aux_ratio, "schedule");
  if (s.M < 2) throw ConfigError("schedule.M must be an integer >= 2");
  if (s.K_max < 1) throw ConfigError("schedule.K_max must be >= 1");
  return s;
}

json emit_schedule(const ScheduleConfig& s) {
  return {{"M", s.M},
          {"theta", s.theta},
          {"K_max", s.K_max},
          {"strategy", to_string(s.strategy.kind)},
          {"gamma", s.strategy.gamma},
          {"h_scale", s.strategy.h_scale},
          {"aux_ratio", s.strategy.aux_ratio}};
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("seed: expected a nonnegative integer");
}

}  // namespace

RunConfig parse_config(const json& j) {
  allow_keys(j, "config", {"model", "levy", "functional", "schedule", "plan", "scheme", "seed", "beta",
                           "output", "levels", "clt", "rho", "tune"});
  RunConfig c;
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (j.contains("levy")) c.levy = parse_levy(j.at("levy"));
  if (j.contains("functional")) c.functional = parse_functional(j.at("functional"));
  if (j.contains("schedule")) c.schedule = parse_schedule(j.at("schedule"));
  if (j.contains("plan")) {
    const json& p = j.at("plan");
    allow_keys(p, "plan", {"delta", "deltas"});
    read_number(p, "delta", c.delta, "plan");
    read(p, "deltas", c.deltas, "plan");
  }
  if (j.contains("scheme")) {
    std::string s;
    read(j, "scheme", s, "config");
    c.scheme = scheme_from_string(s);
  }
  if (j.contains("seed")) c.seed = parse_seed(j.at("seed"));
  read_number(j, "beta", c.beta, "config");
  if (j.contains("output")) {
    const json& o = j.at("output");
    allow_keys(o, "output", {"dir"});
    read(o, "dir", c.output_dir, "output");
  }
  if (j.contains("levels")) {
    const json& l = j.at("levels");
    allow_keys(l, "levels", {"n_pilot", "k_min", "k_max"});
    read(l, "n_pilot", c.levels.n_pilot, "levels");
    read(l, "k_min", c.levels.k_min, "levels");
    read(l, "k_max", c.levels.k_max, "levels");
  }
  if (j.contains("clt")) {
    const json& s = j.at("clt");
    allow_keys(s, "clt", {"replications", "reference", "reference_delta", "level", "rho_sq"});
    read(s, "replications", c.clt.replications, "clt");
    read_optional(s, "reference", c.clt.reference, "clt");
    read_optional(s, "reference_delta", c.clt.reference_delta, "clt");
    read_number(s, "level", c.clt.level, "clt");
    read_optional(s, "rho_sq", c.clt.rho_sq, "clt");
  }
  if (j.contains("rho")) {
    const json& r = j.at("rho");
    allow_keys(r, "rho", {"methods", "n_paths", "eps_sim", "h_sim", "level_k"});
    read(r, "methods", c.rho.methods, "rho");
    for (const auto& m : c.rho.methods) (void)oracle_method_from_string(m);
    read(r, "n_paths", c.rho.n_paths, "rho");
    read_number(r, "eps_sim", c.rho.eps_sim, "rho");
    read_number(r, "h_sim", c.rho.h_sim, "rho");
    read(r, "level_k", c.rho.level_k, "rho");
  }
  if (j.contains("tune")) {
    const json& t = j.at("tune");
    allow_keys(t, "tune", {"M_min", "M_max", "betas"});
    read(t, "M_min", c.tune.M_min, "tune");
    read(t, "M_max", c.tune.M_max, "tune");
    read(t, "betas", c.tune.betas, "tune");
  }
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json emit_config(const RunConfig& c) {
  return {{"model", emit_model(c.model)},
          {"levy", {{"b", c.levy.b}, {"sigma", c.levy.sigma}, {"measure", emit_measure(c.levy.measure)}}},
          {"functional", emit_functional(c.functional)},
          {"schedule", emit_schedule(c.schedule)},
          {"plan", {{"delta", c.delta}, {"deltas", c.deltas}}},
          {"scheme", to_string(c.scheme)},
          {"seed", c.seed},
          {"beta", c.beta},
          {"output", {{"dir", c.output_dir}}},
          {"levels", {{"n_pilot", c.levels.n_pilot}, {"k_min", c.levels.k_min}, {"k_max", c.levels.k_max}}},
          {"clt",
           {{"replications", c.clt.replications},
            {"reference", optional_json(c.clt.reference)},
            {"reference_delta", optional_json(c.clt.reference_delta)},
            {"level", c.clt.level},
            {"rho_sq", optional_json(c.clt.rho_sq)}}},
          {"rho",
           {{"methods", c.rho.methods},
            {"n_paths", c.rho.n_paths},
            {"eps_sim", c.rho.eps_sim},
            {"h_sim", c.rho.h_sim},
            {"level_k", c.rho.level_k}}},
          {"tune", {{"M_min", c.tune.M_min}, {"M_max", c.tune.M_max}, {"betas", c.tune.betas}}}};
}

std::uint64_t config_hash(const RunConfig& config) {
  nlohmann::json j = emit_config(config);
  j.erase("output");  // where results go is not part of the run
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

FunctionalSpec resolve_functional(const RunConfig& config, std::vector<std::string>* warnings) {
  const FunctionalConfig& f = config.functional;
  const double T = config.model.T;
  const double eps1 = T / config.schedule.M;
  auto snap = [&](double t) {
    const double g = std::round(t / eps1) * eps1;
    if (std::abs(g - t) > 1e-12 * std::max(1.0, T)) {
      if (warnings != nullptr) {
        std::ostringstream os;
        os.precision(17);
        os << "marginal time " << t << " moved to level-1 grid time " << g;
        warnings->push_back(os.str());
      }
      return g;
    }
    return t;
  };
  FunctionalSpec spec;
  if (f.preset == "marginal") {
    spec = marginal_functional(snap(f.t), f.payoff);
  } else if (f.preset == "integral_average") {
    spec = integral_average_functional(T, f.payoff);
  } else if (f.preset == "supremum") {
    spec = supremum_functional(f.payoff, f.monitoring);
  } else {
    spec.kind = FunctionalSpec::Kind::linear;
    spec.f = f.payoff;
    for (auto c : f.components) {
      if (c.kind == LinearComponent::Kind::marginal) c.t = snap(c.t);
      spec.map.components.push_back(c);
    }
  }
  spec.alpha = f.alpha;
  spec.monitoring = f.monitoring;
  spec.validate(T);
  return spec;
}

LevelSchedule resolve_schedule(const RunConfig& config) {
  return make_schedule(config.levy, config.schedule.M, config.model.T, config.schedule.theta,
                       config.schedule.K_max, config.schedule.strategy);
}

}  // namespace levymlmc::harness
