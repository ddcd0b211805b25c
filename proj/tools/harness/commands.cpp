#include "commands.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "levymlmc/errors.hpp"
#include "levymlmc/limit_process.hpp"
#include "levymlmc/mlmc_engine.hpp"
#include "levymlmc/stats_harness.hpp"
#include "levymlmc/tolerances.hpp"
#include "levymlmc/tuning.hpp"
#include "levymlmc/version.hpp"

namespace levymlmc::harness {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string num(std::uint64_t v) { return std::to_string(v); }

class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  template <class... Ts>
  void row(const Ts&... values) {
    std::vector<std::string> cells{cell(values)...};
    if (cells.size() != columns_.size()) throw std::logic_error("csv: column count mismatch");
    rows_.push_back(std::move(cells));
  }

  [[nodiscard]] std::string render() const {
    std::string s = join(columns_);
    for (const auto& r : rows_) s += join(r);
    return s;
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(bool b) { return b ? "1" : "0"; }
  template <class T>
  static std::string cell(const T& v) {
    return num(v);
  }
  static std::string join(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    return s + '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

// Files of one run, held in memory until the command has succeeded.
struct Outputs {
  std::string header;
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> warnings;

  void add(const std::string& name, const std::string& body) { files.emplace_back(name, header + body); }

  void add_report(const std::string& name, const std::vector<json>& records) {
    std::string body;
    for (const auto& r : records) body += r.dump() + '\n';
    add(name, body);
  }
};

json report_json(const TestReport& r) {
  json j{{"name", r.name},
         {"value", r.value},
         {"p", r.p_value ? json(*r.p_value) : json(nullptr)},
         {"pass", r.pass},
         {"tolerance", r.tolerance},
         {"sizes", r.sample_sizes},
         {"seed", r.seed}};
  if (r.degenerate) j["degenerate"] = true;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

struct Context {
  RunConfig config;
  WorkerPool* pool = nullptr;
  bool dump_skeleton = false;
  Outputs out;
  std::ostream* log = nullptr;
};

EngineOptions engine_options(const Context& ctx) {
  EngineOptions o;
  o.beta = ctx.config.beta;
  o.pool = ctx.pool;
  return o;
}

void level_rows(Csv& csv, const std::vector<LevelStats>& levels, int M) {
  for (const auto& l : levels) {
    csv.row(l.k, l.eps, l.h, l.count(), l.mean(), l.variance(), l.variance() / (l.eps * M), l.fine.mean(),
            l.fine.variance(), l.cost, l.fallback_paths);
  }
}

Csv level_csv() {
  return Csv({"k", "eps", "h", "n", "mean_diff", "var_diff", "var_diff_over_eps_prev", "mean_fine", "var_fine",
              "cost", "fallback_paths"});
}

std::string skeleton_csv(const CoupledPaths& p) {
  Csv csv({"path", "n", "time", "pre", "post", "cont", "jump", "aux"});
  auto emit = [&](const char* name, const PathSkeleton& s) {
    for (std::size_t n = 0; n < s.size(); ++n) {
      csv.row(name, n, s.times[n], s.pre[n], s.post[n], s.cont[n], s.jump[n], s.aux[n]);
    }
  };
  if (p.coarse) emit("coarse", *p.coarse);
  emit("fine", p.fine);
  return csv.render();
}

void cmd_estimate(Context& ctx) {
  const RunConfig& c = ctx.config;
  const FunctionalSpec f = resolve_functional(c, &ctx.out.warnings);
  const LevelSchedule s = resolve_schedule(c);
  const ReplicationPlan plan = make_plan(c.delta, f.alpha, c.schedule.M, c.model.T);
  const MlmcEstimate e = run_estimator(c.model, c.levy, f, s, plan, c.scheme, c.seed, engine_options(ctx));

  Csv summary({"value", "stderr", "delta", "alpha", "L", "total_cost", "scheme", "seed", "gaussian_fallback"});
  summary.row(e.value, e.stderr_, e.delta, f.alpha, e.L, e.total_cost, to_string(e.scheme), e.seed,
              e.gaussian_fallback);
  ctx.out.add("estimate_summary.csv", summary.render());
  Csv levels = level_csv();
  level_rows(levels, e.levels, c.schedule.M);
  ctx.out.add("estimate_levels.csv", levels.render());

  if (ctx.dump_skeleton) {
    SimulationOptions so;
    so.track_extremes = f.needs_extremes();
    const RandomStream rng(c.seed, static_cast<std::uint64_t>(plan.L), 0);
    const CoupledPaths p =
        plan.L == 1 ? simulate_level(c.model, c.levy, s.level(1).params(), c.scheme, rng, so)
                    : simulate_coupled(c.model, c.levy, {s.level(plan.L - 1).params(), s.level(plan.L).params()},
                                       c.scheme, rng, so);
    ctx.out.add("skeleton.csv", skeleton_csv(p));
  }
  *ctx.log << "estimate " << num(e.value) << " stderr " << num(e.stderr_) << " L " << e.L << " cost "
           << num(e.total_cost) << '\n';
}

void cmd_levels(Context& ctx) {
  const RunConfig& c = ctx.config;
  const FunctionalSpec f = resolve_functional(c, &ctx.out.warnings);
  const LevelSchedule s = resolve_schedule(c);
  const auto prof = level_profile(c.model, c.levy, f, s, c.scheme, c.levels.n_pilot, c.seed, c.levels.k_min,
                                  c.levels.k_max, engine_options(ctx));
  Csv levels = level_csv();
  level_rows(levels, prof, c.schedule.M);
  ctx.out.add("levels.csv", levels.render());

  std::vector<json> reports;
  std::vector<std::int64_t> sizes;
  for (const auto& l : prof) sizes.push_back(l.count());
  const bool any_zero = std::any_of(prof.begin(), prof.end(), [](const LevelStats& l) { return !(l.variance() > 0.0); });
  TestReport slope;
  slope.name = "variance_decay_slope";
  slope.sample_sizes = sizes;
  slope.seed = c.seed;
  slope.tolerance = tolerances::slope_hi - 1.0;
  if (prof.size() < 4) {
    slope.note = "insufficient data: fewer than 4 levels";
  } else if (any_zero) {
    slope.degenerate = true;
    slope.note = "degenerate input: zero level-difference variance";
  } else {
    const RegressionFit fit = variance_decay_regression(prof, c.schedule.M);
    slope.value = fit.slope;
    slope.pass = fit.pass;
    std::ostringstream os;
    os << "r_squared=" << num(fit.r_squared) << " intercept=" << num(fit.intercept);
    slope.note = os.str();
  }
  reports.push_back(report_json(slope));
  if (c.clt.reference && prof.size() >= 3) {
    std::vector<double> eps, means, se;
    for (const auto& l : prof) {
      eps.push_back(l.eps);
      means.push_back(l.fine.mean());
      se.push_back(l.fine.stderr_mean());
    }
    const BiasFit b = bias_regression(eps, means, se, *c.clt.reference, f.alpha);
    reports.push_back({{"name", "bias_kappa_hat"},
                       {"value", b.kappa_hat},
                       {"stderr", b.stderr_},
                       {"levels", b.levels},
                       {"seed", c.seed}});
  }
  ctx.out.add_report("levels_report.jsonl", reports);
  *ctx.log << "levels " << prof.size() << " slope " << num(slope.value) << (slope.pass ? " pass" : " fail") << '\n';
}

void cmd_clt(Context& ctx) {
  const RunConfig& c = ctx.config;
  CltConfig cfg;
  cfg.model = c.model;
  cfg.levy = c.levy;
  cfg.functional = resolve_functional(c, &ctx.out.warnings);
  cfg.schedule = resolve_schedule(c);
  cfg.scheme = c.scheme;
  cfg.deltas = c.deltas;
  cfg.replications = c.clt.replications;
  cfg.reference = c.clt.reference;
  cfg.reference_delta = c.clt.reference_delta;
  cfg.seed = c.seed;
  cfg.beta = c.beta;
  cfg.pool = ctx.pool;
  const CltExperiment e = run_clt_experiment(cfg);

  Csv exp({"delta", "rep", "seed", "estimate", "z"});
  Csv summary({"delta", "L", "mean_z", "var_z", "var_z_stderr", "predicted_var_z", "mean_cost"});
  std::vector<json> reports;
  for (const auto& r : e.results) {
    for (std::size_t i = 0; i < r.z.size(); ++i) exp.row(r.delta, i, r.seeds[i], r.estimates[i], r.z[i]);
    summary.row(r.delta, r.L, r.mean_z, r.var_z, r.var_z_stderr, r.predicted_var_z, r.mean_cost);
    TestReport n = normality_test(r.z, c.clt.level, c.seed);
    n.name = "lilliefors_ks delta=" + num(r.delta);
    reports.push_back(report_json(n));
  }
  ctx.out.add("clt_experiment.csv", exp.render());
  ctx.out.add("clt_summary.csv", summary.render());

  std::vector<const CltDeltaResult*> sorted;
  for (const auto& r : e.results) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->delta < b->delta; });
  json rho{{"name", "rho_hat_sq"}, {"value", e.rho_hat_sq}, {"delta", sorted.front()->delta}, {"seed", c.seed}};
  if (c.clt.rho_sq) {
    const double rel = std::abs(e.rho_hat_sq / *c.clt.rho_sq - 1.0);
    rho["oracle"] = *c.clt.rho_sq;
    rho["relative_error"] = rel;
    rho["tolerance"] = tolerances::clt_variance_rel;
    rho["pass"] = rel <= tolerances::clt_variance_rel;
  }
  reports.push_back(rho);
  if (sorted.size() >= 2) {
    const double a = sorted[0]->var_z;
    const double b = sorted[1]->var_z;
    const double rel = std::abs(a - b) / std::max(a, b);
    reports.push_back({{"name", "rho_hat_sq_delta_consistency"},
                       {"value", rel},
                       {"tolerance", tolerances::clt_delta_consistency_rel},
                       {"pass", rel < tolerances::clt_delta_consistency_rel},
                       {"seed", c.seed}});
  }
  if (e.bias) {
    reports.push_back({{"name", "bias_kappa_hat"},
                       {"value", e.bias->kappa_hat},
                       {"stderr", e.bias->stderr_},
                       {"levels", e.bias->levels},
                       {"seed", c.seed}});
  }
  reports.push_back({{"name", "reference"},
                     {"value", e.reference},
                     {"stderr", e.reference_stderr},
                     {"from_run", e.reference_from_run}});
  ctx.out.add_report("clt_report.jsonl", reports);
  *ctx.log << "clt deltas " << e.results.size() << " rho_hat_sq " << num(e.rho_hat_sq) << '\n';
}

void cmd_tune(Context& ctx) {
  const RunConfig& c = ctx.config;
  Csv curve({"M", "beta", "g", "ratio_to_min"});
  std::vector<json> reports;
  for (double beta : c.tune.betas) {
    const OptimalM o = optimal_M(beta, c.tune.M_min, c.tune.M_max);
    const double gmin = m_curve(o.M_star, beta);
    for (const auto& p : o.curve) curve.row(p.M, p.beta, p.g, p.g / gmin);
    json r{{"name", "optimal_M"}, {"beta", beta}, {"M_star", o.M_star}, {"g_min", gmin}};
    if (c.tune.M_min <= 6 && 6 <= c.tune.M_max) {
      const double ratio = m_curve(6, beta) / gmin;
      r["ratio_M6"] = ratio;
      r["tolerance"] = tolerances::tune_ratio;
      r["pass"] = ratio <= tolerances::tune_ratio;
    }
    if (c.delta > 0.0 && c.delta < 1.0) {
      r["predicted_cost"] = predicted_cost(c.delta, c.functional.alpha, o.M_star, beta);
    }
    reports.push_back(r);
    *ctx.log << "tune beta " << num(beta) << " M_star " << o.M_star << '\n';
  }
  ctx.out.add("m_curve.csv", curve.render());
  ctx.out.add_report("tune_report.jsonl", reports);
}

void cmd_rho(Context& ctx) {
  const RunConfig& c = ctx.config;
  const FunctionalSpec f = resolve_functional(c, &ctx.out.warnings);
  const UpsilonParams params{c.schedule.theta, c.schedule.M};
  const double ups = upsilon_sq(params);
  std::unique_ptr<LevelSchedule> schedule;
  Csv csv({"method", "rho_sq", "mc_stderr", "n_paths", "excluded_paths", "nondifferentiable", "h_sim", "eps_sim",
           "theta", "M", "upsilon_sq", "rho_sq_over_upsilon_sq", "exclusion_warning"});
  for (const auto& name : c.rho.methods) {
    const auto method = oracle_method_from_string(name);
    OracleOptions o;
    o.eps_sim = c.rho.eps_sim;
    o.h_sim = c.rho.h_sim;
    o.level_k = c.rho.level_k;
    o.scheme = c.scheme;
    o.pool = ctx.pool;
    if (method == VarianceOracleResult::Method::level_empirical) {
      if (!schedule) schedule = std::make_unique<LevelSchedule>(resolve_schedule(c));
      o.schedule = schedule.get();
    }
    const VarianceOracleResult r = rho_sq_oracle(c.model, c.levy, f, params, method, c.rho.n_paths, c.seed, o);
    if (r.exclusion_warning) {
      ctx.out.warnings.push_back(name + ": " + std::to_string(r.excluded_paths) + " paths excluded");
    }
    csv.row(name, r.rho_sq, r.mc_stderr, r.n_paths, r.excluded_paths, r.nondifferentiable, r.h_sim, r.eps_sim,
            params.theta, params.M, ups, r.rho_sq / ups, r.exclusion_warning);
    *ctx.log << "rho " << name << ' ' << num(r.rho_sq) << " +- " << num(r.mc_stderr) << '\n';
  }
  ctx.out.add("rho.csv", csv.render());
}

void cmd_validate_schedule(Context& ctx) {
  const RunConfig& c = ctx.config;
  const LevelSchedule s = resolve_schedule(c);
  const ScheduleDiagnostics d = validate_schedule(s, c.levy);
  Csv csv({"k", "eps", "h", "eps_aux", "tail_mass", "r2", "r_h", "r3a", "r3b", "r4", "rdrift"});
  for (const auto& l : d.levels) {
    const LevelSpec& spec = s.level(l.k);
    csv.row(l.k, spec.eps, spec.h, spec.eps_aux, c.levy.measure.tail_mass(spec.h), l.r2, l.r_h, l.r3a, l.r3b,
            l.r4, l.rdrift);
  }
  ctx.out.add("schedule.csv", csv.render());
  ctx.out.add_report("schedule_report.jsonl",
                     {json{{"name", "schedule_validation"}, {"pass", d.clean()}, {"flagged", d.flagged}}});
  *ctx.log << "schedule " << (d.clean() ? "clean" : "flagged");
  for (const auto& f : d.flagged) *ctx.log << ' ' << f;
  *ctx.log << '\n';
}

void write_outputs(const Outputs& out, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, body] : out.files) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + (fs::path(dir) / name).string() + "'");
    f << body;
  }
}

json error_record(const char* kind, int code, const std::string& message) {
  return {{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilevel Monte Carlo harness for Levy-driven SDEs", "levymlmc-harness"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string out_dir;
  bool dump = false;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--workers", workers, "Worker threads (results do not depend on it)")->check(CLI::Range(1, 256));
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  const std::pair<const char*, const char*> subs[] = {
      {"estimate", "Run the MLMC estimator at plan.delta"},
      {"levels", "Per-level variance profile and decay regression"},
      {"clt", "Replicated estimates and normality of the normalised error"},
      {"tune", "Cost curve g(M, beta) and the optimal M"},
      {"rho", "Asymptotic variance rho^2 by the selected oracles"},
      {"validate-schedule", "Level ratios of the configured schedule"},
  };
  for (const auto& [n, desc] : subs) {
    auto* sub = app.add_subcommand(n, desc);
    sub->fallthrough();
    if (std::string(n) == "estimate") sub->add_flag("--dump-skeleton", dump, "Also write one coupled path");
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << error_record("usage", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Context ctx;
    ctx.config = load_config(config_path);
    if (seed) ctx.config.seed = *seed;
    if (!out_dir.empty()) ctx.config.output_dir = out_dir;
    ctx.dump_skeleton = dump;
    ctx.log = &out;
    std::unique_ptr<WorkerPool> pool;
    if (workers > 1) {
      pool = std::make_unique<WorkerPool>(workers);
      ctx.pool = pool.get();
    }
    // The output directory is not part of the hash so reruns elsewhere match.
    RunConfig hashed = ctx.config;
    hashed.output_dir.clear();
    const std::string hash = hex64(config_hash(hashed));
    ctx.out.header = std::string("# levymlmc ") + kVersion + " config_hash=" + hash +
                     " seed=" + std::to_string(ctx.config.seed) + '\n';

    if (command == "estimate") {
      cmd_estimate(ctx);
    } else if (command == "levels") {
      cmd_levels(ctx);
    } else if (command == "clt") {
      cmd_clt(ctx);
    } else if (command == "tune") {
      cmd_tune(ctx);
    } else if (command == "rho") {
      cmd_rho(ctx);
    } else {
      cmd_validate_schedule(ctx);
    }
    for (const auto& w : ctx.out.warnings) err << json{{"warning", w}}.dump() << '\n';

    json manifest{{"header", ctx.out.header.substr(2, ctx.out.header.size() - 3)},
                  {"version", kVersion},
                  {"tolerance_version", tolerances::kVersion},
                  {"command", command},
                  {"config_hash", hash},
                  {"seed", ctx.config.seed},
                  {"config", emit_config(ctx.config)},
                  {"warnings", ctx.out.warnings}};
    json files = json::array();
    for (const auto& f : ctx.out.files) files.push_back(f.first);
    manifest["files"] = files;
    ctx.out.files.emplace_back("manifest.json", manifest.dump(2) + '\n');
    write_outputs(ctx.out, ctx.config.output_dir);
    return kExitOk;
  } catch (const InfeasibleScheduleError& e) {
    err << error_record("infeasible_schedule", kExitInfeasible, e.what()).dump() << '\n';
    return kExitInfeasible;
  } catch (const NumericError& e) {
    err << error_record("numeric", kExitNumeric, e.what()).dump() << '\n';
    return kExitNumeric;
  } catch (const SchemeUnsupportedError& e) {
    err << error_record("scheme_unsupported", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << error_record("domain", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << error_record("config", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const InsufficientDataError& e) {
    err << error_record("insufficient_data", kExitConfig, e.what()).dump() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << error_record("runtime", kExitNumeric, e.what()).dump() << '\n';
    return kExitNumeric;
  }
}

}  // namespace levymlmc::harness
