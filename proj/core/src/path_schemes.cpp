#include "levymlmc/path_schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levymlmc/errors.hpp"

namespace levymlmc {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::idealised:
      return "idealised";
    case Scheme::direct_continuous:
      return "direct_continuous";
    case Scheme::direct_constant:
      return "direct_constant";
    case Scheme::shot_continuous:
      return "shot_continuous";
    case Scheme::shot_constant:
      return "shot_constant";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "idealised") return Scheme::idealised;
  if (name == "direct_continuous") return Scheme::direct_continuous;
  if (name == "direct_constant") return Scheme::direct_constant;
  if (name == "shot_continuous") return Scheme::shot_continuous;
  if (name == "shot_constant") return Scheme::shot_constant;
  throw ConfigError("unknown scheme '" + name + "'");
}

bool is_piecewise_constant(Scheme scheme) noexcept {
  return scheme == Scheme::direct_constant || scheme == Scheme::shot_constant;
}

bool is_direct(Scheme scheme) noexcept {
  return scheme == Scheme::direct_continuous || scheme == Scheme::direct_constant;
}

double CoupledPaths::cost(double beta) const noexcept {
  double units = static_cast<double>(fine.size() - 1);
  if (coarse) units += beta * static_cast<double>(coarse->size() - 1);
  return units;
}

namespace {

std::int64_t integer_ratio(double num, double den, const char* what) {
  if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den)) {
    throw ConfigError(std::string(what) + ": widths must be positive and finite");
  }
  const double r = num / den;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r) || n > 1e12) {
    throw ConfigError(std::string(what) + ": ratio is not a positive integer");
  }
  return static_cast<std::int64_t>(n);
}

struct GridLayout {
  std::int64_t cells = 0;
  std::int64_t M = 1;
  std::int64_t aux_fine = 1;
  std::int64_t aux_coarse = 1;
};

GridLayout layout(const CoupledParams& p, double T, bool single) {
  GridLayout g;
  g.cells = integer_ratio(T, p.fine.eps, "grid: T / eps_fine");
  g.aux_fine = integer_ratio(p.fine.eps_aux, p.fine.eps, "grid: eps_aux_fine / eps_fine");
  if (!(p.fine.h > 0.0)) throw DomainError("grid: h_fine must be positive");
  if (single) return g;
  g.M = integer_ratio(p.coarse.eps, p.fine.eps, "grid: eps_coarse / eps_fine");
  if (g.M < 2) throw ConfigError("grid: eps_coarse must be at least 2 * eps_fine");
  g.aux_coarse = integer_ratio(p.coarse.eps_aux, p.fine.eps, "grid: eps_aux_coarse / eps_fine");
  if (g.aux_coarse % g.M != 0) {
    throw ConfigError("grid: eps_aux_coarse must be a multiple of eps_coarse");
  }
  if (g.cells % g.M != 0) throw ConfigError("grid: T must be a multiple of eps_coarse");
  if (!(p.coarse.h > 0.0)) throw DomainError("grid: h_coarse must be positive");
  if (p.fine.h > p.coarse.h) throw ConfigError("grid: h_fine must not exceed h_coarse");
  return g;
}

UpdateTimeline build_impl(const LevyTriplet& levy, const CoupledParams& p, double T,
                          bool single, RandomStream& rng) {
  if (!(T > 0.0)) throw DomainError("build_timeline: T must be positive");
  const GridLayout g = layout(p, T, single);

  RandomStream jump_rng = rng.fork(stream_tag::jumps);
  const BigJumpBatch jumps = sample_big_jumps(levy.measure, p.fine.h, T, jump_rng);

  UpdateTimeline tl;
  tl.T = T;
  tl.M = static_cast<int>(g.M);
  tl.cells = g.cells;
  const std::size_t reserve = static_cast<std::size_t>(g.cells) + 1 + jumps.times.size();
  tl.times.reserve(reserve);
  tl.tags.reserve(reserve);
  tl.jump_sizes.reserve(reserve);
  tl.grid_index.reserve(reserve);

  const double n_cells = static_cast<double>(g.cells);
  std::size_t next_jump = 0;
  for (std::int64_t j = 0; j <= g.cells; ++j) {
    const double t = T * (static_cast<double>(j) / n_cells);
    std::uint8_t tag = timeline_tag::fine_grid;
    if (j > 0 && j % g.aux_fine == 0) tag |= timeline_tag::aux_fine;
    if (!single) {
      if (j % g.M == 0) tag |= timeline_tag::coarse_grid;
      if (j > 0 && j % g.aux_coarse == 0) tag |= timeline_tag::aux_coarse;
    }
    tl.times.push_back(j == g.cells ? T : t);
    tl.tags.push_back(tag);
    tl.jump_sizes.push_back(0.0);
    tl.grid_index.push_back(j);

    const double t_next = (j == g.cells)
                              ? std::numeric_limits<double>::infinity()
                              : T * (static_cast<double>(j + 1) / n_cells);
    while (next_jump < jumps.times.size() && jumps.times[next_jump] < t_next) {
      const double size = jumps.sizes[next_jump];
      std::uint8_t jtag = timeline_tag::big_jump_fine;
      if (!single && std::abs(size) >= p.coarse.h) jtag |= timeline_tag::big_jump_coarse;
      tl.times.push_back(std::max(jumps.times[next_jump], tl.times.back()));
      tl.tags.push_back(jtag);
      tl.jump_sizes.push_back(size);
      tl.grid_index.push_back(-1);
      ++next_jump;
    }
  }
  return tl;
}

// One path being assembled: anchor state plus the continuous increment
// accumulated since the last update time.
struct LevelState {
  double anchor = 0.0;
  double acc = 0.0;
  double sup = -std::numeric_limits<double>::infinity();
  PathSkeleton path;
  std::vector<std::int64_t> grid_to_path;
};

void start_path(LevelState& s, double x0, std::size_t reserve, std::int64_t cells,
                bool extremes, bool constant) {
  s.anchor = x0;
  s.acc = 0.0;
  s.sup = -std::numeric_limits<double>::infinity();
  auto& p = s.path;
  p.piecewise_constant = constant;
  for (auto* v : {&p.times, &p.pre, &p.post, &p.cont, &p.jump, &p.aux}) v->reserve(reserve);
  p.anchor.reserve(reserve);
  p.entry.reserve(reserve);
  if (extremes) p.interval_sup.reserve(reserve);
  p.times.push_back(0.0);
  p.pre.push_back(x0);
  p.post.push_back(x0);
  p.cont.push_back(0.0);
  p.jump.push_back(0.0);
  p.aux.push_back(0.0);
  p.anchor.push_back(-1);
  p.entry.push_back(0);
  if (extremes) p.interval_sup.push_back(x0);
  s.grid_to_path.assign(static_cast<std::size_t>(cells) + 1, -1);
  s.grid_to_path[0] = 0;
}

// Exact extremes of a Brownian bridge with variance sigma^2 dt and endpoint
// increment g, driven by a single uniform.
inline double bridge_root(double g, double sigma, double dt, double u) {
  return std::sqrt(g * g - 2.0 * sigma * sigma * dt * std::log(u));
}

void track_piece(LevelState& s, const Coefficient& a, bool constant, double g, double root) {
  if (constant) return;
  const double slope = a.value(s.anchor);
  const double ext = slope >= 0.0 ? 0.5 * (g + root) : 0.5 * (g - root);
  s.sup = std::max(s.sup, s.anchor + slope * (s.acc + ext));
}

void commit_update(LevelState& s, const Coefficient& a, bool constant, bool extremes, double t,
                   double jump, double aux, std::int64_t aux_anchor, std::size_t entry,
                   std::int64_t grid_j) {
  auto& p = s.path;
  const double x = s.anchor;
  const double slope = a.value(x);
  const double pre = constant ? x : x + slope * s.acc;
  double post = x + slope * (s.acc + jump);
  if (aux_anchor >= 0) post += a.value(p.post[static_cast<std::size_t>(aux_anchor)]) * aux;
  p.times.push_back(t);
  p.pre.push_back(pre);
  p.post.push_back(post);
  p.cont.push_back(s.acc);
  p.jump.push_back(jump);
  p.aux.push_back(aux_anchor >= 0 ? aux : 0.0);
  p.anchor.push_back(aux_anchor);
  p.entry.push_back(entry);
  if (extremes) {
    double sup = constant ? x : std::max(s.sup, std::max(x, pre));
    p.interval_sup.push_back(sup);
  }
  if (grid_j >= 0) s.grid_to_path[static_cast<std::size_t>(grid_j)] =
      static_cast<std::int64_t>(p.times.size() - 1);
  s.anchor = post;
  s.acc = 0.0;
  s.sup = -std::numeric_limits<double>::infinity();
}

CoupledPaths simulate_impl(const SdeModel& model, const LevyTriplet& levy,
                           const CoupledParams& params, bool single, Scheme scheme,
                           RandomStream rng, const SimulationOptions& opts) {
  model.validate();
  levy.validate();
  const LevyMeasure& nu = levy.measure;
  if (scheme == Scheme::idealised && !nu.is_finite()) {
    throw SchemeUnsupportedError(
        "idealised scheme needs exact increments of Y; the " + nu.kind_name() +
        " measure has infinite activity (use a direct_* or shot_* scheme)");
  }

  const double T = model.T;
  auto timeline = std::make_shared<UpdateTimeline>(build_impl(levy, params, T, single, rng));
  const UpdateTimeline& tl = *timeline;
  const GridLayout g = layout(params, T, single);

  RandomStream w_rng = rng.fork(stream_tag::brownian);
  RandomStream s_rng = rng.fork(stream_tag::small_jumps);
  RandomStream b_rng = rng.fork(stream_tag::bridge);

  const bool constant = is_piecewise_constant(scheme);
  const bool direct = is_direct(scheme);
  const bool ideal = scheme == Scheme::idealised;
  const bool extremes = opts.track_extremes;
  const double sigma = levy.sigma;
  const double h_f = params.fine.h;
  const double h_c = single ? h_f : params.coarse.h;

  double drift_f = 0.0;
  double drift_c = 0.0;
  if (ideal) {
    // Exact Y: every jump enters explicitly, compensated through the drift.
    drift_f = levy.b - nu.tail_first_moment(h_f) - nu.small_first_moment(h_f);
    drift_c = drift_f;
  } else {
    drift_f = compensated_drift(levy, h_f);
    drift_c = compensated_drift(levy, h_c);
  }

  CoupledPaths out;
  out.timeline = timeline;
  out.scheme = scheme;

  // Sub-threshold jumps: exact times for the idealised scheme, one remainder
  // draw per fine grid cell for the direct schemes.
  BigJumpBatch inner;
  std::vector<double> cell_remainder;
  if (ideal) {
    inner = sample_jumps_between(nu, 0.0, h_f, T, s_rng);
  } else if (direct) {
    cell_remainder.assign(static_cast<std::size_t>(g.cells) + 1, 0.0);
    if (!nu.is_zero()) {
      for (std::int64_t j = 1; j <= g.cells; ++j) {
        const SmallJumpDraw d = small_jump_increment(levy, h_f, params.fine.eps, s_rng);
        cell_remainder[static_cast<std::size_t>(j)] = d.value;
        if (!d.exact) out.gaussian_fallback = true;
      }
    }
  }
  const double mid_compensator =
      (direct && !single && h_c > h_f && !nu.is_zero())
          ? params.coarse.eps_aux * (nu.tail_first_moment(h_f) - nu.tail_first_moment(h_c))
          : 0.0;

  const std::size_t reserve = tl.size();
  LevelState fine;
  start_path(fine, model.x0, reserve, g.cells, extremes, constant);
  LevelState coarse;
  if (!single) start_path(coarse, model.x0, reserve / static_cast<std::size_t>(g.M) + 8,
                          g.cells, extremes, constant);
  double mid_accum = 0.0;
  std::size_t next_inner = 0;

  auto window_sum = [&](std::int64_t j, std::int64_t width) {
    double sum = 0.0;
    for (std::int64_t i = j - width + 1; i <= j; ++i) {
      sum += cell_remainder[static_cast<std::size_t>(i)];
    }
    return sum;
  };

  auto run_piece = [&](double dt) {
    if (!(dt > 0.0)) return;
    const double dw = std::sqrt(dt) * w_rng.normal();
    const double gf = drift_f * dt + sigma * dw;
    const double gc = drift_c * dt + sigma * dw;
    if (extremes) {
      const double u = b_rng.uniform();
      track_piece(fine, model.a, constant, gf, bridge_root(gf, sigma, dt, u));
      if (!single) track_piece(coarse, model.a, constant, gc, bridge_root(gc, sigma, dt, u));
    }
    fine.acc += gf;
    if (!single) coarse.acc += gc;
  };

  auto inner_jump = [&](double size) {
    fine.acc += size;
    if (!single) coarse.acc += size;
    if (extremes && !constant) {
      fine.sup = std::max(fine.sup, fine.anchor + model.a.value(fine.anchor) * fine.acc);
      if (!single) {
        coarse.sup =
            std::max(coarse.sup, coarse.anchor + model.a.value(coarse.anchor) * coarse.acc);
      }
    }
  };

  for (std::size_t n = 1; n < tl.size(); ++n) {
    const double t0 = tl.times[n - 1];
    const double t1 = tl.times[n];
    // Pieces of (t0, t1] split at sub-threshold jump times (idealised only).
    double s = t0;
    if (ideal) {
      while (next_inner < inner.times.size() && inner.times[next_inner] <= t1) {
        const double tau = std::max(inner.times[next_inner], s);
        run_piece(tau - s);
        inner_jump(inner.sizes[next_inner]);
        s = tau;
        ++next_inner;
      }
    }
    run_piece(t1 - s);

    const std::uint8_t tag = tl.tags[n];
    const double size = tl.jump_sizes[n];
    const std::int64_t j = tl.grid_index[n];

    // Fine level: every entry is an update time.
    {
      const double jump = (tag & timeline_tag::big_jump_fine) ? size : 0.0;
      std::int64_t aux_anchor = -1;
      double aux = 0.0;
      if (direct && (tag & timeline_tag::aux_fine)) {
        aux = window_sum(j, g.aux_fine);
        aux_anchor = fine.grid_to_path[static_cast<std::size_t>(j - g.aux_fine)];
      }
      commit_update(fine, model.a, constant, extremes, t1, jump, aux, aux_anchor, n, j);
    }

    if (single) continue;

    const bool mid = (tag & timeline_tag::big_jump_fine) && !(tag & timeline_tag::big_jump_coarse);
    if (mid) {
      if (ideal) {
        // The exact driver carries the jump; the coarse level just does not
        // update at its time.
        coarse.acc += size;
        if (extremes && !constant) {
          coarse.sup =
              std::max(coarse.sup, coarse.anchor + model.a.value(coarse.anchor) * coarse.acc);
        }
      } else if (direct) {
        mid_accum += size;
      }
    }
    const bool coarse_update =
        (tag & timeline_tag::coarse_grid) || (tag & timeline_tag::big_jump_coarse);
    if (coarse_update) {
      const double jump = (tag & timeline_tag::big_jump_coarse) ? size : 0.0;
      std::int64_t aux_anchor = -1;
      double aux = 0.0;
      if (direct && (tag & timeline_tag::aux_coarse)) {
        aux = window_sum(j, g.aux_coarse) + (mid_accum - mid_compensator);
        mid_accum = 0.0;
        aux_anchor = coarse.grid_to_path[static_cast<std::size_t>(j - g.aux_coarse)];
      }
      commit_update(coarse, model.a, constant, extremes, t1, jump, aux, aux_anchor, n, j);
    }
  }

  for (double v : fine.path.post) {
    if (!std::isfinite(v)) throw NumericError("path simulation produced a non-finite value");
  }
  out.fine = std::move(fine.path);
  if (!single) out.coarse = std::move(coarse.path);
  return out;
}

}  // namespace

UpdateTimeline build_timeline(const LevyTriplet& levy, const CoupledParams& params, double T,
                              RandomStream& rng) {
  return build_impl(levy, params, T, false, rng);
}

UpdateTimeline build_timeline(const LevyTriplet& levy, const LevelParams& params, double T,
                              RandomStream& rng) {
  return build_impl(levy, CoupledParams{params, params}, T, true, rng);
}

CoupledPaths simulate_coupled(const SdeModel& model, const LevyTriplet& levy,
                              const CoupledParams& params, Scheme scheme, RandomStream rng,
                              const SimulationOptions& options) {
  return simulate_impl(model, levy, params, false, scheme, rng, options);
}

CoupledPaths simulate_level(const SdeModel& model, const LevyTriplet& levy,
                            const LevelParams& params, Scheme scheme, RandomStream rng,
                            const SimulationOptions& options) {
  return simulate_impl(model, levy, CoupledParams{params, params}, true, scheme, rng, options);
}

double replay_marginal(const PathSkeleton& path, double t) {
  const double T = path.times.back();
  if (!(t >= 0.0 && t <= T)) throw DomainError("replay_marginal: t outside [0, T]");
  // Last update time <= t; with duplicated timestamps take the final entry.
  const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  const std::size_t n = static_cast<std::size_t>(it - path.times.begin()) - 1;
  return path.post[n];
}

std::pair<double, double> replay_marginal(const CoupledPaths& paths, double t) {
  const double fine = replay_marginal(paths.fine, t);
  const double coarse = paths.coarse ? replay_marginal(*paths.coarse, t) : fine;
  return {coarse, fine};
}

}  // namespace levymlmc
