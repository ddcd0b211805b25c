#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levymlmc/levy_model.hpp"
#include "levymlmc/random_stream.hpp"
#include "levymlmc/sde_model.hpp"

namespace levymlmc {

enum class Scheme { idealised, direct_continuous, direct_constant, shot_continuous, shot_constant };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);
bool is_piecewise_constant(Scheme scheme) noexcept;
bool is_direct(Scheme scheme) noexcept;

// Fork tags of the per-path stream. Each noise component has its own child
// stream so that the fine path never depends on whether a coarse partner is
// simulated alongside it.
namespace stream_tag {
inline constexpr std::uint64_t brownian = 1;
inline constexpr std::uint64_t jumps = 2;
inline constexpr std::uint64_t small_jumps = 3;
inline constexpr std::uint64_t bridge = 4;
}  // namespace stream_tag

// Parameters of one level: grid width eps, jump threshold h, and the
// auxiliary grid width eps_aux of the direct schemes (a multiple of eps).
struct LevelParams {
  double eps = 1.0;
  double h = 1.0;
  double eps_aux = 1.0;

  friend bool operator==(const LevelParams&, const LevelParams&) = default;
};

struct CoupledParams {
  LevelParams coarse;
  LevelParams fine;
};

namespace timeline_tag {
inline constexpr std::uint8_t fine_grid = 1u << 0;
inline constexpr std::uint8_t coarse_grid = 1u << 1;
inline constexpr std::uint8_t big_jump_fine = 1u << 2;
inline constexpr std::uint8_t big_jump_coarse = 1u << 3;
inline constexpr std::uint8_t aux_fine = 1u << 4;
inline constexpr std::uint8_t aux_coarse = 1u << 5;
}  // namespace timeline_tag

// Merged update times of a level pair. Grid entries are listed at
// T * (j / N) so coarse and fine grid times compare equal bitwise; a jump
// landing exactly on a grid time is stored as a second entry after it.
struct UpdateTimeline {
  double T = 1.0;
  int M = 1;                 // refinement factor, 1 for a single level
  std::int64_t cells = 0;    // number of fine grid cells
  std::vector<double> times;
  std::vector<std::uint8_t> tags;
  std::vector<double> jump_sizes;        // 0 for pure grid entries
  std::vector<std::int64_t> grid_index;  // -1 for jump entries

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] bool has_tag(std::size_t n, std::uint8_t tag) const noexcept {
    return (tags[n] & tag) != 0;
  }
};

// Path of one level observed at its own update times. The driver increment
// over (T_{n-1}, T_n] is split into the continuous part, the big jump at T_n
// and the auxiliary small-jump term, so that
//   pre[n]  = post[n-1] + a(post[n-1]) * cont[n]        (continuous variants)
//   post[n] = post[n-1] + a(post[n-1]) * (cont[n] + jump[n]) + a(post[anchor[n]]) * aux[n]
// with anchor[n] the index of the update time T_n - eps_aux.
struct PathSkeleton {
  std::vector<double> times;
  std::vector<double> pre;
  std::vector<double> post;
  std::vector<double> cont;
  std::vector<double> jump;
  std::vector<double> aux;
  std::vector<std::int64_t> anchor;       // -1 when no aux term
  std::vector<std::size_t> entry;         // index into the shared timeline
  // Supremum of the continuous-time path over (T_{n-1}, T_n), from exact
  // Brownian-bridge extremes. Empty unless extremes were requested.
  std::vector<double> interval_sup;
  bool piecewise_constant = false;

  [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
  [[nodiscard]] double terminal() const noexcept { return post.back(); }
};

struct CoupledPaths {
  std::shared_ptr<const UpdateTimeline> timeline;
  std::optional<PathSkeleton> coarse;  // absent for level 1
  PathSkeleton fine;
  Scheme scheme = Scheme::idealised;
  bool gaussian_fallback = false;

  // Euler-step units: one per fine interval plus beta per coarse interval.
  [[nodiscard]] double cost(double beta) const noexcept;
};

struct SimulationOptions {
  bool track_extremes = false;
};

UpdateTimeline build_timeline(const LevyTriplet& levy, const CoupledParams& params, double T,
                              RandomStream& rng);
UpdateTimeline build_timeline(const LevyTriplet& levy, const LevelParams& params, double T,
                              RandomStream& rng);

CoupledPaths simulate_coupled(const SdeModel& model, const LevyTriplet& levy,
                              const CoupledParams& params, Scheme scheme, RandomStream rng,
                              const SimulationOptions& options = {});

// A single level (no coarse partner). Bit-identical to the fine skeleton of
// simulate_coupled under the same stream.
CoupledPaths simulate_level(const SdeModel& model, const LevyTriplet& levy,
                            const LevelParams& params, Scheme scheme, RandomStream rng,
                            const SimulationOptions& options = {});

// Value at time t: the state at the last update time <= t.
double replay_marginal(const PathSkeleton& path, double t);
std::pair<double, double> replay_marginal(const CoupledPaths& paths, double t);

}  // namespace levymlmc
