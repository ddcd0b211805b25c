// Regenerates core/src/lilliefors_table.inc: upper quantiles of the scaled
// Lilliefors statistic D (sqrt(n) - 0.01 + 0.85 / sqrt(n)) under normal data.
//
//   gen_lilliefors_table [batches] [seed] > core/src/lilliefors_table.inc

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <thread>
#include <vector>

#include "levymlmc/random_stream.hpp"
#include "levymlmc/stats_harness.hpp"
#include "levymlmc/worker_pool.hpp"

namespace {

constexpr int kSizes[] = {100, 200, 500, 1000, 2000, 5000};
constexpr double kProbs[] = {0.999, 0.995, 0.99, 0.975, 0.95, 0.9,  0.8,   0.7,   0.6,   0.5,
                             0.4,   0.3,   0.2,  0.15,  0.1,  0.05, 0.025, 0.01, 0.005, 0.001};

}  // namespace

int main(int argc, char** argv) {
  const std::size_t batches = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100000;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 20240611;
  levymlmc::WorkerPool pool(std::max(1u, std::thread::hardware_concurrency()));

  std::printf("// Generated by tools/gen_lilliefors_table (%zu batches, seed %llu).\n", batches,
              static_cast<unsigned long long>(seed));
  std::printf("#pragma once\n\n#include <cstddef>\n\nnamespace levymlmc::detail {\n\n");
  std::printf("inline constexpr std::size_t kLillieforsSizeCount = %zu;\n", std::size(kSizes));
  std::printf("inline constexpr std::size_t kLillieforsLevels = %zu;\n", std::size(kProbs));
  std::printf("inline constexpr int kLillieforsSizes[] = {");
  for (std::size_t i = 0; i < std::size(kSizes); ++i) std::printf("%s%d", i ? ", " : "", kSizes[i]);
  std::printf("};\n// Upper-tail probabilities; critical values increase along each row.\n");
  std::printf("inline constexpr double kLillieforsProbs[] = {");
  for (std::size_t i = 0; i < std::size(kProbs); ++i) std::printf("%s%g", i ? ", " : "", kProbs[i]);
  std::printf("};\n\ninline constexpr double kLillieforsCritical[][%zu] = {\n", std::size(kProbs));

  for (std::size_t s = 0; s < std::size(kSizes); ++s) {
    const int n = kSizes[s];
    const double rn = std::sqrt(static_cast<double>(n));
    std::vector<double> stat(batches);
    pool.parallel_for(batches, [&](std::size_t b) {
      levymlmc::RandomStream rng(seed, static_cast<std::uint64_t>(n), b);
      std::vector<double> x(static_cast<std::size_t>(n));
      for (auto& v : x) v = rng.normal();
      stat[b] = levymlmc::lilliefors_statistic(std::move(x)) * (rn - 0.01 + 0.85 / rn);
    });
    std::sort(stat.begin(), stat.end());
    std::printf("    {");
    for (std::size_t i = 0; i < std::size(kProbs); ++i) {
      const double q = 1.0 - kProbs[i];
      const auto idx = std::min(batches - 1, static_cast<std::size_t>(q * static_cast<double>(batches)));
      std::printf("%s%.6f", i ? ", " : "", stat[idx]);
    }
    std::printf("},  // n = %d\n", n);
    std::fflush(stdout);
  }
  std::printf("};\n\n}  // namespace levymlmc::detail\n");
  return 0;
}
