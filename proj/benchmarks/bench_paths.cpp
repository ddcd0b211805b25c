#include <benchmark/benchmark.h>

#include "levymlmc/functionals.hpp"
#include "levymlmc/limit_process.hpp"
#include "levymlmc/mlmc_engine.hpp"
#include "levymlmc/random_stream.hpp"

using namespace levymlmc;

namespace {

const SdeModel kGbm{Coefficient{Coefficient::Kind::linear, 1.0, 0.0}, 1.0, 1.0};

LevyTriplet cp_driver() {
  return {0.05, 0.2, LevyMeasure::compound_poisson(1.0, {JumpDistribution::Kind::normal, 0.0, 0.1})};
}

LevyTriplet stable_driver() { return {0.0, 0.2, LevyMeasure::stable_like(0.1, 0.1, 0.5)}; }

void BM_PhiloxNormal(benchmark::State& state) {
  RandomStream rng(1, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_PhiloxNormal);

// One level-k pair per iteration; the argument is k.
void BM_LevelPair(benchmark::State& state, Scheme scheme, LevyTriplet (*driver)(), bool theta_matched) {
  const LevyTriplet y = driver();
  ScheduleStrategy st;
  if (theta_matched) st.kind = ScheduleStrategy::Kind::theta_matched;
  const LevelSchedule s = make_schedule(y, 2, 1.0, theta_matched ? 0.5 : 0.0, 10, st);
  const auto f = marginal_functional(1.0);
  const int k = static_cast<int>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_level(kGbm, y, f, s, k, scheme, 7, i++, 0.0));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_LevelPair, cp_idealised, Scheme::idealised, cp_driver, false)->DenseRange(2, 8, 3);
BENCHMARK_CAPTURE(BM_LevelPair, cp_shot, Scheme::shot_continuous, cp_driver, false)->DenseRange(2, 8, 3);
BENCHMARK_CAPTURE(BM_LevelPair, stable_direct, Scheme::direct_continuous, stable_driver, true)
    ->DenseRange(2, 8, 3);
BENCHMARK_CAPTURE(BM_LevelPair, stable_shot, Scheme::shot_constant, stable_driver, true)->DenseRange(2, 8, 3);

void BM_ThetaMatchedSchedule(benchmark::State& state) {
  const LevyTriplet y = stable_driver();
  ScheduleStrategy st;
  st.kind = ScheduleStrategy::Kind::theta_matched;
  for (auto _ : state) benchmark::DoNotOptimize(make_schedule(y, 2, 1.0, 0.5, 12, st));
}
BENCHMARK(BM_ThetaMatchedSchedule);

void BM_Estimator(benchmark::State& state) {
  const LevyTriplet y = cp_driver();
  const LevelSchedule s = make_schedule(y, 2, 1.0, 0.0, 12, {});
  const ReplicationPlan plan = make_plan(0.05, 1.0, 2, 1.0);
  const auto f = marginal_functional(1.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_estimator(kGbm, y, f, s, plan, Scheme::idealised, seed++));
  }
}
BENCHMARK(BM_Estimator)->Unit(benchmark::kMillisecond);

void BM_Marks(benchmark::State& state) {
  RandomStream rng(5, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_marks(0.3, {0.5, 6}, 1024, rng));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Marks);

}  // namespace

BENCHMARK_MAIN();
