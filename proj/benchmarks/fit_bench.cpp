#include <benchmark/benchmark.h>

#include "hfa/diagnostics.hpp"
#include "hfa/fixed_model.hpp"
#include "hfa/mixed_model.hpp"
#include "hfa/phase2.hpp"
#include "hfa/random.hpp"
#include "hfa/simulation.hpp"

namespace {

using namespace hfa;

ScheduleMatrix season(int teams, int games_per_team, double home_bias) {
  const auto league = generate_league({teams, games_per_team, 5.0, 10.0, home_bias, 17});
  return league.schedule.with_margins(simulate_margins(league.schedule, league.eta_true, 3.0, 10.0, 18));
}

// Range(0): teams, Range(1): games per team.
void BM_FixedFit(benchmark::State& state) {
  const auto sm = season(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(fit_fixed(sm));
  state.counters["games"] = static_cast<double>(sm.n_games());
}
BENCHMARK(BM_FixedFit)->Args({12, 12})->Args({40, 20})->Args({350, 30})->Unit(benchmark::kMicrosecond);

// Re-fits on a fixed schedule reuse the factorisation, as the resampling loop does.
void BM_FixedRefit(benchmark::State& state) {
  const auto sm = season(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.7);
  const FixedModelSolver solver(sm);
  for (auto _ : state) benchmark::DoNotOptimize(solver.fit(sm.margins));
}
BENCHMARK(BM_FixedRefit)->Args({12, 12})->Args({40, 20})->Args({350, 30})->Unit(benchmark::kMicrosecond);

void BM_MixedFit(benchmark::State& state) {
  const auto sm = season(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(fit_mixed(sm));
}
BENCHMARK(BM_MixedFit)->Args({12, 12})->Args({40, 20})->Args({350, 30})->Unit(benchmark::kMicrosecond);

void BM_MixedRefit(benchmark::State& state) {
  const auto sm = season(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.7);
  const MixedModelSolver solver(sm);
  for (auto _ : state) benchmark::DoNotOptimize(solver.fit(sm.margins));
}
BENCHMARK(BM_MixedRefit)->Args({12, 12})->Args({40, 20})->Args({350, 30})->Unit(benchmark::kMicrosecond);

void BM_Resampling(benchmark::State& state) {
  const auto sm = season(20, 12, 1.0);
  const auto base = fit_mixed(sm);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_resampling(sm, base, {3.0, static_cast<int>(state.range(0)), 5, ResampleMode::fixed_schedule}));
  }
}
BENCHMARK(BM_Resampling)->Arg(200)->Unit(benchmark::kMillisecond);

HfaSeries series(int conferences, int years) {
  HfaSeries s;
  Engine rng = make_engine(19, 0);
  for (int c = 0; c < conferences; ++c) {
    const double b0 = 0.7 * standard_normal(rng);
    const double b1 = 0.03 * standard_normal(rng);
    for (int y = 0; y < years; ++y) {
      const double se = 0.8 + 0.8 * uniform01(rng);
      const double t = y - (years - 1);
      s.rows.push_back({2017 - (years - 1) + y, "C" + std::to_string(c), 2.9 + b0 + (-0.07 + b1) * t + se * standard_normal(rng), se});
    }
  }
  return s;
}

void BM_RandomCoefficient(benchmark::State& state) {
  const auto s = series(static_cast<int>(state.range(0)), 18);
  for (auto _ : state) benchmark::DoNotOptimize(fit_random_coefficient(s));
}
BENCHMARK(BM_RandomCoefficient)->Arg(11)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_BoundaryTest(benchmark::State& state) {
  const auto s = series(11, 18);
  for (auto _ : state) benchmark::DoNotOptimize(boundary_test_G(s, 100, 7));
}
BENCHMARK(BM_BoundaryTest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
