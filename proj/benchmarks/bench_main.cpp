#include <numbers>

#include <benchmark/benchmark.h>

#include "resetkit/cglp.hpp"
#include "resetkit/reset_freq.hpp"
#include "resetkit/sim.hpp"
#include "resetkit/tuner.hpp"

namespace {

using namespace resetkit;

const double kWc = 2.0 * std::numbers::pi * 100.0;

void BM_DescribingFunction(benchmark::State& state) {
  const ResetSystem rs = make_gsore(1.0, 1.0, 0.2);
  double w = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(describing_function(rs, w));
    w = w < 100.0 ? w * 1.01 : 0.5;
  }
}
BENCHMARK(BM_DescribingFunction);

void BM_ThirdHarmonic(benchmark::State& state) {
  const ResetSystem rs = make_gfore(1.0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(hosidf(rs, 2.0, 3));
}
BENCHMARK(BM_ThirdHarmonic);

void BM_HarmonicPeak(benchmark::State& state) {
  const ResetSystem rs = make_gfore(1.0, -0.3);
  for (auto _ : state) benchmark::DoNotOptimize(harmonic_peak(rs));
}
BENCHMARK(BM_HarmonicPeak)->Unit(benchmark::kMillisecond);

void BM_CorrectionFirst(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(correction_factor_first(-0.4));
}
BENCHMARK(BM_CorrectionFirst)->Unit(benchmark::kMillisecond);

void BM_CorrectionSecond(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(correction_factors_second(0.2));
}
BENCHMARK(BM_CorrectionSecond)->Unit(benchmark::kMillisecond);

void BM_DesignCgLp(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(design_cglp(order, 0.0, 30.0, kWc, 5.0 * kWc));
}
BENCHMARK(BM_DesignCgLp)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Tune(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tune(1, 30.0, kWc, std::nullopt, 0, 1));
}
BENCHMARK(BM_Tune)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const CgLpConfig cfg = design_cglp(1, -0.4, 30.0, kWc, 5.0 * kWc);
  LoopSpec loop = make_cglp_loop(mass_plant(), cfg, kWc, std::nullopt, 1e-4);
  loop.reference = multisine_reference({{1.0, 10.0, 0.0}});
  for (auto _ : state) benchmark::DoNotOptimize(simulate(loop, 0.5, 1));
  state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
