#include <benchmark/benchmark.h>

#include <cmath>

#include "lncm/classical.hpp"
#include "lncm/generalized.hpp"
#include "lncm/random.hpp"
#include "lncm/simulation.hpp"

using namespace lncm;

namespace {

Dataset two_groups() {
  return Dataset({SampleSummary(119, 9.06695, 1.84), SampleSummary(106, 8.69306, 2.65)},
                 ModelSpec::lognormal());
}

void BM_Philox(benchmark::State& state) {
  RandomStream rng({1, 0});
  for (auto _ : state) benchmark::DoNotOptimize(rng.next_u32());
}
BENCHMARK(BM_Philox);

void BM_ChiSquare(benchmark::State& state) {
  RandomStream rng({1, 0});
  const auto df = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rng.chi_square(df));
}
BENCHMARK(BM_ChiSquare)->Arg(4)->Arg(49)->Arg(118);

void BM_PivotDraws(benchmark::State& state) {
  const auto ds = two_groups();
  MCConfig cfg;
  cfg.reps = 100'000;
  cfg.method = state.range(0) == 0 ? GeneralizedMethod::WeightedCombination
                                   : GeneralizedMethod::UmvueBased;
  for (auto _ : state) benchmark::DoNotOptimize(draw_pivots(ds, cfg));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cfg.reps));
}
BENCHMARK(BM_PivotDraws)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GeneralizedAnalysis(benchmark::State& state) {
  const auto ds = two_groups();
  MCConfig cfg;
  cfg.reps = 100'000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        generalized_analysis(ds, {std::log(20000.0), Alternative::TwoSided}, 0.95, cfg));
  }
}
BENCHMARK(BM_GeneralizedAnalysis)->Unit(benchmark::kMillisecond);

void BM_GuptaLiMle(benchmark::State& state) {
  const auto ds = two_groups();
  for (auto _ : state) benchmark::DoNotOptimize(gupta_li_mle(ds));
}
BENCHMARK(BM_GuptaLiMle);

void BM_LrTest(benchmark::State& state) {
  const auto ds = two_groups();
  for (auto _ : state) benchmark::DoNotOptimize(lr_test(ds, 20000.0));
}
BENCHMARK(BM_LrTest);

void BM_ClassicalIntervals(benchmark::State& state) {
  const auto ds = two_groups();
  for (auto _ : state) {
    benchmark::DoNotOptimize(ahmed_ci(ds, 0.95));
    benchmark::DoNotOptimize(baklizi_ci(ds, 0.95));
  }
}
BENCHMARK(BM_ClassicalIntervals);

void BM_RunCell(benchmark::State& state) {
  SimulationCell cell;
  cell.ns = {5, 10};
  cell.sigma2s = {1.0, 2.5};
  cell.outer_reps = 200;
  cell.inner_reps = 2000;
  cell.methods = {SimMethod::LikelihoodRatio, SimMethod::Ahmed, SimMethod::GuptaLi,
                  SimMethod::BakliziEbrahem, SimMethod::GeneralizedWeighted,
                  SimMethod::GeneralizedUmvue};
  for (auto _ : state) benchmark::DoNotOptimize(run_cell(cell));
}
BENCHMARK(BM_RunCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
