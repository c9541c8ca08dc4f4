#include <benchmark/benchmark.h>

#include <cmath>

#include "bench_common.hpp"
#include "flowscope/concentration.hpp"
#include "flowscope/dependency.hpp"
#include "flowscope/features.hpp"
#include "flowscope/forest.hpp"
#include "flowscope/pipeline.hpp"
#include "flowscope/rng.hpp"
#include "flowscope/tailfit.hpp"

namespace flowscope {
namespace {

void BM_LoadDataset(benchmark::State& state) {
  const auto dir = bench::scenario_dir("planted_eof");
  for (auto _ : state) benchmark::DoNotOptimize(load_directory(dir));
}
BENCHMARK(BM_LoadDataset)->Unit(benchmark::kMillisecond);

void BM_EdrAllBlocks(benchmark::State& state) {
  const auto& ds = bench::scenario("planted_eof");
  std::set<Address> eofs;
  for (const auto& c : ds.contracts()) {
    if (eofs.size() < 10) eofs.insert(c);
  }
  for (auto _ : state) benchmark::DoNotOptimize(edr_for_all_blocks(ds, eofs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.blocks().size()));
}
BENCHMARK(BM_EdrAllBlocks)->Unit(benchmark::kMillisecond);

void BM_ExtractFeatures(benchmark::State& state) {
  const auto& ds = bench::scenario("planted_eof");
  for (auto _ : state) benchmark::DoNotOptimize(extract_all_features(ds));
}
BENCHMARK(BM_ExtractFeatures)->Unit(benchmark::kMillisecond);

void BM_TrainForest(benchmark::State& state) {
  Rng r(9);
  std::vector<LabeledExample> rows(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (auto& x : rows[i].x) x = r.uniform(0, 1);
    rows[i].label = rows[i].x[0] + 0.3 * r.uniform(0, 1) < 0.6 ? FlowClass::non_atomic : FlowClass::other;
  }
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(rows, 42));
}
BENCHMARK(BM_TrainForest)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_FitPowerLaw(benchmark::State& state) {
  Rng r(147);
  std::vector<double> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& x : xs) x = std::pow(1.0 - r.uniform01(), -1.0 / 0.47);
  for (auto _ : state) benchmark::DoNotOptimize(fit_power_law(xs));
}
BENCHMARK(BM_FitPowerLaw)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_HhiSeries(benchmark::State& state) {
  const auto& ds = bench::scenario("planted_eof");
  for (auto _ : state) benchmark::DoNotOptimize(hhi_series(ds));
}
BENCHMARK(BM_HhiSeries)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace flowscope
