#include <benchmark/benchmark.h>

#include "bench_common.hpp"
#include "flowscope/exclusivity.hpp"
#include "flowscope/parallel.hpp"
#include "flowscope/rng.hpp"

namespace flowscope {
namespace {

void BM_KlDivergence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng r(1);
  std::vector<double> p(n), s(n);
  double sp = 0, ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sp += (p[i] = r.uniform(0, 1));
    ss += (s[i] = r.uniform(0.01, 1));
  }
  for (std::size_t i = 0; i < n; ++i) {
    p[i] /= sp;
    s[i] /= ss;
  }
  for (auto _ : state) benchmark::DoNotOptimize(kl_divergence(p, s));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_KlDivergence)->Arg(2)->Arg(20)->Arg(200);

void BM_BuildFlows(benchmark::State& state) {
  const auto& ds = bench::scenario("planted_eof");
  set_thread_count(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_flows(ds, Granularity::weekly));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.txs().size()));
  set_thread_count(0);
}
BENCHMARK(BM_BuildFlows)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ScoreFlows(benchmark::State& state) {
  const auto& ds = bench::scenario("planted_eof");
  const auto scheme = EpochScheme::for_dataset(ds, Granularity::weekly);
  const auto flows = build_flows(ds, scheme);
  const auto markets = MarketTable::build(ds, scheme);
  for (auto _ : state) benchmark::DoNotOptimize(score_flows(flows, markets));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(flows.size()));
}
BENCHMARK(BM_ScoreFlows)->Unit(benchmark::kMicrosecond);

void BM_OptimizeThreshold(benchmark::State& state) {
  Rng r(3);
  std::vector<LabeledScore> xs(static_cast<std::size_t>(state.range(0)));
  for (auto& x : xs) {
    x.positive = r.bernoulli(0.1);
    x.score = r.uniform(0, 100) + (x.positive ? 50 : 0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(optimize_threshold(xs));
}
BENCHMARK(BM_OptimizeThreshold)->Arg(1'000)->Arg(100'000)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace flowscope
