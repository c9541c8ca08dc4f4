#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flowscope/flows.hpp"
#include "flowscope/revenue.hpp"

namespace flowscope {
namespace {

using namespace flowscope::testing;

constexpr std::int64_t kMonday = 1'672'617'600;  // 2023-01-02 00:00 UTC

TEST(EpochScheme, WeeklyWindowsFromAnchor) {
  const EpochScheme s(Granularity::weekly, kMonday);
  EXPECT_EQ(s.index_of(kMonday), 0);
  EXPECT_EQ(s.index_of(kMonday + kSecondsPerWeek - 1), 0);
  EXPECT_EQ(s.index_of(kMonday + kSecondsPerWeek), 1);
  EXPECT_EQ(s.index_of(kMonday - 1), -1);
  EXPECT_EQ(s.epoch(2).start, kMonday + 2 * kSecondsPerWeek);
  EXPECT_EQ(s.epoch(2).end, kMonday + 3 * kSecondsPerWeek);
}

TEST(EpochScheme, DailyWindowsAreCalendarDays) {
  const EpochScheme s(Granularity::daily, kMonday + 5000);
  EXPECT_EQ(s.anchor(), kMonday);
  EXPECT_EQ(s.index_of(kMonday + kSecondsPerDay + 7), 1);
  EXPECT_EQ(floor_to_day(kMonday + 86399), kMonday);
}

TEST(Flows, OnlySwapTransactionsFormFlows) {
  DatasetBuilder b;
  b.block(1, kMonday, 1).block(2, kMonday + 12, 2);
  b.tx(1, addr(50), gwei(5));
  b.tx(2, addr(50), gwei(3));
  b.tx(2, addr(50), gwei(1), gwei(-4));  // net negative: contributes 0
  b.tx(1, addr(60), gwei(9), Wei{}, 0);  // not a swap
  const auto table = build_flows(b.build(), Granularity::weekly);
  ASSERT_EQ(table.size(), 1u);
  const auto& f = table.flows()[0];
  EXPECT_EQ(f.contract, addr(50));
  EXPECT_EQ(f.total_bribe, gwei(8));
  EXPECT_EQ(f.tx_count, 3u);
  ASSERT_EQ(f.cells.size(), 2u);
  EXPECT_EQ(f.cells[0].builder, 1u);
  EXPECT_EQ(f.cells[0].amount, gwei(5));
  EXPECT_EQ(f.epoch_total(0), gwei(8));
  EXPECT_EQ(table.find(addr(60)), nullptr);
}

TEST(Flows, EmptyDatasetHasNoFlows) {
  DatasetBuilder b;
  EXPECT_EQ(build_flows(b.build(), EpochScheme(Granularity::weekly, 0)).size(), 0u);
}

TEST(Flows, FixtureCellsMatchNaiveScan) {
  const auto& ds = fixture_dataset("standard");
  const auto scheme = EpochScheme::for_dataset(ds, Granularity::weekly);
  const auto table = build_flows(ds, scheme);

  // Oracle: for every flow, rescan all blocks and all transactions.
  for (const auto& flow : table.flows()) {
    std::map<std::pair<std::int64_t, BuilderId>, Wei> cells;
    for (const auto& block : ds.blocks()) {
      for (const auto& tx : ds.txs()) {
        if (tx.block_number != block.number || tx.destination != flow.contract || tx.swap_event_count == 0) continue;
        const Wei d = tx.priority_tip + tx.direct_bribe;
        if (d > Wei{}) cells[{(block.timestamp - scheme.anchor()) / kSecondsPerWeek, block.builder}] += d;
      }
    }
    ASSERT_EQ(flow.cells.size(), cells.size());
    std::size_t i = 0;
    for (const auto& [key, amount] : cells) {
      EXPECT_EQ(flow.cells[i].epoch, key.first);
      EXPECT_EQ(flow.cells[i].builder, key.second);
      EXPECT_EQ(flow.cells[i].amount, amount);
      ++i;
    }
  }
}

TEST(Flows, FixtureMatchesManifestCells) {
  const auto& ds = fixture_dataset("standard");
  const auto& m = fixture_manifest("standard");
  const auto table = build_flows(ds, Granularity::weekly);
  ASSERT_EQ(table.size(), m.flows.size());
  for (const auto& mf : m.flows) {
    const auto* f = table.find(mf.contract);
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(f->total_bribe, mf.total_bribe);
    EXPECT_EQ(f->tx_count, mf.tx_count);
    std::map<std::pair<std::int64_t, std::string>, Wei> got;
    for (const auto& c : f->cells) got[{c.epoch, ds.registry().id(c.builder)}] = c.amount;
    std::map<std::pair<std::int64_t, std::string>, Wei> want;
    for (const auto& c : mf.cells) want[{c.epoch, c.builder}] = c.amount;
    EXPECT_EQ(got, want);
  }
}

TEST(Flows, BribesSumToTradingRevenue) {
  for (const char* s : {"standard", "phases", "classifier_separable"}) {
    const auto& ds = fixture_dataset(s);
    Wei sum;
    const auto weekly = build_flows(ds, Granularity::weekly);
    for (const auto& f : weekly.flows()) sum += f.total_bribe;
    EXPECT_EQ(sum, trading_revenue_total(ds)) << s;
    Wei daily;
    const auto by_day = build_flows(ds, Granularity::daily);
    for (const auto& f : by_day.flows()) {
      for (const auto& c : f.cells) daily += c.amount;
    }
    EXPECT_EQ(daily, sum) << s;
  }
}

TEST(Flows, PoolAggregation) {
  DatasetBuilder b;
  b.block(1, kMonday, 1);
  const auto h1 = b.tx(1, addr(50), gwei(1)).hash;
  const auto h2 = b.tx(1, addr(50), gwei(1), Wei{}, 2).hash;
  b.swap(h1, addr(70), 100.0).swap(h2, addr(70), 50.0).swap(h2, addr(71), 10.0);
  const auto table = build_flows(b.build(), Granularity::weekly);
  const auto& f = table.flows()[0];
  ASSERT_EQ(f.pool_volume_usd.size(), 2u);
  EXPECT_DOUBLE_EQ(f.pool_volume_usd[0].second, 150.0);
  const auto profile = flow_pool_profile(f);
  EXPECT_EQ(profile.pool_count, 2u);
  EXPECT_DOUBLE_EQ(*profile.mean_usd, 80.0);
  EXPECT_DOUBLE_EQ(*profile.median_usd, 80.0);
}

}  // namespace
}  // namespace flowscope
