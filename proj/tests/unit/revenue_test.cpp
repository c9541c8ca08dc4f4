#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "flowscope/error.hpp"
#include "flowscope/revenue.hpp"

namespace flowscope {
namespace {

using namespace flowscope::testing;

TEST(Revenue, NegativeBalanceChangesAreIgnored) {
  DatasetBuilder b;
  b.block(10, 1000, 1, gwei(4));
  b.tx(10, addr(50), gwei(3));
  b.tx(10, addr(50), gwei(1), gwei(-6));  // refund, d_t = -5
  b.tx(10, addr(51), gwei(2), gwei(1), 0);
  const auto e = block_economics(b.build(), 10);
  EXPECT_EQ(e.revenue, gwei(6));
  EXPECT_EQ(e.bid, gwei(4));
  EXPECT_EQ(e.profit, gwei(2));
  EXPECT_EQ(e.builder, 1u);
}

TEST(Revenue, ProfitMayBeNegative) {
  DatasetBuilder b;
  b.block(1, 0, 2, gwei(10));
  b.tx(1, addr(50), gwei(3));
  const auto e = block_economics(b.build(), 1);
  EXPECT_EQ(e.profit, gwei(-7));
  EXPECT_GE(e.revenue.value(), 0);
}

TEST(Revenue, EmptyBlock) {
  DatasetBuilder b;
  b.block(1, 0, 0, gwei(1));
  const auto e = block_economics(b.build(), 1);
  EXPECT_EQ(e.revenue, Wei{});
  EXPECT_EQ(e.builder, kProposer);
}

TEST(Revenue, UnknownBlock) {
  DatasetBuilder b;
  b.block(1, 0, 1);
  try {
    block_economics(b.build(), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.qualified_code(), "revenue.UnknownBlock");
  }
}

TEST(Revenue, FixtureMatchesPerTxOracle) {
  const auto& ds = fixture_dataset("standard");
  // Oracle: one pass over raw tx rows keyed by block number.
  std::map<std::uint64_t, Wei> revenue;
  for (const auto& tx : ds.txs()) {
    if (tx.priority_tip + tx.direct_bribe > Wei{}) revenue[tx.block_number] += tx.priority_tip + tx.direct_bribe;
  }
  Wei total;
  Wei bids;
  for (const auto& block : ds.blocks()) {
    const auto e = block_economics(ds, block.number);
    ASSERT_EQ(e.revenue, revenue[block.number]) << block.number;
    ASSERT_EQ(e.profit, e.revenue - block.bid);
    total += e.revenue;
    bids += e.bid;
  }
  EXPECT_EQ(total, fixture_manifest("standard").total_revenue);
  EXPECT_EQ(bids, fixture_manifest("standard").total_bid);
}

TEST(Revenue, TradingTotalMatchesManifest) {
  for (const char* s : {"standard", "phases"}) {
    EXPECT_EQ(trading_revenue_total(fixture_dataset(s)), fixture_manifest(s).trading_revenue) << s;
  }
}

}  // namespace
}  // namespace flowscope
