#include "flowscope/revenue.hpp"

#include "flowscope/error.hpp"

namespace flowscope {

BlockEconomics block_economics_at(const Dataset& dataset, std::size_t block_pos) {
  const auto& block = dataset.blocks()[block_pos];
  BlockEconomics e;
  e.block_number = block.number;
  e.builder = block.builder;
  e.bid = block.bid;
  for (const auto& tx : dataset.block_txs(block_pos)) e.revenue += tx.bribe().positive_part();
  e.profit = e.revenue - e.bid;
  return e;
}

BlockEconomics block_economics(const Dataset& dataset, std::uint64_t block_number) {
  const auto pos = dataset.block_position(block_number);
  if (!pos) throw Error("revenue", Errc::UnknownBlock, "no block " + std::to_string(block_number));
  return block_economics_at(dataset, *pos);
}

Wei trading_revenue_total(const Dataset& dataset) {
  Wei total;
  for (const auto& tx : dataset.txs()) {
    if (tx.is_swap()) total += tx.bribe().positive_part();
  }
  return total;
}

}  // namespace flowscope
