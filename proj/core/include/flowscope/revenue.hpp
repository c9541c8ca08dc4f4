#pragma once

#include <cstdint>

#include "flowscope/ingest.hpp"

namespace flowscope {

struct BlockEconomics {
  std::uint64_t block_number = 0;
  BuilderId builder = kProposer;
  Wei revenue;  // R_B = sum of max(d_t, 0)
  Wei bid;      // b_B
  Wei profit;   // R_B - b_B, may be negative
};

// Throws Error{revenue.UnknownBlock} if the block is absent.
BlockEconomics block_economics(const Dataset& dataset, std::uint64_t block_number);
BlockEconomics block_economics_at(const Dataset& dataset, std::size_t block_pos);

// Sum of max(d_t, 0) over transactions with at least one swap event.
Wei trading_revenue_total(const Dataset& dataset);

}  // namespace flowscope
