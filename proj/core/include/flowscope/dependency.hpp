#pragma once

#include <array>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "flowscope/ingest.hpp"
#include "flowscope/revenue.hpp"

namespace flowscope {

// Ordinal EDR bins, left-closed / right-open.
enum class EdrBin : std::uint8_t { negative, below_half, half_to_one, one_to_ten, ten_to_hundred, hundred_plus };
inline constexpr std::size_t kEdrBinCount = 6;
std::string_view to_string(EdrBin bin) noexcept;

struct EdrRecord {
  std::uint64_t block_number = 0;
  BuilderId builder = kProposer;
  Wei eof_bribe;
  Wei profit;
  double edr = 0.0;  // eof_bribe / profit; +inf when profit == 0 < eof_bribe
  EdrBin bin = EdrBin::below_half;
};

// Bin from exact integer comparisons: profit < 0 is negative regardless of
// the EOF bribe; profit == 0 goes to [100, inf) if eof_bribe > 0 else [0, 0.5).
EdrBin edr_bin(Wei eof_bribe, Wei profit) noexcept;

EdrRecord edr_for_block(const BlockEconomics& economics, const std::set<Address>& eof_set, const Dataset& dataset);
std::vector<EdrRecord> edr_for_all_blocks(const Dataset& dataset, const std::set<Address>& eof_set);

using EdrHistogram = std::array<double, kEdrBinCount>;

// Fraction of the builder's blocks per bin. Throws Error{dependency.NoBlocks}.
EdrHistogram edr_histogram(std::span<const EdrRecord> records, BuilderId builder);
// Pooled over every record.
EdrHistogram edr_histogram_pooled(std::span<const EdrRecord> records);

}  // namespace flowscope
