#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "flowscope/ingest.hpp"

namespace flowscope {

inline constexpr std::size_t kFeatureCount = 9;

// Column order of FeatureVector::values.
enum Feature : std::size_t {
  kAvgSwapEvents = 0,
  kAvgGasUsed,
  kAvgPriorityTipEth,
  kAvgIndexInBlock,
  kMevLabelFrequency,
  kPrivateFrequency,
  kUniqueSenders,
  kAvgTxsPerSender,
  kTotalTxCount,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "avg_swap_events", "avg_gas_used",     "avg_priority_tip_eth", "avg_index_in_block", "mev_label_frequency",
    "private_frequency", "unique_senders", "avg_txs_per_sender",   "total_tx_count",
};

inline constexpr std::size_t kDefaultMinTxCount = 10;

struct FeatureVector {
  Address contract;
  std::array<double, kFeatureCount> values{};
  bool low_confidence = false;  // fewer transactions than the configured minimum

  double operator[](std::size_t i) const { return values[i]; }
};

// Per-transaction features are means over every transaction sent to the
// contract; sums are exact integers, so the result does not depend on the
// order transactions were ingested. Throws Error{features.UnknownContract}.
FeatureVector extract_features(const Dataset& dataset, const Address& contract,
                               std::size_t min_tx_count = kDefaultMinTxCount);

// Contract ascending; optionally restricted to contracts with a swap tx.
std::vector<FeatureVector> extract_all_features(const Dataset& dataset, std::size_t min_tx_count = kDefaultMinTxCount,
                                                bool swap_contracts_only = true);

}  // namespace flowscope
