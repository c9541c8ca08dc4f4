#include "flowscope/features.hpp"

#include <algorithm>

#include "flowscope/error.hpp"
#include "flowscope/parallel.hpp"

namespace flowscope {

FeatureVector extract_features(const Dataset& dataset, const Address& contract, std::size_t min_tx_count) {
  const auto positions = dataset.contract_txs(contract);
  if (positions.empty()) throw Error("features", Errc::UnknownContract, "no transactions to " + contract.hex());

  unsigned __int128 swaps = 0;
  unsigned __int128 gas = 0;
  unsigned __int128 index = 0;
  Wei tips;
  std::size_t mev = 0;
  std::size_t hidden = 0;
  std::vector<Address> senders;
  senders.reserve(positions.size());
  for (auto pos : positions) {
    const auto& tx = dataset.txs()[pos];
    swaps += tx.swap_event_count;
    gas += tx.gas_used;
    index += tx.index_in_block;
    tips += tx.priority_tip;
    mev += tx.mev_label != MevLabel::none ? 1 : 0;
    hidden += tx.is_private ? 1 : 0;
    senders.push_back(tx.sender);
  }
  std::sort(senders.begin(), senders.end());
  const auto unique = static_cast<std::size_t>(std::unique(senders.begin(), senders.end()) - senders.begin());

  const auto n = static_cast<long double>(positions.size());
  FeatureVector v;
  v.contract = contract;
  v.values[kAvgSwapEvents] = static_cast<double>(static_cast<long double>(swaps) / n);
  v.values[kAvgGasUsed] = static_cast<double>(static_cast<long double>(gas) / n);
  v.values[kAvgPriorityTipEth] = static_cast<double>(tips.ld() / n / 1e18L);
  v.values[kAvgIndexInBlock] = static_cast<double>(static_cast<long double>(index) / n);
  v.values[kMevLabelFrequency] = static_cast<double>(static_cast<long double>(mev) / n);
  v.values[kPrivateFrequency] = static_cast<double>(static_cast<long double>(hidden) / n);
  v.values[kUniqueSenders] = static_cast<double>(unique);
  v.values[kAvgTxsPerSender] = static_cast<double>(n / static_cast<long double>(unique));
  v.values[kTotalTxCount] = static_cast<double>(positions.size());
  v.low_confidence = positions.size() < min_tx_count;
  return v;
}

std::vector<FeatureVector> extract_all_features(const Dataset& dataset, std::size_t min_tx_count,
                                                bool swap_contracts_only) {
  std::vector<Address> contracts;
  for (const auto& c : dataset.contracts()) {
    const auto txs = dataset.contract_txs(c);
    const bool keep = !swap_contracts_only ||
                      std::any_of(txs.begin(), txs.end(), [&](auto p) { return dataset.txs()[p].is_swap(); });
    if (keep) contracts.push_back(c);
  }
  std::vector<FeatureVector> out(contracts.size());
  parallel_for(contracts.size(), [&](std::size_t k) { out[k] = extract_features(dataset, contracts[k], min_tx_count); });
  return out;
}

}  // namespace flowscope
