#include "flowscope/flows.hpp"

#include <algorithm>
#include <map>

#include "flowscope/parallel.hpp"

namespace flowscope {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::int64_t floor_to_day(std::int64_t timestamp) noexcept {
  return floor_div(timestamp, kSecondsPerDay) * kSecondsPerDay;
}

EpochScheme::EpochScheme(Granularity granularity, std::int64_t anchor)
    : granularity_(granularity),
      anchor_(granularity == Granularity::daily ? floor_to_day(anchor) : anchor),
      length_(granularity == Granularity::daily ? kSecondsPerDay : kSecondsPerWeek) {}

EpochScheme EpochScheme::for_dataset(const Dataset& dataset, Granularity granularity,
                                     std::optional<std::int64_t> anchor) {
  if (anchor) return EpochScheme(granularity, *anchor);
  const auto first = dataset.blocks().empty() ? 0 : dataset.blocks().front().timestamp;
  return EpochScheme(granularity, floor_to_day(first));
}

std::int64_t EpochScheme::index_of(std::int64_t timestamp) const noexcept {
  return floor_div(timestamp - anchor_, length_);
}

Epoch EpochScheme::epoch(std::int64_t index) const noexcept {
  const auto start = anchor_ + index * length_;
  return {index, start, start + length_, granularity_};
}

Wei OrderFlow::epoch_total(std::int64_t epoch) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), epoch,
                             [](const BribeCell& c, std::int64_t e) { return c.epoch < e; });
  Wei sum;
  for (; it != cells.end() && it->epoch == epoch; ++it) sum += it->amount;
  return sum;
}

std::vector<std::int64_t> OrderFlow::active_epochs() const {
  std::vector<std::int64_t> out;
  for (const auto& c : cells) {
    if (out.empty() || out.back() != c.epoch) out.push_back(c.epoch);
  }
  return out;
}

FlowTable::FlowTable(EpochScheme scheme, std::vector<OrderFlow> flows)
    : scheme_(scheme), flows_(std::move(flows)) {
  std::sort(flows_.begin(), flows_.end(),
            [](const OrderFlow& a, const OrderFlow& b) { return a.contract < b.contract; });
}

const OrderFlow* FlowTable::find(const Address& contract) const {
  auto it = std::lower_bound(flows_.begin(), flows_.end(), contract,
                             [](const OrderFlow& f, const Address& a) { return f.contract < a; });
  return it != flows_.end() && it->contract == contract ? &*it : nullptr;
}

FlowTable build_flows(const Dataset& dataset, const EpochScheme& scheme) {
  std::vector<Address> contracts;
  for (const auto& contract : dataset.contracts()) {
    for (auto pos : dataset.contract_txs(contract)) {
      if (dataset.txs()[pos].is_swap()) {
        contracts.push_back(contract);
        break;
      }
    }
  }

  std::vector<OrderFlow> flows(contracts.size());
  parallel_for(contracts.size(), [&](std::size_t k) {
    OrderFlow& flow = flows[k];
    flow.contract = contracts[k];
    std::map<std::pair<std::int64_t, BuilderId>, Wei> cells;
    std::map<Address, double> pools;
    for (auto pos : dataset.contract_txs(flow.contract)) {
      const auto& tx = dataset.txs()[pos];
      if (!tx.is_swap()) continue;
      ++flow.tx_count;
      const auto& block = dataset.block_of(pos);
      const Wei bribe = tx.bribe().positive_part();
      if (bribe.value() > 0) {
        cells[{scheme.index_of(block.timestamp), block.builder}] += bribe;
        flow.total_bribe += bribe;
      }
      for (auto s : dataset.tx_swaps(pos)) {
        const auto& swap = dataset.swaps()[s];
        pools[swap.pool] += swap.amount_usd;
      }
    }
    flow.cells.reserve(cells.size());
    for (const auto& [key, amount] : cells) flow.cells.push_back({key.first, key.second, amount});
    flow.pool_volume_usd.assign(pools.begin(), pools.end());
  });
  return FlowTable(scheme, std::move(flows));
}

FlowTable build_flows(const Dataset& dataset, Granularity granularity) {
  return build_flows(dataset, EpochScheme::for_dataset(dataset, granularity));
}

PoolProfile flow_pool_profile(const OrderFlow& flow) {
  PoolProfile p;
  p.pool_count = flow.pool_volume_usd.size();
  if (p.pool_count == 0) return p;
  std::vector<double> volumes;
  volumes.reserve(p.pool_count);
  double sum = 0.0;
  for (const auto& [_, v] : flow.pool_volume_usd) {
    volumes.push_back(v);
    sum += v;
  }
  std::sort(volumes.begin(), volumes.end());
  p.mean_usd = sum / static_cast<double>(volumes.size());
  const auto n = volumes.size();
  p.median_usd = n % 2 == 1 ? volumes[n / 2] : 0.5 * (volumes[n / 2 - 1] + volumes[n / 2]);
  return p;
}

}  // namespace flowscope
