#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "flowscope/ingest.hpp"

namespace flowscope {

enum class Granularity : std::uint8_t { weekly, daily };

inline constexpr std::int64_t kSecondsPerDay = 86'400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;

struct Epoch {
  std::int64_t index = 0;
  std::int64_t start = 0;  // inclusive, UTC seconds
  std::int64_t end = 0;    // exclusive
  Granularity granularity = Granularity::weekly;
};

// Fixed-length UTC windows. Weekly windows start at `anchor`; daily windows
// are calendar days, so their anchor is always truncated to midnight.
class EpochScheme {
 public:
  EpochScheme(Granularity granularity, std::int64_t anchor);

  // Default anchor: the first block's timestamp truncated to 00:00 UTC.
  static EpochScheme for_dataset(const Dataset& dataset, Granularity granularity,
                                 std::optional<std::int64_t> anchor = std::nullopt);

  std::int64_t index_of(std::int64_t timestamp) const noexcept;
  Epoch epoch(std::int64_t index) const noexcept;

  Granularity granularity() const noexcept { return granularity_; }
  std::int64_t anchor() const noexcept { return anchor_; }
  std::int64_t length() const noexcept { return length_; }

 private:
  Granularity granularity_;
  std::int64_t anchor_;
  std::int64_t length_;
};

std::int64_t floor_to_day(std::int64_t timestamp) noexcept;

// R_{t,j->i}: bribes from one flow to one builder in one epoch.
struct BribeCell {
  std::int64_t epoch = 0;
  BuilderId builder = kProposer;
  Wei amount;
};

struct OrderFlow {
  Address contract;
  Wei total_bribe;
  std::size_t tx_count = 0;
  std::vector<BribeCell> cells;                           // (epoch, builder) ascending, no zero cells
  std::vector<std::pair<Address, double>> pool_volume_usd;  // pool ascending

  // R_{t,j}
  Wei epoch_total(std::int64_t epoch) const;
  std::vector<std::int64_t> active_epochs() const;
};

class FlowTable {
 public:
  FlowTable(EpochScheme scheme, std::vector<OrderFlow> flows);

  const EpochScheme& scheme() const noexcept { return scheme_; }
  const std::vector<OrderFlow>& flows() const noexcept { return flows_; }
  std::size_t size() const noexcept { return flows_.size(); }
  const OrderFlow* find(const Address& contract) const;

 private:
  EpochScheme scheme_;
  std::vector<OrderFlow> flows_;  // contract ascending
};

// One flow per destination contract among swap transactions. Each tx's
// max(d_t, 0) is credited to its block's builder in the block's epoch.
FlowTable build_flows(const Dataset& dataset, const EpochScheme& scheme);
FlowTable build_flows(const Dataset& dataset, Granularity granularity);

struct PoolProfile {
  std::size_t pool_count = 0;
  std::optional<double> mean_usd;    // nullopt when no pools
  std::optional<double> median_usd;
};

PoolProfile flow_pool_profile(const OrderFlow& flow);

}  // namespace flowscope
