#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowscope/ingest.hpp"
#include "flowscope/pipeline.hpp"

namespace flowscope {

// Scenario files are TOML; see data/scenarios/ for annotated examples.
//
// Every random draw comes from an Rng stream keyed by what it generates:
// ("blocks", week), ("flow:<group>", instance), ("filler", block). Adding a
// flow group therefore leaves the data of the other groups unchanged.

template <typename T>
struct Range {
  T lo{};
  T hi{};
};

struct BuilderSpec {
  std::string id;
  std::string name;
  unsigned addresses = 1;
  bool registered = true;      // false: fee recipients stay out of builders.csv
  std::vector<double> shares;  // one per week; a single value applies to every week
};

enum class Routing : std::uint8_t { random, exact };

struct FlowGroupSpec {
  std::string name;
  unsigned count = 1;
  Mechanism mechanism = Mechanism::other;
  bool eof = false;
  bool labeled = true;
  LabelSource label_source = LabelSource::manual;
  bool ground_truth = false;  // write known_eof to labels.csv
  Routing routing = Routing::random;
  std::optional<std::string> exclusive_to;
  double exclusivity = 0.0;  // probability a tx lands in a target-builder block
  Range<unsigned> active_weeks{0, 0};  // inclusive; defaults to every week
  Range<unsigned> txs_per_week{10, 20};
  Range<double> bribe_eth{0.001, 0.01};  // log-uniform per tx
  double tip_fraction = 0.5;
  Range<std::uint64_t> gas{100'000, 200'000};
  Range<double> swap_mean{1.0, 1.0};  // drawn per contract
  Range<unsigned> senders{1, 1};
  double private_rate = 0.0;
  MevLabel mev_label = MevLabel::none;
  double mev_label_rate = 0.0;
  Range<unsigned> position{0, 10};
  unsigned pools = 1;
};

struct PhaseSpec {
  std::string name;
  unsigned first_week = 0;
  unsigned last_week = 0;  // inclusive
  double budget_eth = 0.0;
  std::array<double, kCategoryCount> mix{};
};

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::int64_t start = 0;  // midnight UTC
  unsigned weeks = 1;
  unsigned blocks_per_week = 100;
  std::uint64_t first_block = 1;
  Range<unsigned> filler_txs{0, 0};
  unsigned filler_contracts = 8;
  double refund_rate = 0.0;
  Range<double> bid_ratio{0.9, 0.9};
  std::vector<BuilderSpec> builders;
  std::vector<FlowGroupSpec> flows;
  std::vector<PhaseSpec> phases;

  // Throws Error{synth.InvalidConfig}.
  void validate() const;
};

ScenarioConfig load_scenario(const std::filesystem::path& toml);
ScenarioConfig parse_scenario(std::string_view toml_text, std::string_view source = "scenario");

struct ManifestCell {
  std::int64_t epoch = 0;
  std::string builder;
  Wei amount;
};

struct ManifestFlow {
  Address contract;
  std::string group;
  Mechanism mechanism = Mechanism::other;
  bool eof = false;
  bool labeled = false;
  LabelSource label_source = LabelSource::manual;  // meaningful when labeled
  std::optional<std::string> exclusive_to;
  std::uint64_t tx_count = 0;
  Wei total_bribe;                 // sum of max(d_t, 0)
  std::vector<ManifestCell> cells;  // (epoch, builder id) ascending
};

struct ManifestWeek {
  std::int64_t epoch = 0;
  std::int64_t start = 0;
  std::uint64_t blocks = 0;
  std::vector<std::pair<std::string, std::uint64_t>> block_counts;  // builder id ascending
};

struct ManifestPhase {
  std::string name;
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::array<Wei, kCategoryCount> bribe{};
  Wei total;
  std::array<double, kCategoryCount> fraction{};
};

struct Manifest {
  std::uint64_t seed = 0;
  std::uint64_t blocks = 0;
  std::uint64_t txs = 0;
  std::uint64_t swap_txs = 0;
  std::uint64_t swaps = 0;
  std::uint64_t private_txs = 0;
  Wei total_revenue;
  Wei trading_revenue;
  Wei total_bid;
  std::vector<ManifestWeek> weeks;
  std::vector<ManifestFlow> flows;  // contract ascending
  std::vector<ManifestPhase> phases;
  std::map<std::string, std::string> files;  // name -> SHA-256

  std::vector<Address> eof_contracts() const;
  const ManifestFlow* find(const Address& contract) const;
};

// Writes blocks.jsonl, txs.jsonl, swaps.jsonl, mempool.txt, builders.csv,
// labels.csv and manifest.json into `out_dir` (created if needed).
Manifest generate(const ScenarioConfig& config, const std::filesystem::path& out_dir);

std::string manifest_to_json(const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);

}  // namespace flowscope
