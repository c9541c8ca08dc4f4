#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flowscope/ingest.hpp"
#include "flowscope/synth.hpp"

namespace flowscope::testing {

std::filesystem::path data_dir();
std::filesystem::path work_dir();

// Generates data/scenarios/<name>.toml once per process and caches the result.
const std::filesystem::path& fixture_dir(const std::string& scenario);
const Dataset& fixture_dataset(const std::string& scenario);
const Manifest& fixture_manifest(const std::string& scenario);
const LabelSet& fixture_labels(const std::string& scenario);

// Fresh scratch directory under the test work dir.
std::filesystem::path scratch(std::string_view name);

Address addr(std::uint64_t n);
TxHash txhash(std::uint64_t n);
inline Wei eth(double x) { return Wei::from_eth(x); }
inline Wei gwei(std::int64_t n) { return Wei{static_cast<Wei::rep>(n) * 1'000'000'000}; }

// Small in-memory datasets for unit tests.
class DatasetBuilder {
 public:
  // Builders are registered as b1, b2, ... with fee recipient addr(1000 + i).
  explicit DatasetBuilder(unsigned builders = 3);

  // Builder 0 means an unregistered fee recipient.
  DatasetBuilder& block(std::uint64_t number, std::int64_t timestamp, unsigned builder, Wei bid = Wei{});
  TxRecord& tx(std::uint64_t block, const Address& to, Wei tip, Wei direct = Wei{}, std::uint32_t swaps = 1);
  DatasetBuilder& swap(const TxHash& tx, const Address& pool, double usd);

  Dataset build() const;
  std::vector<BlockRecord>& blocks() { return blocks_; }
  std::vector<TxRecord>& txs() { return txs_; }

 private:
  unsigned builders_;
  std::vector<BlockRecord> blocks_;
  std::vector<TxRecord> txs_;
  std::vector<SwapRecord> swaps_;
  std::uint64_t next_hash_ = 1;
};

std::string slurp(const std::filesystem::path& path);

}  // namespace flowscope::testing
