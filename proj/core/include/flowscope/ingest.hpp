#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowscope/types.hpp"

namespace flowscope {

struct BlockRecord {
  std::uint64_t number = 0;
  std::int64_t timestamp = 0;  // UTC seconds
  Address fee_recipient;
  Wei bid;                     // paid to the proposer
  BuilderId builder = kProposer;
};

struct TxRecord {
  TxHash hash;
  std::uint64_t block_number = 0;
  std::uint32_t index_in_block = 0;
  Address sender;
  Address destination;
  std::uint64_t gas_used = 0;
  Wei priority_tip;
  Wei direct_bribe;  // builder balance delta beyond the tip; negative for refunds
  std::uint32_t swap_event_count = 0;
  bool is_private = false;
  MevLabel mev_label = MevLabel::none;

  // d_t: the builder's balance change caused by this transaction.
  Wei bribe() const noexcept { return priority_tip + direct_bribe; }
  bool is_swap() const noexcept { return swap_event_count > 0; }
};

struct SwapRecord {
  TxHash tx;
  Address pool;
  Address token_in;
  Address token_out;
  double amount_usd = 0.0;
};

class BuilderRegistry {
 public:
  struct Entry {
    Address address;
    std::string builder_id;
    std::string name;
  };

  BuilderRegistry();
  // Throws SchemaError on duplicate addresses or the reserved "proposer" id.
  explicit BuilderRegistry(std::span<const Entry> entries);

  static BuilderRegistry load(const std::filesystem::path& csv);

  // Addresses absent from the registry resolve to kProposer.
  BuilderId resolve(const Address& fee_recipient) const;
  std::optional<BuilderId> find(std::string_view builder_id) const;
  const std::string& id(BuilderId b) const { return ids_.at(b); }
  const std::string& display_name(BuilderId b) const { return names_.at(b); }
  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t address_count() const noexcept { return by_address_.size(); }

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::map<Address, BuilderId> by_address_;
};

enum class Mechanism : std::uint8_t { protocol, atomic, non_atomic, other, unlabeled };
std::string_view to_string(Mechanism m) noexcept;
bool parse_mechanism(std::string_view text, Mechanism& out) noexcept;

// Manual labels are curated ground truth. Heuristic labels (explorer tags,
// deployer linkage) only inform the second pipeline stage.
enum class LabelSource : std::uint8_t { manual, heuristic };

struct ContractLabel {
  Mechanism mechanism = Mechanism::unlabeled;
  std::optional<bool> known_eof;  // unset: not part of the EOF ground truth
  LabelSource source = LabelSource::manual;
};

class LabelSet {
 public:
  LabelSet() = default;

  // labels.csv: contract,mechanism,known_eof[,source]
  static LabelSet load(const std::filesystem::path& csv);

  void set(const Address& contract, ContractLabel label);
  const ContractLabel* find(const Address& contract) const;
  // Manual mechanism if present, otherwise Mechanism::unlabeled.
  Mechanism manual_mechanism(const Address& contract) const;
  const std::map<Address, ContractLabel>& entries() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::map<Address, ContractLabel> labels_;
};

struct DatasetPaths {
  std::filesystem::path blocks;
  std::filesystem::path txs;
  std::filesystem::path swaps;

  // blocks.jsonl, txs.jsonl, swaps.jsonl inside `dir`.
  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

// Immutable, validated view over blocks, transactions and swaps.
// Transactions are ordered by (block_number, index_in_block).
class Dataset {
 public:
  Dataset() = default;

  std::span<const BlockRecord> blocks() const noexcept { return blocks_; }
  std::span<const TxRecord> txs() const noexcept { return txs_; }
  std::span<const SwapRecord> swaps() const noexcept { return swaps_; }
  const BuilderRegistry& registry() const noexcept { return registry_; }

  // Position of a block in blocks(), or nullopt.
  std::optional<std::size_t> block_position(std::uint64_t number) const;
  std::span<const TxRecord> block_txs(std::size_t block_pos) const;
  // Block position of the transaction at tx_pos.
  std::size_t tx_block(std::size_t tx_pos) const { return tx_block_.at(tx_pos); }
  const BlockRecord& block_of(std::size_t tx_pos) const { return blocks_[tx_block_.at(tx_pos)]; }

  // Positions in txs() of transactions sent to `contract`, ascending.
  std::span<const std::uint32_t> contract_txs(const Address& contract) const;
  // All destination contracts, ascending.
  std::vector<Address> contracts() const;
  // Positions in swaps() belonging to the transaction at tx_pos.
  std::span<const std::uint32_t> tx_swaps(std::size_t tx_pos) const;

  // SHA-256 over a canonical serialization; equal for equal content.
  std::string digest() const;

 private:
  friend struct DatasetAccess;

  void build_indices();

  std::vector<BlockRecord> blocks_;
  std::vector<TxRecord> txs_;
  std::vector<SwapRecord> swaps_;
  BuilderRegistry registry_;

  std::vector<std::size_t> block_tx_offsets_;  // size blocks+1
  std::vector<std::size_t> tx_block_;
  std::map<Address, std::vector<std::uint32_t>> contract_index_;
  std::vector<std::size_t> tx_swap_offsets_;   // size txs+1
  std::vector<std::uint32_t> tx_swap_index_;
};

// Loads and validates the three chain files, resolving fee recipients through
// the registry. Any schema violation rejects the whole load.
Dataset load_dataset(const DatasetPaths& paths, const std::filesystem::path& builder_registry);

// In-memory construction with the same validation as load_dataset. Records may
// arrive in any order.
Dataset make_dataset(std::vector<BlockRecord> blocks, std::vector<TxRecord> txs,
                     std::vector<SwapRecord> swaps, BuilderRegistry registry);

// is_private := hash not in the mempool set. Unknown hashes are ignored.
Dataset mark_visibility(const Dataset& dataset, const std::set<TxHash>& mempool);
Dataset mark_visibility(const Dataset& dataset, const std::filesystem::path& mempool_hashes);
std::set<TxHash> load_mempool(const std::filesystem::path& path);

// Convenience: loads <dir>/{blocks,txs,swaps}.jsonl with <dir>/builders.csv and
// applies <dir>/mempool.txt when present.
Dataset load_directory(const std::filesystem::path& dir);

}  // namespace flowscope
