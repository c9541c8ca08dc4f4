#include "flowscope/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "flowscope/digest.hpp"
#include "flowscope/error.hpp"

namespace flowscope {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Source {
  std::string file;
  std::vector<std::size_t> lines;  // line number of each record, 1-based

  std::size_t line(std::size_t i) const { return i < lines.size() ? lines[i] : i + 1; }
};

std::ifstream open_or_throw(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("ingest", Errc::MissingFile, "cannot open " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Reads non-empty lines of a JSONL file, parsing each into an object.
template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn&& fn) {
  auto in = open_or_throw(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(path.filename().string(), lineno, "<line>", e.what());
    }
    if (!obj.is_object()) throw SchemaError(path.filename().string(), lineno, "<line>", "not a JSON object");
    fn(obj, lineno);
  }
}

class FieldReader {
 public:
  FieldReader(const json& obj, std::string file, std::size_t line)
      : obj_(obj), file_(std::move(file)), line_(line) {}

  const json& require(const char* key) const {
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) fail(key, "missing");
    return *it;
  }

  bool has(const char* key) const {
    auto it = obj_.find(key);
    return it != obj_.end() && !it->is_null();
  }

  std::uint64_t u64(const char* key) const {
    const auto& v = require(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_string()) {
      Wei w;
      if (Wei::try_parse(v.get<std::string>(), w) && w.value() >= 0 &&
          w.value() <= static_cast<Wei::rep>(~std::uint64_t{0})) {
        return static_cast<std::uint64_t>(w.value());
      }
    }
    fail(key, "expected a non-negative integer");
  }

  std::int64_t i64(const char* key) const {
    const auto& v = require(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    fail(key, "expected an integer");
  }

  // Integer wei, given as a JSON integer or a decimal string.
  Wei wei(const char* key) const {
    const auto& v = require(key);
    if (v.is_number_unsigned()) return Wei{static_cast<Wei::rep>(v.get<std::uint64_t>())};
    if (v.is_number_integer()) return Wei{static_cast<Wei::rep>(v.get<std::int64_t>())};
    Wei w;
    if (v.is_string() && Wei::try_parse(v.get<std::string>(), w)) return w;
    fail(key, "expected integer wei");
  }

  double number(const char* key) const {
    const auto& v = require(key);
    if (v.is_number()) return v.get<double>();
    fail(key, "expected a number");
  }

  template <typename Bytes>
  Bytes hex(const char* key) const {
    const auto& v = require(key);
    Bytes out;
    if (v.is_string() && Bytes::try_from_hex(v.get<std::string>(), out)) return out;
    fail(key, "expected " + std::to_string(2 * Bytes::kSize) + " hex digits");
  }

  std::string str(const char* key) const {
    const auto& v = require(key);
    if (v.is_string()) return v.get<std::string>();
    fail(key, "expected a string");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw SchemaError(file_, line_, key, why);
  }

 private:
  const json& obj_;
  std::string file_;
  std::size_t line_;
};

Dataset assemble(std::vector<BlockRecord> blocks, Source block_src, std::vector<TxRecord> txs, Source tx_src,
                 std::vector<SwapRecord> swaps, Source swap_src, BuilderRegistry registry, bool presorted);

}  // namespace

struct DatasetAccess {
  static Dataset build(std::vector<BlockRecord> blocks, std::vector<TxRecord> txs, std::vector<SwapRecord> swaps,
                       BuilderRegistry registry) {
    Dataset ds;
    ds.blocks_ = std::move(blocks);
    ds.txs_ = std::move(txs);
    ds.swaps_ = std::move(swaps);
    ds.registry_ = std::move(registry);
    ds.build_indices();
    return ds;
  }

  static void set_visibility(Dataset& ds, const std::set<TxHash>& mempool) {
    for (auto& t : ds.txs_) t.is_private = !mempool.contains(t.hash);
  }
};

// ---------------------------------------------------------------------------
// BuilderRegistry

BuilderRegistry::BuilderRegistry() : ids_{std::string(kProposerName)}, names_{std::string(kProposerName)} {}

BuilderRegistry::BuilderRegistry(std::span<const Entry> entries) : BuilderRegistry() {
  std::size_t row = 0;
  for (const auto& e : entries) {
    ++row;
    if (e.builder_id.empty()) throw SchemaError("builders.csv", row, "builder_id", "empty");
    if (e.builder_id == kProposerName) throw SchemaError("builders.csv", row, "builder_id", "'proposer' is reserved");
    auto id = find(e.builder_id);
    if (!id) {
      id = static_cast<BuilderId>(ids_.size());
      ids_.push_back(e.builder_id);
      names_.push_back(e.name.empty() ? e.builder_id : e.name);
    }
    auto [it, inserted] = by_address_.emplace(e.address, *id);
    if (!inserted && it->second != *id) {
      throw SchemaError("builders.csv", row, "address", e.address.hex() + " mapped to two builders");
    }
  }
}

BuilderRegistry BuilderRegistry::load(const fs::path& csv) {
  auto in = open_or_throw(csv);
  std::vector<Entry> entries;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cols = split_csv(line);
    if (entries.empty() && lines.empty() && !cols.empty() && cols[0] == "address") continue;
    if (cols.size() < 2) throw SchemaError(csv.filename().string(), lineno, "<line>", "expected address,builder_id,name");
    Entry e;
    if (!Address::try_from_hex(cols[0], e.address)) {
      throw SchemaError(csv.filename().string(), lineno, "address", "expected 40 hex digits");
    }
    e.builder_id = cols[1];
    e.name = cols.size() > 2 ? cols[2] : "";
    entries.push_back(std::move(e));
    lines.push_back(lineno);
  }
  try {
    return BuilderRegistry(entries);
  } catch (const SchemaError& e) {
    throw SchemaError(csv.filename().string(), lines.at(e.line() - 1), e.field(), e.what());
  }
}

BuilderId BuilderRegistry::resolve(const Address& fee_recipient) const {
  auto it = by_address_.find(fee_recipient);
  return it == by_address_.end() ? kProposer : it->second;
}

std::optional<BuilderId> BuilderRegistry::find(std::string_view builder_id) const {
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (ids_[i] == builder_id) return static_cast<BuilderId>(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Labels

std::string_view to_string(Mechanism m) noexcept {
  switch (m) {
    case Mechanism::protocol: return "protocol";
    case Mechanism::atomic: return "atomic";
    case Mechanism::non_atomic: return "non_atomic";
    case Mechanism::other: return "other";
    case Mechanism::unlabeled: return "unlabeled";
  }
  return "unlabeled";
}

bool parse_mechanism(std::string_view text, Mechanism& out) noexcept {
  if (text == "protocol") out = Mechanism::protocol;
  else if (text == "atomic") out = Mechanism::atomic;
  else if (text == "non_atomic" || text == "non-atomic") out = Mechanism::non_atomic;
  else if (text == "other") out = Mechanism::other;
  else if (text == "unlabeled" || text.empty()) out = Mechanism::unlabeled;
  else return false;
  return true;
}

LabelSet LabelSet::load(const fs::path& csv) {
  auto in = open_or_throw(csv);
  const auto file = csv.filename().string();
  LabelSet set;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cols = split_csv(line);
    if (first && cols[0] == "contract") {
      first = false;
      continue;
    }
    first = false;
    if (cols.size() < 2) throw SchemaError(file, lineno, "<line>", "expected contract,mechanism,known_eof");
    Address contract;
    if (!Address::try_from_hex(cols[0], contract)) throw SchemaError(file, lineno, "contract", "expected 40 hex digits");
    ContractLabel label;
    if (!parse_mechanism(cols[1], label.mechanism)) throw SchemaError(file, lineno, "mechanism", "unknown '" + cols[1] + "'");
    if (cols.size() > 2 && !cols[2].empty()) {
      if (cols[2] == "true" || cols[2] == "1") label.known_eof = true;
      else if (cols[2] == "false" || cols[2] == "0") label.known_eof = false;
      else throw SchemaError(file, lineno, "known_eof", "expected true/false");
    }
    if (cols.size() > 3 && !cols[3].empty()) {
      if (cols[3] == "manual") label.source = LabelSource::manual;
      else if (cols[3] == "heuristic") label.source = LabelSource::heuristic;
      else throw SchemaError(file, lineno, "source", "expected manual/heuristic");
    }
    if (set.labels_.contains(contract)) throw SchemaError(file, lineno, "contract", "duplicate label for " + contract.hex());
    set.labels_.emplace(contract, label);
  }
  return set;
}

void LabelSet::set(const Address& contract, ContractLabel label) { labels_[contract] = label; }

const ContractLabel* LabelSet::find(const Address& contract) const {
  auto it = labels_.find(contract);
  return it == labels_.end() ? nullptr : &it->second;
}

Mechanism LabelSet::manual_mechanism(const Address& contract) const {
  const auto* l = find(contract);
  if (l == nullptr || l->source != LabelSource::manual) return Mechanism::unlabeled;
  return l->mechanism;
}

// ---------------------------------------------------------------------------
// Dataset

DatasetPaths DatasetPaths::in_directory(const fs::path& dir) {
  return {dir / "blocks.jsonl", dir / "txs.jsonl", dir / "swaps.jsonl"};
}

std::optional<std::size_t> Dataset::block_position(std::uint64_t number) const {
  auto it = std::lower_bound(blocks_.begin(), blocks_.end(), number,
                             [](const BlockRecord& b, std::uint64_t n) { return b.number < n; });
  if (it == blocks_.end() || it->number != number) return std::nullopt;
  return static_cast<std::size_t>(it - blocks_.begin());
}

std::span<const TxRecord> Dataset::block_txs(std::size_t block_pos) const {
  const auto begin = block_tx_offsets_.at(block_pos);
  const auto end = block_tx_offsets_.at(block_pos + 1);
  return std::span<const TxRecord>(txs_).subspan(begin, end - begin);
}

std::span<const std::uint32_t> Dataset::contract_txs(const Address& contract) const {
  auto it = contract_index_.find(contract);
  if (it == contract_index_.end()) return {};
  return it->second;
}

std::vector<Address> Dataset::contracts() const {
  std::vector<Address> out;
  out.reserve(contract_index_.size());
  for (const auto& [addr, _] : contract_index_) out.push_back(addr);
  return out;
}

std::span<const std::uint32_t> Dataset::tx_swaps(std::size_t tx_pos) const {
  const auto begin = tx_swap_offsets_.at(tx_pos);
  const auto end = tx_swap_offsets_.at(tx_pos + 1);
  return std::span<const std::uint32_t>(tx_swap_index_).subspan(begin, end - begin);
}

void Dataset::build_indices() {
  block_tx_offsets_.assign(blocks_.size() + 1, 0);
  tx_block_.resize(txs_.size());
  std::size_t t = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    block_tx_offsets_[b] = t;
    while (t < txs_.size() && txs_[t].block_number == blocks_[b].number) tx_block_[t++] = b;
  }
  block_tx_offsets_[blocks_.size()] = t;

  contract_index_.clear();
  for (std::size_t i = 0; i < txs_.size(); ++i) {
    contract_index_[txs_[i].destination].push_back(static_cast<std::uint32_t>(i));
  }

  std::unordered_map<std::string, std::uint32_t> by_hash;  // raw 32 bytes as key
  by_hash.reserve(txs_.size());
  for (std::size_t i = 0; i < txs_.size(); ++i) {
    const auto& bytes = txs_[i].hash.bytes();
    by_hash.emplace(std::string(bytes.begin(), bytes.end()), static_cast<std::uint32_t>(i));
  }
  std::vector<std::vector<std::uint32_t>> per_tx(txs_.size());
  for (std::size_t s = 0; s < swaps_.size(); ++s) {
    const auto& bytes = swaps_[s].tx.bytes();
    per_tx[by_hash.at(std::string(bytes.begin(), bytes.end()))].push_back(static_cast<std::uint32_t>(s));
  }
  tx_swap_offsets_.assign(txs_.size() + 1, 0);
  tx_swap_index_.clear();
  tx_swap_index_.reserve(swaps_.size());
  for (std::size_t i = 0; i < txs_.size(); ++i) {
    tx_swap_index_.insert(tx_swap_index_.end(), per_tx[i].begin(), per_tx[i].end());
    tx_swap_offsets_[i + 1] = tx_swap_index_.size();
  }
}

std::string Dataset::digest() const {
  std::ostringstream out;
  out << "registry\n";
  for (std::size_t b = 0; b < registry_.size(); ++b) out << registry_.id(b) << '\n';
  out << "blocks\n";
  for (const auto& b : blocks_) {
    out << b.number << ' ' << b.timestamp << ' ' << b.fee_recipient.hex() << ' ' << b.bid.str() << ' '
        << b.builder << '\n';
  }
  out << "txs\n";
  for (const auto& t : txs_) {
    out << t.hash.hex() << ' ' << t.block_number << ' ' << t.index_in_block << ' ' << t.sender.hex() << ' '
        << t.destination.hex() << ' ' << t.gas_used << ' ' << t.priority_tip.str() << ' ' << t.direct_bribe.str()
        << ' ' << t.swap_event_count << ' ' << t.is_private << ' ' << to_string(t.mev_label) << '\n';
  }
  out << "swaps\n";
  out.precision(17);
  for (const auto& s : swaps_) {
    out << s.tx.hex() << ' ' << s.pool.hex() << ' ' << s.token_in.hex() << ' ' << s.token_out.hex() << ' '
        << s.amount_usd << '\n';
  }
  return sha256_hex(out.str());
}

namespace {

Dataset assemble(std::vector<BlockRecord> blocks, Source block_src, std::vector<TxRecord> txs, Source tx_src,
                 std::vector<SwapRecord> swaps, Source swap_src, BuilderRegistry registry, bool presorted) {
  if (!presorted) {
    std::vector<std::size_t> order(blocks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return blocks[a].number < blocks[b].number; });
    std::vector<BlockRecord> sorted;
    sorted.reserve(blocks.size());
    for (auto i : order) sorted.push_back(blocks[i]);
    blocks = std::move(sorted);
    block_src.lines.clear();
    for (auto i : order) block_src.lines.push_back(i + 1);
  }

  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].bid.value() < 0) throw SchemaError(block_src.file, block_src.line(i), "bid", "negative bid");
    if (i > 0 && blocks[i].number <= blocks[i - 1].number) {
      throw SchemaError(block_src.file, block_src.line(i), "number", "block numbers must be strictly increasing");
    }
    if (i > 0 && blocks[i].timestamp < blocks[i - 1].timestamp) {
      throw SchemaError(block_src.file, block_src.line(i), "timestamp", "timestamp decreases with block number");
    }
    blocks[i].builder = registry.resolve(blocks[i].fee_recipient);
  }

  auto block_exists = [&](std::uint64_t n) {
    return std::binary_search(blocks.begin(), blocks.end(), n, [](const auto& a, const auto& b) {
      if constexpr (std::is_same_v<std::decay_t<decltype(a)>, BlockRecord>) return a.number < b;
      else return a < b.number;
    });
  };

  std::vector<std::size_t> tx_order(txs.size());
  std::iota(tx_order.begin(), tx_order.end(), 0);
  for (std::size_t i = 0; i < txs.size(); ++i) {
    const auto& t = txs[i];
    if (t.gas_used == 0) throw SchemaError(tx_src.file, tx_src.line(i), "gas_used", "must be positive");
    if (t.priority_tip.value() < 0) throw SchemaError(tx_src.file, tx_src.line(i), "priority_tip", "negative tip");
    if (!block_exists(t.block_number)) {
      throw SchemaError(tx_src.file, tx_src.line(i), "block", "unknown block " + std::to_string(t.block_number));
    }
  }
  std::stable_sort(tx_order.begin(), tx_order.end(), [&](std::size_t a, std::size_t b) {
    if (txs[a].block_number != txs[b].block_number) return txs[a].block_number < txs[b].block_number;
    return txs[a].index_in_block < txs[b].index_in_block;
  });
  for (std::size_t k = 1; k < tx_order.size(); ++k) {
    const auto& prev = txs[tx_order[k - 1]];
    const auto& cur = txs[tx_order[k]];
    if (prev.block_number == cur.block_number && prev.index_in_block == cur.index_in_block) {
      throw SchemaError(tx_src.file, tx_src.line(std::max(tx_order[k - 1], tx_order[k])), "index",
                        "duplicate index_in_block " + std::to_string(cur.index_in_block) + " in block " +
                            std::to_string(cur.block_number));
    }
  }
  {
    std::vector<std::size_t> by_hash(txs.size());
    std::iota(by_hash.begin(), by_hash.end(), 0);
    std::sort(by_hash.begin(), by_hash.end(), [&](std::size_t a, std::size_t b) {
      return txs[a].hash < txs[b].hash || (txs[a].hash == txs[b].hash && a < b);
    });
    for (std::size_t k = 1; k < by_hash.size(); ++k) {
      if (txs[by_hash[k]].hash == txs[by_hash[k - 1]].hash) {
        throw SchemaError(tx_src.file, tx_src.line(by_hash[k]), "hash", "duplicate transaction " + txs[by_hash[k]].hash.hex());
      }
    }
    for (std::size_t s = 0; s < swaps.size(); ++s) {
      const auto& sw = swaps[s];
      if (sw.token_in == sw.token_out) {
        throw SchemaError(swap_src.file, swap_src.line(s), "token_out", "token_in equals token_out");
      }
      if (!(sw.amount_usd >= 0.0)) throw SchemaError(swap_src.file, swap_src.line(s), "amount_usd", "must be non-negative");
      const bool found = std::binary_search(by_hash.begin(), by_hash.end(), sw.tx,
                                            [&](const auto& a, const auto& b) {
                                              if constexpr (std::is_same_v<std::decay_t<decltype(a)>, std::size_t>)
                                                return txs[a].hash < b;
                                              else return a < txs[b].hash;
                                            });
      if (!found) throw Error("ingest", Errc::DanglingReference, "swap references unknown transaction " + sw.tx.hex());
    }
  }

  std::vector<TxRecord> ordered;
  ordered.reserve(txs.size());
  for (auto i : tx_order) ordered.push_back(std::move(txs[i]));
  return DatasetAccess::build(std::move(blocks), std::move(ordered), std::move(swaps), std::move(registry));
}

}  // namespace

// ---------------------------------------------------------------------------
// Loading

Dataset make_dataset(std::vector<BlockRecord> blocks, std::vector<TxRecord> txs, std::vector<SwapRecord> swaps,
                     BuilderRegistry registry) {
  return assemble(std::move(blocks), Source{"<blocks>", {}}, std::move(txs), Source{"<txs>", {}},
                  std::move(swaps), Source{"<swaps>", {}}, std::move(registry), false);
}

Dataset load_dataset(const DatasetPaths& paths, const fs::path& builder_registry) {
  auto registry = BuilderRegistry::load(builder_registry);

  std::vector<BlockRecord> blocks;
  Source block_src{paths.blocks.filename().string(), {}};
  for_each_jsonl(paths.blocks, [&](const json& obj, std::size_t line) {
    FieldReader r(obj, block_src.file, line);
    BlockRecord b;
    b.number = r.u64("number");
    b.timestamp = r.i64("timestamp");
    b.fee_recipient = r.hex<Address>("fee_recipient");
    b.bid = r.wei("bid");
    blocks.push_back(b);
    block_src.lines.push_back(line);
  });

  std::vector<TxRecord> txs;
  Source tx_src{paths.txs.filename().string(), {}};
  for_each_jsonl(paths.txs, [&](const json& obj, std::size_t line) {
    FieldReader r(obj, tx_src.file, line);
    TxRecord t;
    t.hash = r.hex<TxHash>("hash");
    t.block_number = r.u64("block");
    const auto index = r.u64("index");
    if (index > 0xFFFFFFFFull) r.fail("index", "out of range");
    t.index_in_block = static_cast<std::uint32_t>(index);
    t.sender = r.hex<Address>("from");
    t.destination = r.hex<Address>("to");
    t.gas_used = r.u64("gas_used");
    t.priority_tip = r.wei("priority_tip");
    t.direct_bribe = r.has("direct_bribe") ? r.wei("direct_bribe") : Wei{};
    const auto swaps_n = r.u64("swap_count");
    if (swaps_n > 0xFFFFFFFFull) r.fail("swap_count", "out of range");
    t.swap_event_count = static_cast<std::uint32_t>(swaps_n);
    if (r.has("mev_label") && !parse_mev_label(r.str("mev_label"), t.mev_label)) r.fail("mev_label", "unknown label");
    txs.push_back(t);
    tx_src.lines.push_back(line);
  });

  std::vector<SwapRecord> swaps;
  Source swap_src{paths.swaps.filename().string(), {}};
  for_each_jsonl(paths.swaps, [&](const json& obj, std::size_t line) {
    FieldReader r(obj, swap_src.file, line);
    SwapRecord s;
    s.tx = r.hex<TxHash>("tx");
    s.pool = r.hex<Address>("pool");
    s.token_in = r.hex<Address>("token_in");
    s.token_out = r.hex<Address>("token_out");
    s.amount_usd = r.number("amount_usd");
    swaps.push_back(s);
    swap_src.lines.push_back(line);
  });

  return assemble(std::move(blocks), std::move(block_src), std::move(txs), std::move(tx_src), std::move(swaps),
                  std::move(swap_src), std::move(registry), true);
}

std::set<TxHash> load_mempool(const fs::path& path) {
  auto in = open_or_throw(path);
  std::set<TxHash> hashes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    TxHash h;
    if (!TxHash::try_from_hex(t, h)) throw SchemaError(path.filename().string(), lineno, "hash", "expected 64 hex digits");
    hashes.insert(h);
  }
  return hashes;
}

Dataset mark_visibility(const Dataset& dataset, const std::set<TxHash>& mempool) {
  Dataset out = dataset;
  DatasetAccess::set_visibility(out, mempool);
  return out;
}

Dataset mark_visibility(const Dataset& dataset, const fs::path& mempool_hashes) {
  return mark_visibility(dataset, load_mempool(mempool_hashes));
}

Dataset load_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("ingest", Errc::MissingFile, "no such directory " + dir.string());
  auto ds = load_dataset(DatasetPaths::in_directory(dir), dir / "builders.csv");
  if (fs::exists(dir / "mempool.txt")) ds = mark_visibility(ds, dir / "mempool.txt");
  return ds;
}

}  // namespace flowscope
