#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>

#include <unistd.h>

namespace flowscope::testing {

namespace fs = std::filesystem;

namespace {

struct Cached {
  ~Cached() {
    std::error_code ec;
    if (!dir.empty()) fs::remove_all(dir, ec);
  }

  fs::path dir;
  std::unique_ptr<Dataset> dataset;
  std::unique_ptr<Manifest> manifest;
  std::unique_ptr<LabelSet> labels;
};

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

Cached& cached(const std::string& scenario) {
  static std::map<std::string, Cached> cache;
  std::lock_guard lock(cache_mutex());
  auto& c = cache[scenario];
  if (c.dir.empty()) {
    // Per-process directory: ctest may run test processes concurrently.
    c.dir = work_dir() / "fixtures" / (scenario + "." + std::to_string(::getpid()));
    fs::remove_all(c.dir);
    generate(load_scenario(data_dir() / "scenarios" / (scenario + ".toml")), c.dir);
    c.dataset = std::make_unique<Dataset>(load_directory(c.dir));
    c.manifest = std::make_unique<Manifest>(load_manifest(c.dir / "manifest.json"));
    c.labels = std::make_unique<LabelSet>(LabelSet::load(c.dir / "labels.csv"));
  }
  return c;
}

}  // namespace

fs::path data_dir() { return FLOWSCOPE_TEST_DATA_DIR; }
fs::path work_dir() { return FLOWSCOPE_TEST_WORK_DIR; }

const fs::path& fixture_dir(const std::string& scenario) { return cached(scenario).dir; }
const Dataset& fixture_dataset(const std::string& scenario) { return *cached(scenario).dataset; }
const Manifest& fixture_manifest(const std::string& scenario) { return *cached(scenario).manifest; }
const LabelSet& fixture_labels(const std::string& scenario) { return *cached(scenario).labels; }

fs::path scratch(std::string_view name) {
  auto dir = work_dir() / "scratch" / (std::string(name) + "." + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Address addr(std::uint64_t n) {
  Address a;
  for (int i = 0; i < 8; ++i) a.bytes()[19 - i] = static_cast<std::uint8_t>(n >> (8 * i));
  return a;
}

TxHash txhash(std::uint64_t n) {
  TxHash h;
  for (int i = 0; i < 8; ++i) h.bytes()[31 - i] = static_cast<std::uint8_t>(n >> (8 * i));
  return h;
}

DatasetBuilder::DatasetBuilder(unsigned builders) : builders_(builders) {}

DatasetBuilder& DatasetBuilder::block(std::uint64_t number, std::int64_t timestamp, unsigned builder, Wei bid) {
  BlockRecord b;
  b.number = number;
  b.timestamp = timestamp;
  b.fee_recipient = builder == 0 ? addr(900'000 + number) : addr(1000 + builder);
  b.bid = bid;
  blocks_.push_back(b);
  return *this;
}

TxRecord& DatasetBuilder::tx(std::uint64_t block, const Address& to, Wei tip, Wei direct, std::uint32_t swaps) {
  TxRecord t;
  t.hash = txhash(next_hash_++);
  t.block_number = block;
  t.index_in_block = static_cast<std::uint32_t>(
      std::count_if(txs_.begin(), txs_.end(), [&](const TxRecord& x) { return x.block_number == block; }));
  t.sender = addr(5000);
  t.destination = to;
  t.gas_used = 100'000;
  t.priority_tip = tip;
  t.direct_bribe = direct;
  t.swap_event_count = swaps;
  txs_.push_back(t);
  return txs_.back();
}

DatasetBuilder& DatasetBuilder::swap(const TxHash& tx, const Address& pool, double usd) {
  swaps_.push_back({tx, pool, addr(7001), addr(7002), usd});
  return *this;
}

Dataset DatasetBuilder::build() const {
  std::vector<BuilderRegistry::Entry> entries;
  for (unsigned b = 1; b <= builders_; ++b) entries.push_back({addr(1000 + b), "b" + std::to_string(b), "Builder " + std::to_string(b)});
  return make_dataset(blocks_, txs_, swaps_, BuilderRegistry(entries));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace flowscope::testing
