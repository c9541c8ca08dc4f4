#include "flowscope/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <set>
#include <toml.hpp>

#include "flowscope/concentration.hpp"
#include "flowscope/digest.hpp"
#include "flowscope/error.hpp"
#include "flowscope/flows.hpp"
#include "flowscope/rng.hpp"

namespace flowscope {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error("synth", Errc::InvalidConfig, msg); }

constexpr Wei::rep kWeiPerGwei = 1'000'000'000;
constexpr std::int64_t kScale = 1'000'000;  // fixed-point for tip and bid ratios

Address derive_address(const std::string& label) {
  return Address::from_hex("0x" + sha256_hex(label).substr(0, 40));
}

TxHash derive_hash(const std::string& label) { return TxHash::from_hex("0x" + sha256_hex(label)); }

// Largest-remainder apportionment of `total` by real weights; ties go to the
// lower index.
std::vector<std::uint64_t> apportion(std::span<const double> weights, std::uint64_t total) {
  const long double sum = std::accumulate(weights.begin(), weights.end(), 0.0L);
  std::vector<std::uint64_t> out(weights.size(), 0);
  std::vector<std::pair<long double, std::size_t>> rem;
  std::uint64_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const long double exact = weights[i] / sum * static_cast<long double>(total);
    out[i] = static_cast<std::uint64_t>(std::floor(exact));
    used += out[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++out[rem[k % rem.size()].second];
  return out;
}

// Exact integer version: shares proportional to integer weights.
std::vector<Wei::rep> apportion_exact(std::span<const Wei::rep> weights, Wei::rep total) {
  const Wei::rep sum = std::accumulate(weights.begin(), weights.end(), Wei::rep{0});
  std::vector<Wei::rep> out(weights.size(), 0);
  std::vector<std::pair<Wei::rep, std::size_t>> rem;
  Wei::rep used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out[i] = total * weights[i] / sum;
    used += out[i];
    rem.emplace_back(total * weights[i] % sum, i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < total; ++k, ++used) ++out[rem[k].second];
  return out;
}

std::optional<Category> category_for(Mechanism m) { return category_of(m); }

// ---- TOML parsing ---------------------------------------------------------

class TableReader {
 public:
  TableReader(const toml::table& t, std::string where) : t_(t), where_(std::move(where)) {}

  ~TableReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, _] : t_) {
      if (!seen_.contains(std::string(k.str()))) invalid(where_ + ": unknown key '" + std::string(k.str()) + "'");
    }
  }

  const toml::node* get(const char* key) {
    seen_.insert(key);
    return t_.get(key);
  }

  template <typename T>
  T number(const char* key, T fallback) {
    const auto* n = get(key);
    if (n == nullptr) return fallback;
    if constexpr (std::is_floating_point_v<T>) {
      if (auto v = n->value<double>()) return static_cast<T>(*v);
    } else {
      if (auto v = n->value<std::int64_t>()) {
        if (*v < 0) invalid(where_ + "." + key + " must be non-negative");
        return static_cast<T>(*v);
      }
    }
    invalid(where_ + "." + key + " must be a number");
  }

  template <typename T>
  Range<T> range(const char* key, Range<T> fallback) {
    const auto* n = get(key);
    if (n == nullptr) return fallback;
    auto scalar = [&](const toml::node& e) -> T {
      if constexpr (std::is_floating_point_v<T>) {
        if (auto v = e.value<double>()) return static_cast<T>(*v);
      } else {
        if (auto v = e.value<std::int64_t>(); v && *v >= 0) return static_cast<T>(*v);
      }
      invalid(where_ + "." + key + " must hold non-negative numbers");
    };
    if (const auto* arr = n->as_array()) {
      if (arr->size() != 2) invalid(where_ + "." + key + " must be [lo, hi]");
      return {scalar(*arr->get(0)), scalar(*arr->get(1))};
    }
    const T v = scalar(*n);
    return {v, v};
  }

  bool boolean(const char* key, bool fallback) {
    const auto* n = get(key);
    if (n == nullptr) return fallback;
    if (auto v = n->value<bool>()) return *v;
    invalid(where_ + "." + key + " must be a boolean");
  }

  std::optional<std::string> string(const char* key) {
    const auto* n = get(key);
    if (n == nullptr) return std::nullopt;
    if (auto v = n->value<std::string>()) return *v;
    invalid(where_ + "." + key + " must be a string");
  }

  const std::string& where() const { return where_; }

 private:
  const toml::table& t_;
  std::string where_;
  std::set<std::string> seen_;
};

std::int64_t date_value(const toml::node& n, const std::string& where) {
  std::string text;
  if (auto s = n.value<std::string>()) {
    text = *s;
  } else if (auto d = n.value<toml::date>()) {
    text = fmt::format("{:04}-{:02}-{:02}", d->year, d->month, d->day);
  } else {
    invalid(where + " must be a date");
  }
  try {
    return parse_date(text);
  } catch (const Error&) {
    invalid(where + " must be a YYYY-MM-DD date, got '" + text + "'");
  }
}

const toml::array* tables(const toml::table& doc, const char* key) {
  const auto* n = doc.get(key);
  if (n == nullptr) return nullptr;
  const auto* arr = n->as_array();
  if (arr == nullptr || !arr->is_array_of_tables()) invalid(std::string("[[") + key + "]] must be an array of tables");
  return arr;
}

BuilderSpec parse_builder(const toml::table& t, std::size_t i) {
  TableReader r(t, "builder[" + std::to_string(i) + "]");
  BuilderSpec b;
  b.id = r.string("id").value_or("");
  b.name = r.string("name").value_or(b.id);
  b.addresses = r.number<unsigned>("addresses", 1);
  b.registered = r.boolean("registered", true);
  const auto* share = r.get("share");
  const auto* shares = r.get("shares");
  if ((share == nullptr) == (shares == nullptr)) invalid(r.where() + ": set exactly one of share / shares");
  if (share != nullptr) {
    auto v = share->value<double>();
    if (!v) invalid(r.where() + ".share must be a number");
    b.shares = {*v};
  } else {
    const auto* arr = shares->as_array();
    if (arr == nullptr) invalid(r.where() + ".shares must be an array");
    for (const auto& e : *arr) {
      auto v = e.value<double>();
      if (!v) invalid(r.where() + ".shares must hold numbers");
      b.shares.push_back(*v);
    }
  }
  return b;
}

FlowGroupSpec parse_flow(const toml::table& t, std::size_t i, unsigned weeks) {
  FlowGroupSpec f;
  f.name = t["name"].value_or(std::string{});
  TableReader r(t, f.name.empty() ? "flow[" + std::to_string(i) + "]" : "flow '" + f.name + "'");
  r.get("name");
  f.count = r.number<unsigned>("count", f.count);
  if (auto m = r.string("mechanism"); m && !parse_mechanism(*m, f.mechanism)) {
    invalid(r.where() + ": unknown mechanism '" + *m + "'");
  }
  f.eof = r.boolean("eof", false);
  f.labeled = r.boolean("labeled", true);
  if (auto s = r.string("label_source")) {
    if (*s == "manual") f.label_source = LabelSource::manual;
    else if (*s == "heuristic") f.label_source = LabelSource::heuristic;
    else invalid(r.where() + ": label_source must be manual or heuristic");
  }
  f.ground_truth = r.boolean("ground_truth", false);
  if (auto s = r.string("routing")) {
    if (*s == "random") f.routing = Routing::random;
    else if (*s == "exact") f.routing = Routing::exact;
    else invalid(r.where() + ": routing must be random or exact");
  }
  f.exclusive_to = r.string("exclusive_to");
  f.exclusivity = r.number<double>("exclusivity", f.exclusive_to ? 1.0 : 0.0);
  f.active_weeks = r.range<unsigned>("active_weeks", {0, weeks == 0 ? 0 : weeks - 1});
  f.txs_per_week = r.range<unsigned>("txs_per_week", f.txs_per_week);
  f.bribe_eth = r.range<double>("bribe_eth", f.bribe_eth);
  f.tip_fraction = r.number<double>("tip_fraction", f.tip_fraction);
  f.gas = r.range<std::uint64_t>("gas", f.gas);
  f.swap_mean = r.range<double>("swap_mean", f.swap_mean);
  f.senders = r.range<unsigned>("senders", f.senders);
  f.private_rate = r.number<double>("private_rate", f.private_rate);
  if (auto s = r.string("mev_label"); s && !parse_mev_label(*s, f.mev_label)) {
    invalid(r.where() + ": unknown mev_label '" + *s + "'");
  }
  f.mev_label_rate = r.number<double>("mev_label_rate", f.mev_label_rate);
  f.position = r.range<unsigned>("position", f.position);
  f.pools = r.number<unsigned>("pools", f.pools);
  return f;
}

PhaseSpec parse_phase(const toml::table& t, std::size_t i) {
  TableReader r(t, "phase[" + std::to_string(i) + "]");
  PhaseSpec p;
  p.name = r.string("name").value_or("phase" + std::to_string(i + 1));
  const auto weeks = r.range<unsigned>("weeks", {0, 0});
  if (r.get("weeks") == nullptr) invalid(r.where() + ": weeks = [first, last] is required");
  p.first_week = weeks.lo;
  p.last_week = weeks.hi;
  p.budget_eth = r.number<double>("budget_eth", 0.0);
  const auto* mix = r.get("mix");
  if (mix == nullptr || !mix->is_table()) invalid(r.where() + ": mix table is required");
  for (const auto& [k, v] : *mix->as_table()) {
    Category c;
    if (!parse_category(k.str(), c)) invalid(r.where() + ": unknown category '" + std::string(k.str()) + "'");
    auto x = v.value<double>();
    if (!x) invalid(r.where() + ".mix values must be numbers");
    p.mix[static_cast<std::size_t>(c)] = *x;
  }
  return p;
}

// ---- generation -----------------------------------------------------------

struct PendingTx {
  TxRecord tx;
  double position = 0.0;
  std::vector<SwapRecord> swaps;
  std::size_t block = 0;  // position in the block list
  int flow = -1;          // index into flow instances; -1 for filler
  Wei::rep bribe = 0;     // planned d_t before the tip split
  double tip_fraction = 1.0;
};

struct FlowInstance {
  const FlowGroupSpec* spec;
  unsigned index;
  Address contract;
};

struct BlockPlan {
  BlockRecord record;
  std::size_t builder = 0;  // index into config.builders
  unsigned week = 0;
};

std::string builder_key(const BuilderSpec& b) { return b.registered ? b.id : std::string(kProposerName); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("synth", Errc::MissingFile, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("synth", Errc::MissingFile, "failed writing " + path.string());
}

std::string wei_str(Wei w) { return w.str(); }

std::string usd_str(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace

// ---- config ---------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (weeks == 0) invalid("weeks must be positive");
  if (blocks_per_week == 0 || blocks_per_week > kSecondsPerWeek) invalid("blocks_per_week must be in [1, 604800]");
  if (start % kSecondsPerDay != 0) invalid("start must be midnight UTC");
  if (filler_txs.lo > filler_txs.hi) invalid("filler_txs: lo > hi");
  if (filler_contracts == 0) invalid("filler_contracts must be positive");
  if (refund_rate < 0.0 || refund_rate > 1.0) invalid("refund_rate must lie in [0, 1]");
  if (bid_ratio.lo < 0.0 || bid_ratio.lo > bid_ratio.hi) invalid("bid_ratio must satisfy 0 <= lo <= hi");
  if (builders.empty()) invalid("at least one [[builder]] is required");

  std::set<std::string> ids;
  bool has_proposer = false;
  for (const auto& b : builders) {
    if (b.registered) {
      if (b.id.empty()) invalid("builder id must be non-empty");
      if (b.id == kProposerName) invalid("builder id 'proposer' is reserved; use registered = false");
      if (b.addresses == 0) invalid("builder '" + b.id + "' needs at least one address");
      if (!ids.insert(b.id).second) invalid("duplicate builder id '" + b.id + "'");
    } else {
      if (has_proposer) invalid("only one unregistered builder may be declared");
      has_proposer = true;
    }
    if (b.shares.size() != 1 && b.shares.size() != weeks) {
      invalid("builder '" + b.id + "' must give one share or one per week");
    }
    for (double s : b.shares) {
      if (!(s >= 0.0 && s <= 1.0)) invalid("builder '" + b.id + "' share outside [0, 1]");
    }
  }
  auto share = [&](const BuilderSpec& b, unsigned w) { return b.shares.size() == 1 ? b.shares[0] : b.shares[w]; };
  for (unsigned w = 0; w < weeks; ++w) {
    long double sum = 0.0L;
    for (const auto& b : builders) sum += share(b, w);
    if (std::abs(sum - 1.0L) > 1e-9L) invalid(fmt::format("builder shares in week {} sum to {}, not 1", w, static_cast<double>(sum)));
  }

  std::set<std::string> names;
  auto rate = [](double x) { return x >= 0.0 && x <= 1.0; };
  for (const auto& f : flows) {
    const std::string where = "flow '" + f.name + "'";
    if (f.name.empty()) invalid("flow name must be non-empty");
    if (!names.insert(f.name).second) invalid("duplicate flow name '" + f.name + "'");
    if (f.count == 0) invalid(where + ": count must be positive");
    if (f.mechanism == Mechanism::unlabeled) invalid(where + ": mechanism is required");
    if (f.active_weeks.lo > f.active_weeks.hi || f.active_weeks.hi >= weeks) invalid(where + ": active_weeks out of range");
    if (f.txs_per_week.lo > f.txs_per_week.hi) invalid(where + ": txs_per_week lo > hi");
    if (!(f.bribe_eth.lo > 0.0) || f.bribe_eth.lo > f.bribe_eth.hi) invalid(where + ": bribe_eth must satisfy 0 < lo <= hi");
    if (!rate(f.tip_fraction) || !rate(f.private_rate) || !rate(f.mev_label_rate) || !rate(f.exclusivity)) {
      invalid(where + ": rates must lie in [0, 1]");
    }
    if (f.gas.lo == 0 || f.gas.lo > f.gas.hi) invalid(where + ": gas must satisfy 0 < lo <= hi");
    if (!(f.swap_mean.lo >= 1.0) || f.swap_mean.lo > f.swap_mean.hi) invalid(where + ": swap_mean must satisfy 1 <= lo <= hi");
    if (f.senders.lo == 0 || f.senders.lo > f.senders.hi) invalid(where + ": senders must satisfy 1 <= lo <= hi");
    if (f.position.lo > f.position.hi) invalid(where + ": position lo > hi");
    if (f.pools == 0) invalid(where + ": pools must be positive");
    if (f.mev_label_rate > 0.0 && f.mev_label == MevLabel::none) invalid(where + ": mev_label_rate needs mev_label");
    if (f.exclusive_to) {
      if (f.routing == Routing::exact) invalid(where + ": exact routing cannot be exclusive");
      auto it = std::find_if(builders.begin(), builders.end(), [&](const BuilderSpec& b) { return builder_key(b) == *f.exclusive_to; });
      if (it == builders.end()) invalid(where + ": unknown builder '" + *f.exclusive_to + "'");
      for (unsigned w = f.active_weeks.lo; w <= f.active_weeks.hi; ++w) {
        if (share(*it, w) <= 0.0) invalid(where + fmt::format(": target builder has no share in week {}", w));
      }
    }
  }

  unsigned next_week = 0;
  for (const auto& p : phases) {
    const std::string where = "phase '" + p.name + "'";
    if (p.first_week < next_week || p.first_week > p.last_week || p.last_week >= weeks) {
      invalid(where + ": weeks must be ascending, disjoint and within the scenario");
    }
    next_week = p.last_week + 1;
    if (!(p.budget_eth > 0.0)) invalid(where + ": budget_eth must be positive");
    long double sum = 0.0L;
    for (double m : p.mix) {
      if (!rate(m)) invalid(where + ": mix values must lie in [0, 1]");
      sum += m;
    }
    if (std::abs(sum - 1.0L) > 1e-9L) invalid(where + ": mix must sum to 1");
  }
}

ScenarioConfig parse_scenario(std::string_view text, std::string_view source) {
  toml::table doc;
  try {
    doc = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    invalid(std::string(source) + ": " + std::string(e.description()));
  }
  ScenarioConfig c;
  {
    TableReader r(doc, std::string(source));
    c.seed = r.number<std::uint64_t>("seed", c.seed);
    const auto* start = r.get("start");
    if (start == nullptr) invalid("start date is required");
    c.start = date_value(*start, "start");
    c.weeks = r.number<unsigned>("weeks", c.weeks);
    c.blocks_per_week = r.number<unsigned>("blocks_per_week", c.blocks_per_week);
    c.first_block = r.number<std::uint64_t>("first_block", c.first_block);
    c.filler_txs = r.range<unsigned>("filler_txs", c.filler_txs);
    c.filler_contracts = r.number<unsigned>("filler_contracts", c.filler_contracts);
    c.refund_rate = r.number<double>("refund_rate", c.refund_rate);
    c.bid_ratio = r.range<double>("bid_ratio", c.bid_ratio);
    r.get("builder");
    r.get("flow");
    r.get("phase");
  }
  if (const auto* arr = tables(doc, "builder")) {
    for (std::size_t i = 0; i < arr->size(); ++i) c.builders.push_back(parse_builder(*arr->get(i)->as_table(), i));
  }
  if (const auto* arr = tables(doc, "flow")) {
    for (std::size_t i = 0; i < arr->size(); ++i) c.flows.push_back(parse_flow(*arr->get(i)->as_table(), i, c.weeks));
  }
  if (const auto* arr = tables(doc, "phase")) {
    for (std::size_t i = 0; i < arr->size(); ++i) c.phases.push_back(parse_phase(*arr->get(i)->as_table(), i));
  }
  c.validate();
  return c;
}

ScenarioConfig load_scenario(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("synth", Errc::MissingFile, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_scenario(text, path.string());
}

// ---- manifest -------------------------------------------------------------

std::vector<Address> Manifest::eof_contracts() const {
  std::vector<Address> out;
  for (const auto& f : flows) {
    if (f.eof) out.push_back(f.contract);
  }
  return out;
}

const ManifestFlow* Manifest::find(const Address& contract) const {
  auto it = std::lower_bound(flows.begin(), flows.end(), contract,
                             [](const ManifestFlow& f, const Address& a) { return f.contract < a; });
  return it != flows.end() && it->contract == contract ? &*it : nullptr;
}

std::string manifest_to_json(const Manifest& m) {
  ojson j;
  j["format"] = "flowscope.manifest";
  j["version"] = 1;
  j["seed"] = m.seed;
  j["counts"] = {{"blocks", m.blocks}, {"txs", m.txs}, {"swap_txs", m.swap_txs}, {"swaps", m.swaps},
                 {"private_txs", m.private_txs}, {"flows", m.flows.size()}};
  j["revenue"] = {{"total_wei", wei_str(m.total_revenue)},
                  {"trading_wei", wei_str(m.trading_revenue)},
                  {"bids_wei", wei_str(m.total_bid)}};
  auto& weeks = j["weeks"] = ojson::array();
  for (const auto& w : m.weeks) {
    ojson counts = ojson::object();
    ojson shares = ojson::object();
    for (const auto& [b, q] : w.block_counts) {
      counts[b] = q;
      shares[b] = static_cast<double>(q) / static_cast<double>(w.blocks);
    }
    weeks.push_back({{"epoch", w.epoch}, {"start", w.start}, {"blocks", w.blocks}, {"block_counts", counts}, {"shares", shares}});
  }
  auto& flows = j["flows"] = ojson::array();
  for (const auto& f : m.flows) {
    ojson cells = ojson::array();
    for (const auto& c : f.cells) cells.push_back({{"epoch", c.epoch}, {"builder", c.builder}, {"amount_wei", wei_str(c.amount)}});
    ojson e = {{"contract", f.contract.hex()}, {"group", f.group}, {"mechanism", std::string(to_string(f.mechanism))},
               {"eof", f.eof}, {"labeled", f.labeled},
               {"label_source", f.label_source == LabelSource::manual ? "manual" : "heuristic"}};
    e["exclusive_to"] = f.exclusive_to ? ojson(*f.exclusive_to) : ojson(nullptr);
    e["tx_count"] = f.tx_count;
    e["total_bribe_wei"] = wei_str(f.total_bribe);
    e["cells"] = std::move(cells);
    flows.push_back(std::move(e));
  }
  auto& phases = j["phases"] = ojson::array();
  for (const auto& p : m.phases) {
    ojson bribe = ojson::object();
    ojson fraction = ojson::object();
    for (std::size_t k = 0; k < kCategoryCount; ++k) {
      const std::string name(to_string(static_cast<Category>(k)));
      bribe[name] = wei_str(p.bribe[k]);
      fraction[name] = p.fraction[k];
    }
    phases.push_back({{"name", p.name}, {"start", p.start}, {"end", p.end}, {"total_wei", wei_str(p.total)},
                      {"bribe_wei", bribe}, {"fraction", fraction}});
  }
  ojson files = ojson::object();
  for (const auto& [name, digest] : m.files) files[name] = digest;
  j["files"] = std::move(files);
  return j.dump(2) + "\n";
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("synth", Errc::MissingFile, "cannot open " + path.string());
  Manifest m;
  try {
    const auto j = ojson::parse(in);
    if (j.at("format") != "flowscope.manifest" || j.at("version") != 1) {
      throw Error("synth", Errc::SchemaViolation, path.string() + ": not a version 1 manifest");
    }
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& c = j.at("counts");
    m.blocks = c.at("blocks");
    m.txs = c.at("txs");
    m.swap_txs = c.at("swap_txs");
    m.swaps = c.at("swaps");
    m.private_txs = c.at("private_txs");
    const auto& r = j.at("revenue");
    m.total_revenue = Wei::parse(r.at("total_wei").get<std::string>());
    m.trading_revenue = Wei::parse(r.at("trading_wei").get<std::string>());
    m.total_bid = Wei::parse(r.at("bids_wei").get<std::string>());
    for (const auto& w : j.at("weeks")) {
      ManifestWeek week;
      week.epoch = w.at("epoch");
      week.start = w.at("start");
      week.blocks = w.at("blocks");
      for (const auto& [b, q] : w.at("block_counts").items()) week.block_counts.emplace_back(b, q.get<std::uint64_t>());
      m.weeks.push_back(std::move(week));
    }
    for (const auto& f : j.at("flows")) {
      ManifestFlow flow;
      flow.contract = Address::from_hex(f.at("contract").get<std::string>());
      flow.group = f.at("group");
      parse_mechanism(f.at("mechanism").get<std::string>(), flow.mechanism);
      flow.eof = f.at("eof");
      flow.labeled = f.at("labeled");
      flow.label_source = f.at("label_source") == "heuristic" ? LabelSource::heuristic : LabelSource::manual;
      if (!f.at("exclusive_to").is_null()) flow.exclusive_to = f.at("exclusive_to").get<std::string>();
      flow.tx_count = f.at("tx_count");
      flow.total_bribe = Wei::parse(f.at("total_bribe_wei").get<std::string>());
      for (const auto& cell : f.at("cells")) {
        flow.cells.push_back({cell.at("epoch"), cell.at("builder"), Wei::parse(cell.at("amount_wei").get<std::string>())});
      }
      m.flows.push_back(std::move(flow));
    }
    for (const auto& p : j.at("phases")) {
      ManifestPhase phase;
      phase.name = p.at("name");
      phase.start = p.at("start");
      phase.end = p.at("end");
      phase.total = Wei::parse(p.at("total_wei").get<std::string>());
      for (std::size_t k = 0; k < kCategoryCount; ++k) {
        const std::string name(to_string(static_cast<Category>(k)));
        phase.bribe[k] = Wei::parse(p.at("bribe_wei").at(name).get<std::string>());
        phase.fraction[k] = p.at("fraction").at(name);
      }
      m.phases.push_back(std::move(phase));
    }
    for (const auto& [name, digest] : j.at("files").items()) m.files[name] = digest.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("synth", Errc::SchemaViolation, path.string() + ": " + e.what());
  }
  return m;
}

// ---- generation -----------------------------------------------------------

Manifest generate(const ScenarioConfig& config, const fs::path& out_dir) {
  config.validate();
  const auto& B = config.builders;
  const std::int64_t interval = kSecondsPerWeek / config.blocks_per_week;

  // Blocks: exact per-week counts by largest remainder, order shuffled.
  std::vector<BlockPlan> blocks;
  blocks.reserve(std::size_t{config.weeks} * config.blocks_per_week);
  // week -> builder -> block positions
  std::vector<std::vector<std::vector<std::size_t>>> by_builder(config.weeks, std::vector<std::vector<std::size_t>>(B.size()));
  for (unsigned w = 0; w < config.weeks; ++w) {
    std::vector<double> shares;
    for (const auto& b : B) shares.push_back(b.shares.size() == 1 ? b.shares[0] : b.shares[w]);
    const auto counts = apportion(shares, config.blocks_per_week);
    std::vector<std::size_t> order;
    for (std::size_t b = 0; b < B.size(); ++b) order.insert(order.end(), counts[b], b);
    Rng rng(config.seed, Rng::tag("blocks"), w);
    rng.shuffle(std::span<std::size_t>(order));
    for (unsigned k = 0; k < config.blocks_per_week; ++k) {
      BlockPlan plan;
      plan.week = w;
      plan.builder = order[k];
      plan.record.number = config.first_block + std::uint64_t{w} * config.blocks_per_week + k;
      plan.record.timestamp = config.start + std::int64_t{w} * kSecondsPerWeek + std::int64_t{k} * interval;
      const auto& spec = B[plan.builder];
      plan.record.fee_recipient =
          spec.registered ? derive_address(fmt::format("builder:{}:{}", spec.id, rng.below(spec.addresses)))
                          : derive_address(fmt::format("proposer:{}", plan.record.number));
      by_builder[w][plan.builder].push_back(blocks.size());
      blocks.push_back(plan);
    }
  }
  auto week_block = [&](unsigned w, std::uint64_t k) { return std::size_t{w} * config.blocks_per_week + k; };

  std::vector<Address> tokens;
  for (int k = 0; k < 8; ++k) tokens.push_back(derive_address(fmt::format("token:{}", k)));

  // Planted flows.
  std::vector<FlowInstance> instances;
  std::vector<PendingTx> pending;
  for (const auto& spec : config.flows) {
    for (unsigned i = 0; i < spec.count; ++i) {
      const int flow_idx = static_cast<int>(instances.size());
      const std::string key = fmt::format("{}:{}", spec.name, i);
      instances.push_back({&spec, i, derive_address("contract:" + key)});
      Rng rng(config.seed, Rng::tag("flow:" + spec.name), i);

      const double swap_mean = rng.uniform(spec.swap_mean.lo, spec.swap_mean.hi);
      std::vector<Address> senders(static_cast<std::size_t>(rng.uniform_int(spec.senders.lo, spec.senders.hi)));
      for (std::size_t s = 0; s < senders.size(); ++s) senders[s] = derive_address(fmt::format("sender:{}:{}", key, s));
      struct Pool {
        Address address;
        Address a;
        Address b;
      };
      std::vector<Pool> pools(spec.pools);
      for (unsigned p = 0; p < spec.pools; ++p) {
        const auto t0 = rng.below(tokens.size());
        const auto t1 = (t0 + 1 + rng.below(tokens.size() - 1)) % tokens.size();
        pools[p] = {derive_address(fmt::format("pool:{}:{}", key, p)), tokens[t0], tokens[t1]};
      }

      const std::optional<std::size_t> target =
          spec.exclusive_to ? std::optional<std::size_t>(static_cast<std::size_t>(
                                  std::find_if(B.begin(), B.end(), [&](const BuilderSpec& b) { return builder_key(b) == *spec.exclusive_to; }) -
                                  B.begin()))
                            : std::nullopt;

      std::uint64_t seq = 0;
      auto emit = [&](std::size_t block, Wei::rep bribe) {
        PendingTx p;
        p.block = block;
        p.flow = flow_idx;
        p.bribe = bribe;
        p.tip_fraction = spec.tip_fraction;
        auto& tx = p.tx;
        tx.hash = derive_hash(fmt::format("tx:{}:{}", key, seq++));
        tx.block_number = blocks[block].record.number;
        tx.sender = senders[rng.below(senders.size())];
        tx.destination = instances[flow_idx].contract;
        tx.gas_used = static_cast<std::uint64_t>(rng.uniform_int(static_cast<std::int64_t>(spec.gas.lo), static_cast<std::int64_t>(spec.gas.hi)));
        const double whole = std::floor(swap_mean);
        tx.swap_event_count = static_cast<std::uint32_t>(whole) + (rng.bernoulli(swap_mean - whole) ? 1 : 0);
        tx.is_private = rng.bernoulli(spec.private_rate);
        if (rng.bernoulli(spec.mev_label_rate)) tx.mev_label = spec.mev_label;
        p.position = rng.uniform(spec.position.lo, spec.position.hi);
        for (std::uint32_t s = 0; s < tx.swap_event_count; ++s) {
          const auto& pool = pools[rng.below(pools.size())];
          const bool forward = rng.bernoulli(0.5);
          const double usd = std::round(rng.log_uniform(100.0, 100'000.0) * 100.0) / 100.0;
          p.swaps.push_back({tx.hash, pool.address, forward ? pool.a : pool.b, forward ? pool.b : pool.a, usd});
        }
        pending.push_back(std::move(p));
      };
      auto draw_bribe = [&] {
        const auto gwei = std::llround(rng.log_uniform(spec.bribe_eth.lo, spec.bribe_eth.hi) * 1e9);
        return static_cast<Wei::rep>(std::max<long long>(gwei, 1)) * kWeiPerGwei;
      };

      for (unsigned w = spec.active_weeks.lo; w <= spec.active_weeks.hi; ++w) {
        if (spec.routing == Routing::exact) {
          // Identical bribes in every block of the week: each builder's take
          // is exactly proportional to its block count.
          const auto bribe = draw_bribe();
          for (unsigned k = 0; k < config.blocks_per_week; ++k) emit(week_block(w, k), bribe);
          continue;
        }
        const auto n = rng.uniform_int(spec.txs_per_week.lo, spec.txs_per_week.hi);
        for (std::int64_t t = 0; t < n; ++t) {
          std::size_t block;
          if (target && rng.bernoulli(spec.exclusivity)) {
            const auto& mine = by_builder[w][*target];
            block = mine[rng.below(mine.size())];
          } else {
            block = week_block(w, rng.below(config.blocks_per_week));
          }
          emit(block, draw_bribe());
        }
      }
    }
  }

  // Phase budgets: rescale the planted bribes of each (phase, category) so
  // they sum exactly to budget * mix.
  for (const auto& phase : config.phases) {
    const auto budget_gwei = static_cast<std::uint64_t>(std::llround(phase.budget_eth * 1e9));
    const auto targets = apportion(phase.mix, budget_gwei);
    for (std::size_t c = 0; c < kCategoryCount; ++c) {
      std::vector<PendingTx*> members;
      for (auto& p : pending) {
        const auto w = blocks[p.block].week;
        if (w < phase.first_week || w > phase.last_week) continue;
        if (category_for(instances[p.flow].spec->mechanism) == static_cast<Category>(c)) members.push_back(&p);
      }
      if (members.empty()) {
        if (targets[c] > 0) {
          invalid(fmt::format("phase '{}' plants {} bribes but no {} flow is active", phase.name,
                              to_string(static_cast<Category>(c)), to_string(static_cast<Category>(c))));
        }
        continue;
      }
      std::vector<Wei::rep> weights;
      for (const auto* p : members) weights.push_back(p->bribe / kWeiPerGwei);
      const auto scaled = apportion_exact(weights, static_cast<Wei::rep>(targets[c]));
      for (std::size_t k = 0; k < members.size(); ++k) members[k]->bribe = scaled[k] * kWeiPerGwei;
    }
  }

  // Filler traffic: non-swap transactions, some of them refunds (d_t < 0).
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Rng rng(config.seed, Rng::tag("filler"), b);
    const auto n = rng.uniform_int(config.filler_txs.lo, config.filler_txs.hi);
    for (std::int64_t k = 0; k < n; ++k) {
      PendingTx p;
      p.block = b;
      auto& tx = p.tx;
      tx.hash = derive_hash(fmt::format("filler:{}:{}", blocks[b].record.number, k));
      tx.block_number = blocks[b].record.number;
      tx.sender = derive_address(fmt::format("filler-sender:{}", rng.below(1000)));
      tx.destination = derive_address(fmt::format("filler-contract:{}", rng.below(config.filler_contracts)));
      tx.gas_used = static_cast<std::uint64_t>(rng.uniform_int(21'000, 120'000));
      const auto tip = static_cast<Wei::rep>(std::llround(rng.log_uniform(1e-5, 1e-3) * 1e9)) * kWeiPerGwei;
      tx.priority_tip = Wei{tip};
      if (rng.bernoulli(config.refund_rate)) {
        const auto refund = static_cast<Wei::rep>(std::llround(rng.log_uniform(1e-4, 1e-2) * 1e9)) * kWeiPerGwei;
        tx.direct_bribe = Wei{-(tip + refund)};
      }
      p.bribe = tx.bribe().value();
      p.position = rng.uniform(0.0, 300.0);
      pending.push_back(std::move(p));
    }
  }

  // Tip split for planted transactions.
  const auto tip_scale = [](double f) { return static_cast<Wei::rep>(std::llround(f * kScale)); };
  for (auto& p : pending) {
    if (p.flow < 0) continue;
    const Wei::rep tip = p.bribe * tip_scale(p.tip_fraction) / kScale;
    p.tx.priority_tip = Wei{tip};
    p.tx.direct_bribe = Wei{p.bribe - tip};
  }

  // Order within blocks by planted position; index = rank.
  std::vector<std::vector<std::size_t>> block_txs(blocks.size());
  for (std::size_t i = 0; i < pending.size(); ++i) block_txs[pending[i].block].push_back(i);
  std::vector<std::size_t> tx_order;
  tx_order.reserve(pending.size());
  for (auto& list : block_txs) {
    std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
      if (pending[a].position != pending[b].position) return pending[a].position < pending[b].position;
      return pending[a].tx.hash < pending[b].tx.hash;
    });
    for (std::size_t r = 0; r < list.size(); ++r) pending[list[r]].tx.index_in_block = static_cast<std::uint32_t>(r);
    tx_order.insert(tx_order.end(), list.begin(), list.end());
  }

  // Bids from block revenue.
  Manifest m;
  m.seed = config.seed;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Wei revenue;
    for (auto i : block_txs[b]) revenue += pending[i].tx.bribe().positive_part();
    Rng rng(config.seed, Rng::tag("bid"), b);
    const auto ratio = tip_scale(rng.uniform(config.bid_ratio.lo, config.bid_ratio.hi));
    blocks[b].record.bid = Wei{revenue.value() * ratio / kScale};
    m.total_revenue += revenue;
    m.total_bid += blocks[b].record.bid;
  }

  // ---- emit files ----
  fs::create_directories(out_dir);
  std::string out;
  for (const auto& b : blocks) {
    fmt::format_to(std::back_inserter(out), R"({{"number":{},"timestamp":{},"fee_recipient":"{}","bid":"{}"}})" "\n",
                   b.record.number, b.record.timestamp, b.record.fee_recipient.hex(), wei_str(b.record.bid));
  }
  write_file(out_dir / "blocks.jsonl", out);

  out.clear();
  std::string swaps_out;
  std::vector<std::string> public_hashes;
  for (auto i : tx_order) {
    const auto& tx = pending[i].tx;
    fmt::format_to(std::back_inserter(out),
                   R"({{"hash":"{}","block":{},"index":{},"from":"{}","to":"{}","gas_used":{},"priority_tip":"{}","direct_bribe":"{}","swap_count":{})",
                   tx.hash.hex(), tx.block_number, tx.index_in_block, tx.sender.hex(), tx.destination.hex(), tx.gas_used,
                   wei_str(tx.priority_tip), wei_str(tx.direct_bribe), tx.swap_event_count);
    if (tx.mev_label != MevLabel::none) fmt::format_to(std::back_inserter(out), R"(,"mev_label":"{}")", to_string(tx.mev_label));
    out += "}\n";
    for (const auto& s : pending[i].swaps) {
      fmt::format_to(std::back_inserter(swaps_out), R"({{"tx":"{}","pool":"{}","token_in":"{}","token_out":"{}","amount_usd":{}}})" "\n",
                     s.tx.hex(), s.pool.hex(), s.token_in.hex(), s.token_out.hex(), usd_str(s.amount_usd));
    }
    if (!tx.is_private) public_hashes.push_back(tx.hash.hex());

    ++m.txs;
    m.swaps += pending[i].swaps.size();
    m.private_txs += tx.is_private ? 1 : 0;
    if (tx.is_swap()) {
      ++m.swap_txs;
      m.trading_revenue += tx.bribe().positive_part();
    }
  }
  write_file(out_dir / "txs.jsonl", out);
  write_file(out_dir / "swaps.jsonl", swaps_out);

  std::sort(public_hashes.begin(), public_hashes.end());
  out.clear();
  for (const auto& h : public_hashes) out += h + "\n";
  write_file(out_dir / "mempool.txt", out);

  std::vector<std::pair<Address, const BuilderSpec*>> addresses;
  for (const auto& b : B) {
    if (!b.registered) continue;
    for (unsigned a = 0; a < b.addresses; ++a) addresses.emplace_back(derive_address(fmt::format("builder:{}:{}", b.id, a)), &b);
  }
  std::sort(addresses.begin(), addresses.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  out = "address,builder_id,name\n";
  for (const auto& [addr, b] : addresses) out += fmt::format("{},{},{}\n", addr.hex(), b->id, b->name);
  write_file(out_dir / "builders.csv", out);

  std::vector<const FlowInstance*> sorted_instances;
  for (const auto& f : instances) sorted_instances.push_back(&f);
  std::sort(sorted_instances.begin(), sorted_instances.end(), [](auto* a, auto* b) { return a->contract < b->contract; });
  out = "contract,mechanism,known_eof,source\n";
  for (const auto* f : sorted_instances) {
    if (!f->spec->labeled) continue;
    out += fmt::format("{},{},{},{}\n", f->contract.hex(), to_string(f->spec->mechanism),
                       f->spec->ground_truth ? (f->spec->eof ? "true" : "false") : "",
                       f->spec->label_source == LabelSource::manual ? "manual" : "heuristic");
  }
  write_file(out_dir / "labels.csv", out);

  // ---- manifest aggregates, by direct scan ----
  for (unsigned w = 0; w < config.weeks; ++w) {
    ManifestWeek week;
    week.epoch = w;
    week.start = config.start + std::int64_t{w} * kSecondsPerWeek;
    week.blocks = config.blocks_per_week;
    std::map<std::string, std::uint64_t> counts;
    for (std::size_t b = 0; b < B.size(); ++b) {
      if (!by_builder[w][b].empty()) counts[builder_key(B[b])] += by_builder[w][b].size();
    }
    week.block_counts.assign(counts.begin(), counts.end());
    m.weeks.push_back(std::move(week));
  }

  std::vector<std::map<std::pair<std::int64_t, std::string>, Wei>> cells(instances.size());
  std::vector<ManifestFlow> flows(instances.size());
  for (std::size_t f = 0; f < instances.size(); ++f) {
    const auto& inst = instances[f];
    flows[f].contract = inst.contract;
    flows[f].group = inst.spec->name;
    flows[f].mechanism = inst.spec->mechanism;
    flows[f].eof = inst.spec->eof;
    flows[f].labeled = inst.spec->labeled;
    flows[f].label_source = inst.spec->label_source;
    flows[f].exclusive_to = inst.spec->exclusive_to;
  }
  for (const auto& p : pending) {
    if (p.flow < 0) continue;
    auto& flow = flows[p.flow];
    const Wei bribe = p.tx.bribe().positive_part();
    ++flow.tx_count;
    flow.total_bribe += bribe;
    if (bribe.value() > 0) {
      cells[p.flow][{blocks[p.block].week, builder_key(B[blocks[p.block].builder])}] += bribe;
    }
  }
  for (std::size_t f = 0; f < flows.size(); ++f) {
    for (const auto& [k, v] : cells[f]) flows[f].cells.push_back({k.first, k.second, v});
  }
  std::sort(flows.begin(), flows.end(), [](const auto& a, const auto& b) { return a.contract < b.contract; });
  m.flows = std::move(flows);
  m.blocks = blocks.size();

  for (const auto& phase : config.phases) {
    ManifestPhase mp;
    mp.name = phase.name;
    mp.start = config.start + std::int64_t{phase.first_week} * kSecondsPerWeek;
    mp.end = config.start + std::int64_t{phase.last_week + 1} * kSecondsPerWeek;
    for (const auto& p : pending) {
      if (p.flow < 0) continue;
      const auto w = blocks[p.block].week;
      if (w < phase.first_week || w > phase.last_week) continue;
      const auto c = category_for(instances[p.flow].spec->mechanism);
      const Wei bribe = p.tx.bribe().positive_part();
      mp.bribe[static_cast<std::size_t>(*c)] += bribe;
      mp.total += bribe;
    }
    for (std::size_t k = 0; k < kCategoryCount; ++k) {
      mp.fraction[k] = mp.total.value() > 0 ? static_cast<double>(mp.bribe[k].ld() / mp.total.ld()) : 0.0;
    }
    m.phases.push_back(std::move(mp));
  }

  for (const char* name : {"blocks.jsonl", "txs.jsonl", "swaps.jsonl", "mempool.txt", "builders.csv", "labels.csv"}) {
    m.files[name] = sha256_file(out_dir / name);
  }
  write_file(out_dir / "manifest.json", manifest_to_json(m));
  return m;
}

}  // namespace flowscope
