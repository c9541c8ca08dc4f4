#include "flowscope/concentration.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <toml.hpp>

#include "flowscope/error.hpp"

namespace flowscope {

double hhi(std::span<const double> shares) noexcept {
  double sum = 0.0;
  for (double s : shares) sum += s * s;
  return sum;
}

std::vector<HhiPoint> hhi_series(const MarketTable& markets, const EpochScheme& scheme) {
  std::vector<HhiPoint> out;
  out.reserve(markets.epochs().size());
  for (const auto& [epoch, market] : markets.epochs()) {
    std::vector<double> shares;
    for (const auto& [_, s] : market.shares()) shares.push_back(s);
    out.push_back({epoch, scheme.epoch(epoch).start, market.total_blocks, hhi(shares)});
  }
  return out;
}

std::vector<HhiPoint> hhi_series(const Dataset& dataset) {
  const auto scheme = EpochScheme::for_dataset(dataset, Granularity::weekly);
  return hhi_series(MarketTable::build(dataset, scheme), scheme);
}

std::string_view to_string(BuilderCategory c) noexcept {
  switch (c) {
    case BuilderCategory::dominant: return "dominant";
    case BuilderCategory::influential: return "influential";
    case BuilderCategory::niche: return "niche";
  }
  return "niche";
}

BuilderCategory categorize_peak(double peak_share) noexcept {
  if (peak_share > 0.5) return BuilderCategory::dominant;
  if (peak_share > 0.1) return BuilderCategory::influential;
  return BuilderCategory::niche;
}

std::vector<BuilderPeak> categorize_builders(const MarketTable& markets, const BuilderRegistry& registry) {
  std::vector<double> peak(registry.size(), 0.0);
  for (const auto& [_, market] : markets.epochs()) {
    for (const auto& [b, s] : market.shares()) peak[b] = std::max(peak[b], s);
  }
  std::vector<BuilderPeak> out;
  for (BuilderId b = 0; b < registry.size(); ++b) {
    if (b == kProposer) continue;
    out.push_back({b, peak[b], categorize_peak(peak[b])});
  }
  return out;
}

std::vector<BuilderPeak> categorize_builders(const Dataset& dataset) {
  const auto scheme = EpochScheme::for_dataset(dataset, Granularity::weekly);
  return categorize_builders(MarketTable::build(dataset, scheme), dataset.registry());
}

std::int64_t parse_date(std::string_view text) {
  using namespace std::chrono;
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto bad = [&] {
    return Error("concentration", Errc::InvalidConfig, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto parse = [&](std::string_view s, auto& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size()) throw bad();
  };
  parse(text.substr(0, 4), y);
  parse(text.substr(5, 2), m);
  parse(text.substr(8, 2), d);
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw bad();
  return static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * kSecondsPerDay;
}

std::string format_date(std::int64_t timestamp) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{floor_to_day(timestamp) / kSecondsPerDay}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::vector<Phase> phases_from_boundaries(std::span<const std::int64_t> boundaries, std::span<const std::string> names) {
  if (boundaries.size() < 2) throw Error("concentration", Errc::InvalidConfig, "need at least two phase boundaries");
  if (!names.empty() && names.size() != boundaries.size() - 1) {
    throw Error("concentration", Errc::InvalidConfig, "phase names do not match the boundary count");
  }
  std::vector<Phase> out;
  for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
    if (boundaries[i + 1] <= boundaries[i]) {
      throw Error("concentration", Errc::InvalidConfig, "phase boundaries must be strictly increasing");
    }
    out.push_back({names.empty() ? "phase" + std::to_string(i + 1) : names[i], boundaries[i], boundaries[i + 1]});
  }
  return out;
}

std::vector<Phase> default_phases() {
  const std::int64_t b[] = {parse_date("2022-09-01"), parse_date("2023-01-01"), parse_date("2023-10-01"),
                            parse_date("2024-10-01"), parse_date("2025-08-31")};
  return phases_from_boundaries(b);
}

std::vector<Phase> load_phases(const std::filesystem::path& path) {
  toml::table doc;
  try {
    doc = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw Error("concentration", Errc::InvalidConfig, path.string() + ": " + std::string(e.description()));
  } catch (const std::exception& e) {
    throw Error("concentration", Errc::MissingFile, path.string() + ": " + e.what());
  }
  auto date_of = [](const toml::node& n) -> std::int64_t {
    if (auto s = n.value<std::string>()) return parse_date(*s);
    if (auto d = n.value<toml::date>()) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d->year), static_cast<unsigned>(d->month),
                    static_cast<unsigned>(d->day));
      return parse_date(buf);
    }
    throw Error("concentration", Errc::InvalidConfig, "phase dates must be strings or TOML dates");
  };

  if (auto* arr = doc["boundaries"].as_array()) {
    std::vector<std::int64_t> bounds;
    for (const auto& n : *arr) bounds.push_back(date_of(n));
    std::vector<std::string> names;
    if (auto* na = doc["names"].as_array()) {
      for (const auto& n : *na) names.push_back(n.value_or(std::string{}));
    }
    return phases_from_boundaries(bounds, names);
  }
  if (auto* tables = doc["phase"].as_array()) {
    std::vector<Phase> out;
    for (const auto& n : *tables) {
      const auto* t = n.as_table();
      if (t == nullptr || !t->contains("start") || !t->contains("end")) {
        throw Error("concentration", Errc::InvalidConfig, "[[phase]] needs start and end");
      }
      Phase p;
      p.name = (*t)["name"].value_or("phase" + std::to_string(out.size() + 1));
      p.start = date_of(*t->get("start"));
      p.end = date_of(*t->get("end"));
      if (p.end <= p.start) throw Error("concentration", Errc::InvalidConfig, "phase '" + p.name + "' ends before it starts");
      out.push_back(std::move(p));
    }
    return out;
  }
  throw Error("concentration", Errc::InvalidConfig, path.string() + ": expected `boundaries` or [[phase]] tables");
}

PhaseComposition compose_phase(const Dataset& dataset, const std::map<Address, Category>& mechanisms,
                               const Phase& phase) {
  PhaseComposition c;
  c.phase = phase;
  const auto txs = dataset.txs();
  for (std::size_t i = 0; i < txs.size(); ++i) {
    const auto& tx = txs[i];
    if (!tx.is_swap()) continue;
    const auto ts = dataset.block_of(i).timestamp;
    if (ts < phase.start || ts >= phase.end) continue;
    auto it = mechanisms.find(tx.destination);
    if (it == mechanisms.end()) continue;
    const Wei b = tx.bribe().positive_part();
    c.bribe[static_cast<std::size_t>(it->second)] += b;
    c.total += b;
  }
  if (c.total.value() == 0) {
    throw Error("concentration", Errc::EmptyPhase, "phase '" + phase.name + "' has no categorized bribes");
  }
  for (std::size_t k = 0; k < kCategoryCount; ++k) {
    c.fraction[k] = static_cast<double>(c.bribe[k].ld() / c.total.ld());
  }
  return c;
}

std::vector<PhaseComposition> phase_composition(const Dataset& dataset, const std::map<Address, Category>& mechanisms,
                                                std::span<const Phase> phases) {
  std::vector<PhaseComposition> out;
  out.reserve(phases.size());
  for (const auto& p : phases) out.push_back(compose_phase(dataset, mechanisms, p));
  return out;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("concentration", Errc::InvalidArgument, "series differ in length");
  if (x.size() < 2) throw Error("concentration", Errc::InvalidArgument, "need at least two observations");
  const auto n = static_cast<long double>(x.size());
  long double mx = 0.0L;
  long double my = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxx = 0.0L;
  long double syy = 0.0L;
  long double sxy = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double dx = x[i] - mx;
    const long double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0L || syy == 0.0L) return std::nullopt;
  const long double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(static_cast<double>(r), -1.0, 1.0);
}

CorrelationResult eof_share_correlation(const Dataset& dataset, const std::set<Address>& eof_set, BuilderId builder) {
  const EpochScheme days(Granularity::daily, 0);
  struct Day {
    std::uint64_t blocks = 0;
    std::uint64_t builder_blocks = 0;
    Wei trading;
    Wei eof;
  };
  std::map<std::int64_t, Day> by_day;
  const auto blocks = dataset.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto& day = by_day[days.index_of(blocks[b].timestamp)];
    ++day.blocks;
    const bool mine = blocks[b].builder == builder;
    day.builder_blocks += mine ? 1 : 0;
    for (const auto& tx : dataset.block_txs(b)) {
      if (!tx.is_swap()) continue;
      const Wei bribe = tx.bribe().positive_part();
      day.trading += bribe;
      if (mine && eof_set.contains(tx.destination)) day.eof += bribe;
    }
  }

  CorrelationResult res;
  res.builder = builder;
  for (const auto& [_, day] : by_day) {
    res.active_days += day.builder_blocks > 0 ? 1 : 0;
    if (day.trading.value() == 0) {
      ++res.dropped_days;
      continue;
    }
    res.share.push_back(static_cast<double>(day.builder_blocks) / static_cast<double>(day.blocks));
    res.eof_ratio.push_back(static_cast<double>(day.eof.ld() / day.trading.ld()));
  }
  res.days = res.share.size();
  if (res.active_days < 3) {
    throw Error("concentration", Errc::InsufficientDays,
                "builder " + dataset.registry().id(builder) + " is active on " + std::to_string(res.active_days) +
                    " day(s); need 3");
  }
  if (res.days >= 2) res.r = pearson(res.share, res.eof_ratio);
  return res;
}

}  // namespace flowscope
