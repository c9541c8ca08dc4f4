#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowscope/exclusivity.hpp"
#include "flowscope/flows.hpp"
#include "flowscope/ingest.hpp"
#include "flowscope/pipeline.hpp"

namespace flowscope {

// sum of squared shares
double hhi(std::span<const double> shares) noexcept;

struct HhiPoint {
  std::int64_t epoch = 0;
  std::int64_t start = 0;  // UTC seconds
  std::uint64_t blocks = 0;
  double hhi = 0.0;
};

// One point per epoch holding at least one block.
std::vector<HhiPoint> hhi_series(const MarketTable& markets, const EpochScheme& scheme);
std::vector<HhiPoint> hhi_series(const Dataset& dataset);

enum class BuilderCategory : std::uint8_t { dominant, influential, niche };
std::string_view to_string(BuilderCategory c) noexcept;

// dominant: peak > 0.5; influential: 0.1 < peak <= 0.5; niche otherwise.
BuilderCategory categorize_peak(double peak_share) noexcept;

struct BuilderPeak {
  BuilderId builder = kProposer;
  double peak_share = 0.0;
  BuilderCategory category = BuilderCategory::niche;
};

// Registered builders only (the proposer pseudo-builder is skipped), id ascending.
std::vector<BuilderPeak> categorize_builders(const MarketTable& markets, const BuilderRegistry& registry);
std::vector<BuilderPeak> categorize_builders(const Dataset& dataset);

struct Phase {
  std::string name;
  std::int64_t start = 0;  // inclusive, UTC seconds
  std::int64_t end = 0;    // exclusive
};

// "YYYY-MM-DD" at 00:00 UTC. Throws Error{concentration.InvalidConfig}.
std::int64_t parse_date(std::string_view text);
std::string format_date(std::int64_t timestamp);

// Consecutive boundaries b0 < b1 < ... produce phases [b0,b1), [b1,b2), ...
std::vector<Phase> phases_from_boundaries(std::span<const std::int64_t> boundaries,
                                          std::span<const std::string> names = {});
std::vector<Phase> default_phases();
// TOML: `boundaries = ["YYYY-MM-DD", ...]` with optional `names = [...]`,
// or `[[phase]]` tables with name/start/end.
std::vector<Phase> load_phases(const std::filesystem::path& toml);

struct PhaseComposition {
  Phase phase;
  std::array<Wei, kCategoryCount> bribe{};
  Wei total;
  std::array<double, kCategoryCount> fraction{};
};

// Bribes max(d_t, 0) of swap transactions to categorized contracts, grouped
// by the block timestamp's phase. Throws Error{concentration.EmptyPhase}
// when a phase carries no categorized bribe.
PhaseComposition compose_phase(const Dataset& dataset, const std::map<Address, Category>& mechanisms,
                               const Phase& phase);
std::vector<PhaseComposition> phase_composition(const Dataset& dataset,
                                                const std::map<Address, Category>& mechanisms,
                                                std::span<const Phase> phases);

// Two-pass Pearson r, clamped to [-1, 1]. nullopt when either series is
// constant. Throws Error{concentration.InvalidArgument} on size mismatch or
// fewer than two points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationResult {
  BuilderId builder = kProposer;
  std::optional<double> r;        // nullopt: constant series
  std::size_t days = 0;           // paired observations used
  std::size_t active_days = 0;    // days the builder produced a block
  std::size_t dropped_days = 0;   // days with zero trading revenue
  std::vector<double> share;      // daily block share
  std::vector<double> eof_ratio;  // daily EOF bribe / total trading revenue
};

// Daily block share of `builder` versus its EOF bribes that day divided by
// the day's total trading revenue across all builders. Days with zero trading
// revenue are dropped. Throws Error{concentration.InsufficientDays} when the
// builder is active on fewer than 3 days.
CorrelationResult eof_share_correlation(const Dataset& dataset, const std::set<Address>& eof_set, BuilderId builder);

}  // namespace flowscope
