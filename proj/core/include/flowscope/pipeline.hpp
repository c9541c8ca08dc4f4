#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "flowscope/features.hpp"
#include "flowscope/flows.hpp"
#include "flowscope/forest.hpp"
#include "flowscope/ingest.hpp"

namespace flowscope {

enum class Category : std::uint8_t { protocol, atomic, non_atomic, miscellaneous };
inline constexpr std::size_t kCategoryCount = 4;
std::string_view to_string(Category c) noexcept;
bool parse_category(std::string_view text, Category& out) noexcept;

// Maps a manual mechanism label onto the output categories; nullopt when
// the contract is unlabeled.
std::optional<Category> category_of(Mechanism m) noexcept;

enum class AssignmentSource : std::uint8_t { manual, forest, heuristic, fallback };
std::string_view to_string(AssignmentSource s) noexcept;

struct MechanismAssignment {
  std::size_t rank = 0;  // 1-based, by total bribe
  Address contract;
  Wei total_bribe;
  Category category = Category::miscellaneous;
  AssignmentSource source = AssignmentSource::fallback;
  unsigned votes = 0;  // forest votes for its verdict; 0 for manual labels
  double mev_label_frequency = 0.0;
};

// Manually labeled contracts with at least one transaction, as training rows.
std::vector<LabeledExample> labeled_examples(const Dataset& dataset, const LabelSet& labels,
                                             std::size_t min_tx_count = kDefaultMinTxCount);

inline constexpr std::size_t kDefaultTopK = 1000;

// Ranks flows by total bribe (descending, ties by contract ascending) and
// assigns each of the top K exactly one category:
//   1. a manual label is kept;
//   2. otherwise the forest decides non_atomic vs other;
//   3. "other" becomes atomic when more than half its transactions carry an
//      MEV label, else the heuristic label (protocol/atomic) if any, else
//      miscellaneous.
// K larger than the flow count is clamped.
std::vector<MechanismAssignment> classify_top_flows(const FlowTable& flows, const Dataset& dataset,
                                                    const Forest& forest, const LabelSet& labels,
                                                    std::size_t k = kDefaultTopK);

// mechanisms.csv: rank,contract,category,source,votes,total_bribe_wei
void write_mechanisms(const std::filesystem::path& path, const std::vector<MechanismAssignment>& rows);
std::map<Address, Category> load_mechanisms(const std::filesystem::path& path);

}  // namespace flowscope
