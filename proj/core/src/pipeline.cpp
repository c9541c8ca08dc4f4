#include "flowscope/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "flowscope/error.hpp"
#include "flowscope/parallel.hpp"

namespace flowscope {

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::protocol: return "protocol";
    case Category::atomic: return "atomic";
    case Category::non_atomic: return "non_atomic";
    case Category::miscellaneous: return "miscellaneous";
  }
  return "miscellaneous";
}

bool parse_category(std::string_view text, Category& out) noexcept {
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    if (to_string(static_cast<Category>(i)) == text) {
      out = static_cast<Category>(i);
      return true;
    }
  }
  return false;
}

std::optional<Category> category_of(Mechanism m) noexcept {
  switch (m) {
    case Mechanism::protocol: return Category::protocol;
    case Mechanism::atomic: return Category::atomic;
    case Mechanism::non_atomic: return Category::non_atomic;
    case Mechanism::other: return Category::miscellaneous;
    case Mechanism::unlabeled: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(AssignmentSource s) noexcept {
  switch (s) {
    case AssignmentSource::manual: return "manual";
    case AssignmentSource::forest: return "forest";
    case AssignmentSource::heuristic: return "heuristic";
    case AssignmentSource::fallback: return "fallback";
  }
  return "fallback";
}

std::vector<LabeledExample> labeled_examples(const Dataset& dataset, const LabelSet& labels,
                                             std::size_t min_tx_count) {
  std::vector<LabeledExample> out;
  for (const auto& [contract, label] : labels.entries()) {
    if (label.source != LabelSource::manual || label.mechanism == Mechanism::unlabeled) continue;
    if (dataset.contract_txs(contract).empty()) continue;
    LabeledExample ex;
    ex.contract = contract;
    ex.x = extract_features(dataset, contract, min_tx_count).values;
    ex.label = label.mechanism == Mechanism::non_atomic ? FlowClass::non_atomic : FlowClass::other;
    out.push_back(ex);
  }
  return out;
}

std::vector<MechanismAssignment> classify_top_flows(const FlowTable& flows, const Dataset& dataset,
                                                    const Forest& forest, const LabelSet& labels, std::size_t k) {
  std::vector<const OrderFlow*> ranked;
  ranked.reserve(flows.size());
  for (const auto& f : flows.flows()) ranked.push_back(&f);
  std::sort(ranked.begin(), ranked.end(), [](const OrderFlow* a, const OrderFlow* b) {
    if (a->total_bribe != b->total_bribe) return a->total_bribe > b->total_bribe;
    return a->contract < b->contract;
  });
  ranked.resize(std::min(k, ranked.size()));

  std::vector<MechanismAssignment> out(ranked.size());
  parallel_for(ranked.size(), [&](std::size_t i) {
    const auto& flow = *ranked[i];
    auto& a = out[i];
    a.rank = i + 1;
    a.contract = flow.contract;
    a.total_bribe = flow.total_bribe;
    const auto features = extract_features(dataset, flow.contract);
    a.mev_label_frequency = features[kMevLabelFrequency];

    const auto* label = labels.find(flow.contract);
    if (label != nullptr && label->source == LabelSource::manual) {
      if (auto c = category_of(label->mechanism)) {
        a.category = *c;
        a.source = AssignmentSource::manual;
        return;
      }
    }

    const auto verdict = predict(forest, features);
    a.votes = verdict.votes;
    if (verdict.label == FlowClass::non_atomic) {
      a.category = Category::non_atomic;
      a.source = AssignmentSource::forest;
    } else if (a.mev_label_frequency > 0.5) {
      a.category = Category::atomic;
      a.source = AssignmentSource::heuristic;
    } else if (label != nullptr && (label->mechanism == Mechanism::protocol || label->mechanism == Mechanism::atomic)) {
      a.category = *category_of(label->mechanism);
      a.source = AssignmentSource::heuristic;
    } else {
      a.category = Category::miscellaneous;
      a.source = AssignmentSource::fallback;
    }
  });
  return out;
}

void write_mechanisms(const std::filesystem::path& path, const std::vector<MechanismAssignment>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("pipeline", Errc::MissingFile, "cannot write " + path.string());
  out << "rank,contract,category,source,votes,total_bribe_wei\n";
  for (const auto& r : rows) {
    out << r.rank << ',' << r.contract.hex() << ',' << to_string(r.category) << ',' << to_string(r.source) << ','
        << r.votes << ',' << r.total_bribe.str() << '\n';
  }
}

std::map<Address, Category> load_mechanisms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("pipeline", Errc::MissingFile, "cannot open " + path.string());
  std::map<Address, Category> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.rfind("rank,", 0) == 0) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, ',');) cols.push_back(col);
    Address contract;
    Category category;
    if (cols.size() < 3 || !Address::try_from_hex(cols[1], contract) || !parse_category(cols[2], category)) {
      throw SchemaError(path.filename().string(), lineno, "<line>", "expected rank,contract,category,...");
    }
    out[contract] = category;
  }
  return out;
}

}  // namespace flowscope
