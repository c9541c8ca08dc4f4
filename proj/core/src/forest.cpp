#include "flowscope/forest.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "flowscope/error.hpp"
#include "flowscope/parallel.hpp"
#include "flowscope/rng.hpp"

namespace flowscope {

namespace {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr std::string_view kFormatName = "flowscope.forest";

std::size_t cls(FlowClass c) { return static_cast<std::size_t>(c); }

// sum of squared class counts over n; n * (1 - gini) for a node.
double purity(std::uint32_t a, std::uint32_t b) noexcept {
  const double n = static_cast<double>(a) + b;
  return n > 0 ? (static_cast<double>(a) * a + static_cast<double>(b) * b) / n : 0.0;
}

// n * gini(parent) - nl * gini(left) - nr * gini(right)
double gini_decrease(const TreeNode& parent, const TreeNode& left, const TreeNode& right) noexcept {
  return purity(left.counts[0], left.counts[1]) + purity(right.counts[0], right.counts[1]) -
         purity(parent.counts[0], parent.counts[1]);
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const LabeledExample> rows, Rng rng, const ForestParams& params)
      : rows_(rows), rng_(std::move(rng)), params_(params) {}

  std::vector<TreeNode> build() {
    std::vector<std::uint32_t> idx(rows_.size());
    std::iota(idx.begin(), idx.end(), 0);
    grow(idx, 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
  };

  int grow(std::vector<std::uint32_t>& idx, int depth) {
    TreeNode node;
    for (auto i : idx) ++node.counts[cls(rows_[i].label)];
    const int me = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    if (pure || depth >= params_.max_depth || idx.size() < 2 * params_.min_samples_leaf) return me;

    const Split split = best_split(idx, node);
    if (split.feature < 0) return me;

    std::vector<std::uint32_t> left;
    std::vector<std::uint32_t> right;
    for (auto i : idx) {
      (rows_[i].x[static_cast<std::size_t>(split.feature)] <= split.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    nodes_[static_cast<std::size_t>(me)].feature = split.feature;
    nodes_[static_cast<std::size_t>(me)].threshold = split.threshold;
    nodes_[static_cast<std::size_t>(me)].left = l;
    nodes_[static_cast<std::size_t>(me)].right = r;
    return me;
  }

  // Evaluates a random subset of features_per_split features; if none of them
  // yields a valid split, keeps drawing from the remaining features.
  Split best_split(const std::vector<std::uint32_t>& idx, const TreeNode& parent) {
    std::array<std::size_t, kFeatureCount> order{};
    std::iota(order.begin(), order.end(), 0);
    rng_.shuffle(std::span<std::size_t>(order));

    Split best;
    std::vector<std::uint32_t> sorted(idx);
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k >= params_.features_per_split && best.feature >= 0) break;
      const auto f = order[k];
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return rows_[a].x[f] < rows_[b].x[f]; });
      TreeNode left;
      TreeNode right = parent;
      const std::size_t n = sorted.size();
      for (std::size_t pos = 0; pos + 1 < n; ++pos) {
        const auto c = cls(rows_[sorted[pos]].label);
        ++left.counts[c];
        --right.counts[c];
        const double lo = rows_[sorted[pos]].x[f];
        const double hi = rows_[sorted[pos + 1]].x[f];
        if (!(lo < hi)) continue;
        if (pos + 1 < params_.min_samples_leaf || n - pos - 1 < params_.min_samples_leaf) continue;
        const double dec = gini_decrease(parent, left, right);
        if (dec > 1e-12 && dec > best.decrease) {
          double mid = lo + 0.5 * (hi - lo);
          if (!(mid < hi)) mid = lo;
          best = {static_cast<int>(f), mid, dec};
        }
      }
    }
    return best;
  }

  std::span<const LabeledExample> rows_;
  Rng rng_;
  const ForestParams& params_;
  std::vector<TreeNode> nodes_;
};

double accuracy(const DecisionTree& tree, std::span<const LabeledExample> rows) {
  if (rows.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& r : rows) hit += tree.predict(r.x) == r.label ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(rows.size());
}

json node_to_json(const DecisionTree& tree, int index) {
  const auto& n = tree.nodes()[static_cast<std::size_t>(index)];
  json j;
  j["counts"] = {n.counts[0], n.counts[1]};
  if (!n.is_leaf()) {
    j["feature"] = n.feature;
    j["feature_name"] = kFeatureNames[static_cast<std::size_t>(n.feature)];
    j["threshold"] = n.threshold;
    j["left"] = node_to_json(tree, n.left);
    j["right"] = node_to_json(tree, n.right);
  }
  return j;
}

int node_from_json(const json& j, std::vector<TreeNode>& nodes) {
  TreeNode n;
  const auto& counts = j.at("counts");
  n.counts = {counts.at(0).get<std::uint32_t>(), counts.at(1).get<std::uint32_t>()};
  const int me = static_cast<int>(nodes.size());
  nodes.push_back(n);
  if (j.contains("feature")) {
    const int f = j.at("feature").get<int>();
    const double t = j.at("threshold").get<double>();
    if (f < 0 || f >= static_cast<int>(kFeatureCount) || !std::isfinite(t)) {
      throw Error("forest", Errc::InvalidArgument, "malformed split node");
    }
    const int l = node_from_json(j.at("left"), nodes);
    const int r = node_from_json(j.at("right"), nodes);
    auto& self = nodes[static_cast<std::size_t>(me)];
    self.feature = f;
    self.threshold = t;
    self.left = l;
    self.right = r;
  }
  return me;
}

}  // namespace

std::string_view to_string(FlowClass c) noexcept { return c == FlowClass::non_atomic ? "non_atomic" : "other"; }

double gini(std::uint32_t a, std::uint32_t b) noexcept {
  const double n = static_cast<double>(a) + b;
  if (n == 0) return 0.0;
  const double pa = a / n;
  const double pb = b / n;
  return 1.0 - pa * pa - pb * pb;
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

FlowClass DecisionTree::predict(const FeatureArray& x) const {
  if (nodes_.empty()) return FlowClass::other;
  std::size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[i].counts[0] > nodes_[i].counts[1] ? FlowClass::non_atomic : FlowClass::other;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return deepest;
}

DecisionTree train_tree(std::span<const LabeledExample> rows, std::uint64_t seed, std::uint64_t tree_index,
                        const ForestParams& params) {
  TreeBuilder builder(rows, Rng(seed, Rng::tag("tree"), tree_index), params);
  return DecisionTree(builder.build());
}

TrainingReport train_forest(std::span<const LabeledExample> examples, std::uint64_t seed, ForestParams params) {
  if (examples.size() < 2 * kTreeCount) {
    throw Error("forest", Errc::InsufficientData,
                "need at least " + std::to_string(2 * kTreeCount) + " labeled examples, got " +
                    std::to_string(examples.size()));
  }

  // Canonical order so the result depends only on the example set.
  std::vector<LabeledExample> data(examples.begin(), examples.end());
  std::stable_sort(data.begin(), data.end(),
                   [](const LabeledExample& a, const LabeledExample& b) { return a.contract < b.contract; });

  std::array<std::vector<std::size_t>, 2> by_class;
  for (std::size_t i = 0; i < data.size(); ++i) by_class[cls(data[i].label)].push_back(i);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw Error("forest", Errc::SingleClassData, "training data contains a single class");
  }

  std::vector<std::size_t> test;
  std::array<std::vector<std::size_t>, kTreeCount> folds;
  std::size_t dealt = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    Rng(seed, Rng::tag("test-split"), c).shuffle(std::span<std::size_t>(members));
    const auto n_test = static_cast<std::size_t>(std::llround(params.test_fraction * static_cast<double>(members.size())));
    test.insert(test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> rest(members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
    Rng(seed, Rng::tag("folds"), c).shuffle(std::span<std::size_t>(rest));
    for (auto i : rest) folds[dealt++ % kTreeCount].push_back(i);
  }

  TrainingReport report;
  report.forest.seed = seed;
  report.forest.params = params;
  report.forest.trees.resize(kTreeCount);
  report.forest.validation_accuracy.resize(kTreeCount);
  report.train_size = dealt;
  report.test_size = test.size();

  parallel_for(kTreeCount, [&](std::size_t k) {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> validate;
    for (std::size_t f = 0; f < kTreeCount; ++f) {
      for (auto i : folds[f]) (f == k ? validate : train).push_back(data[i]);
    }
    report.forest.trees[k] = train_tree(train, seed, k, params);
    report.forest.validation_accuracy[k] = accuracy(report.forest.trees[k], validate);
  });

  const auto& acc = report.forest.validation_accuracy;
  report.validation_mean = std::accumulate(acc.begin(), acc.end(), 0.0) / static_cast<double>(acc.size());
  double ss = 0.0;
  for (double a : acc) ss += (a - report.validation_mean) * (a - report.validation_mean);
  report.validation_stddev = std::sqrt(ss / static_cast<double>(acc.size() - 1));

  std::sort(test.begin(), test.end());
  std::size_t hit = 0;
  for (auto i : test) {
    const auto p = predict(report.forest, data[i].x);
    hit += p.label == data[i].label ? 1 : 0;
    ++report.test_vote_histogram[p.votes];
    report.test_contracts.push_back(data[i].contract);
  }
  report.test_accuracy = test.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(test.size());
  return report;
}

Prediction predict(const Forest& forest, const FeatureArray& x) {
  unsigned non_atomic = 0;
  for (const auto& tree : forest.trees) non_atomic += tree.predict(x) == FlowClass::non_atomic ? 1 : 0;
  const auto total = static_cast<unsigned>(forest.trees.size());
  if (2 * non_atomic > total) return {FlowClass::non_atomic, non_atomic};
  return {FlowClass::other, total - non_atomic};
}

Prediction predict(const Forest& forest, const FeatureVector& v) { return predict(forest, v.values); }

FeatureArray feature_importance(const Forest& forest) {
  FeatureArray total{};
  for (const auto& tree : forest.trees) {
    FeatureArray per_tree{};
    const auto& nodes = tree.nodes();
    for (const auto& n : nodes) {
      if (n.is_leaf()) continue;
      per_tree[static_cast<std::size_t>(n.feature)] +=
          gini_decrease(n, nodes[static_cast<std::size_t>(n.left)], nodes[static_cast<std::size_t>(n.right)]);
    }
    const double sum = std::accumulate(per_tree.begin(), per_tree.end(), 0.0);
    if (sum <= 0.0) continue;
    for (std::size_t f = 0; f < kFeatureCount; ++f) total[f] += per_tree[f] / sum;
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum > 0.0) {
    for (auto& v : total) v /= sum;
  }
  return total;
}

std::string forest_to_json(const Forest& forest) {
  json j;
  j["format"] = kFormatName;
  j["version"] = kFormatVersion;
  j["seed"] = forest.seed;
  j["params"] = {{"max_depth", forest.params.max_depth},
                 {"min_samples_leaf", forest.params.min_samples_leaf},
                 {"features_per_split", forest.params.features_per_split},
                 {"test_fraction", forest.params.test_fraction}};
  j["features"] = kFeatureNames;
  j["classes"] = {"non_atomic", "other"};
  j["trees"] = json::array();
  for (std::size_t k = 0; k < forest.trees.size(); ++k) {
    json t;
    t["validation_accuracy"] = k < forest.validation_accuracy.size() ? forest.validation_accuracy[k] : 0.0;
    t["root"] = forest.trees[k].nodes().empty() ? json(nullptr) : node_to_json(forest.trees[k], 0);
    j["trees"].push_back(std::move(t));
  }
  return j.dump(2) + "\n";
}

Forest forest_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("forest", Errc::InvalidArgument, std::string("forest JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormatName) {
      throw Error("forest", Errc::InvalidArgument, "not a flowscope forest");
    }
    if (j.at("version").get<int>() != kFormatVersion) {
      throw Error("forest", Errc::InvalidArgument, "unsupported forest version " + j.at("version").dump());
    }
    Forest f;
    f.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("params");
    f.params.max_depth = p.at("max_depth").get<int>();
    f.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
    f.params.features_per_split = p.at("features_per_split").get<std::size_t>();
    f.params.test_fraction = p.at("test_fraction").get<double>();
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      if (!t.at("root").is_null()) node_from_json(t.at("root"), nodes);
      f.trees.emplace_back(std::move(nodes));
      f.validation_accuracy.push_back(t.at("validation_accuracy").get<double>());
    }
    if (f.trees.size() != kTreeCount) {
      throw Error("forest", Errc::InvalidArgument, "expected " + std::to_string(kTreeCount) + " trees");
    }
    return f;
  } catch (const json::exception& e) {
    throw Error("forest", Errc::InvalidArgument, std::string("forest JSON: ") + e.what());
  }
}

}  // namespace flowscope
