#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowscope/features.hpp"

namespace flowscope {

// Binary target: non-atomic MEV versus everything else.
enum class FlowClass : std::uint8_t { non_atomic = 0, other = 1 };
std::string_view to_string(FlowClass c) noexcept;

using FeatureArray = std::array<double, kFeatureCount>;

struct LabeledExample {
  Address contract;
  FeatureArray x{};
  FlowClass label = FlowClass::other;
};

inline constexpr std::size_t kTreeCount = 7;

struct ForestParams {
  int max_depth = 6;
  std::size_t min_samples_leaf = 2;
  std::size_t features_per_split = 3;  // ceil(sqrt(9))
  double test_fraction = 0.3;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  std::array<std::uint32_t, 2> counts{};  // {non_atomic, other} training samples reaching the node

  bool is_leaf() const noexcept { return feature < 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes);

  FlowClass predict(const FeatureArray& x) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;  // root at index 0
};

struct Forest {
  std::vector<DecisionTree> trees;         // kTreeCount
  std::vector<double> validation_accuracy;  // per tree, on its held-out fold
  std::uint64_t seed = 0;
  ForestParams params;
};

struct Prediction {
  FlowClass label = FlowClass::other;
  unsigned votes = 0;  // trees agreeing with `label`, 4..7
};

struct TrainingReport {
  Forest forest;
  std::vector<Address> test_contracts;
  std::size_t train_size = 0;  // examples across the 7 folds
  std::size_t test_size = 0;
  double validation_mean = 0.0;
  double validation_stddev = 0.0;  // sample standard deviation over trees
  double test_accuracy = 0.0;
  std::array<std::size_t, kTreeCount + 1> test_vote_histogram{};  // [votes] -> test contracts
};

// Stratified 30% test reservation, the rest dealt into 7 stratified folds;
// tree k trains on the other six folds and is validated on fold k.
// Throws Error{forest.InsufficientData} below 14 examples and
// Error{forest.SingleClassData} when a class is missing.
TrainingReport train_forest(std::span<const LabeledExample> examples, std::uint64_t seed, ForestParams params = {});

// Single CART tree on the given rows. Exposed for tests and benchmarks.
DecisionTree train_tree(std::span<const LabeledExample> rows, std::uint64_t seed, std::uint64_t tree_index,
                        const ForestParams& params);

Prediction predict(const Forest& forest, const FeatureArray& x);
Prediction predict(const Forest& forest, const FeatureVector& v);

// Mean Gini decrease per feature, normalized per tree then averaged and
// normalized to sum 1 (all zeros if no tree ever splits).
FeatureArray feature_importance(const Forest& forest);

// Versioned JSON, nodes as nested objects.
std::string forest_to_json(const Forest& forest);
Forest forest_from_json(std::string_view text);

double gini(std::uint32_t a, std::uint32_t b) noexcept;

}  // namespace flowscope
