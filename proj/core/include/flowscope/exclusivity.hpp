#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "flowscope/flows.hpp"
#include "flowscope/ingest.hpp"

namespace flowscope {

// Block-count market structure S_t of one epoch.
struct MarketDistribution {
  std::int64_t epoch = 0;
  std::vector<std::pair<BuilderId, std::uint64_t>> block_counts;  // Q_{t,i} > 0, builder ascending
  std::uint64_t total_blocks = 0;                                 // Q_t

  std::uint64_t count(BuilderId builder) const noexcept;
  double share(BuilderId builder) const noexcept;
  std::vector<std::pair<BuilderId, double>> shares() const;
};

// Throws Error{exclusivity.EmptyEpoch} when the epoch holds no block.
MarketDistribution market_distribution(const Dataset& dataset, const EpochScheme& scheme, const Epoch& epoch);

// Per-epoch markets for every epoch that contains a block.
class MarketTable {
 public:
  static MarketTable build(const Dataset& dataset, const EpochScheme& scheme);

  const MarketDistribution* find(std::int64_t epoch) const;
  const std::map<std::int64_t, MarketDistribution>& epochs() const noexcept { return epochs_; }

 private:
  std::map<std::int64_t, MarketDistribution> epochs_;
};

// sum_i p_i ln(p_i / s_i) in nats, with 0 ln(0/s) = 0.
// Throws Error{exclusivity.SupportViolation} if p_i > 0 where s_i = 0.
double kl_divergence(std::span<const double> p, std::span<const double> s);

struct EpochTerm {
  std::int64_t epoch = 0;
  Wei bribe;          // R_{t,j}
  double kl = 0.0;    // D_KL(P_{t,j} || S_t)
  double weight = 0.0;  // sqrt(R_{t,j} in ETH)
};

struct ExclusivityScore {
  Address contract;
  std::vector<EpochTerm> terms;  // active epochs only
  double total = 0.0;            // E(j)
  Wei total_bribe;

  std::size_t active_epochs() const noexcept { return terms.size(); }
  // Unweighted mean of the per-epoch KL terms; 0 with no active epoch.
  double average_kl() const noexcept;
};

// E(j) = sum over active epochs of D_KL(P_{t,j} || S_t) * sqrt(R_{t,j} / 1e18).
ExclusivityScore exclusivity_score(const OrderFlow& flow, const MarketTable& markets);
std::vector<ExclusivityScore> score_flows(const FlowTable& flows, const MarketTable& markets);

struct ThresholdPoint {
  double tau = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ThresholdResult {
  double tau = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<ThresholdPoint> curve;  // tau ascending
};

struct LabeledScore {
  double score = 0.0;
  bool positive = false;
};

// Sweeps tau over: just below the smallest score, every midpoint between
// consecutive distinct scores, and the largest score. Predicts positive for
// score > tau and keeps the first (smallest) tau reaching the maximum F1.
// Throws Error{exclusivity.DegenerateGroundTruth} without both classes.
ThresholdResult optimize_threshold(std::span<const LabeledScore> samples);

// Ground truth: contracts whose label carries known_eof and that have a score.
ThresholdResult optimize_threshold(std::span<const ExclusivityScore> scores, const LabelSet& ground_truth);

// {j : E(j) > tau}, contract ascending.
std::vector<Address> classify_eof(std::span<const ExclusivityScore> scores, double tau);

double f1_score(double precision, double recall) noexcept;

}  // namespace flowscope
