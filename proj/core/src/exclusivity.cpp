#include "flowscope/exclusivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flowscope/error.hpp"
#include "flowscope/parallel.hpp"

namespace flowscope {

namespace {

MarketDistribution tally(std::int64_t epoch, std::span<const BlockRecord> blocks) {
  std::map<BuilderId, std::uint64_t> counts;
  for (const auto& b : blocks) ++counts[b.builder];
  MarketDistribution m;
  m.epoch = epoch;
  m.block_counts.assign(counts.begin(), counts.end());
  m.total_blocks = blocks.size();
  return m;
}

}  // namespace

std::uint64_t MarketDistribution::count(BuilderId builder) const noexcept {
  auto it = std::lower_bound(block_counts.begin(), block_counts.end(), builder,
                             [](const auto& e, BuilderId b) { return e.first < b; });
  return it != block_counts.end() && it->first == builder ? it->second : 0;
}

double MarketDistribution::share(BuilderId builder) const noexcept {
  if (total_blocks == 0) return 0.0;
  return static_cast<double>(count(builder)) / static_cast<double>(total_blocks);
}

std::vector<std::pair<BuilderId, double>> MarketDistribution::shares() const {
  std::vector<std::pair<BuilderId, double>> out;
  out.reserve(block_counts.size());
  for (const auto& [b, q] : block_counts) {
    out.emplace_back(b, static_cast<double>(q) / static_cast<double>(total_blocks));
  }
  return out;
}

MarketDistribution market_distribution(const Dataset& dataset, const EpochScheme& scheme, const Epoch& epoch) {
  const auto blocks = dataset.blocks();
  auto first = std::lower_bound(blocks.begin(), blocks.end(), epoch.start,
                                [](const BlockRecord& b, std::int64_t t) { return b.timestamp < t; });
  auto last = std::lower_bound(first, blocks.end(), epoch.end,
                               [](const BlockRecord& b, std::int64_t t) { return b.timestamp < t; });
  (void)scheme;
  if (first == last) {
    throw Error("exclusivity", Errc::EmptyEpoch, "epoch " + std::to_string(epoch.index) + " contains no block");
  }
  return tally(epoch.index, std::span<const BlockRecord>(&*first, static_cast<std::size_t>(last - first)));
}

MarketTable MarketTable::build(const Dataset& dataset, const EpochScheme& scheme) {
  MarketTable table;
  const auto blocks = dataset.blocks();
  std::size_t begin = 0;
  while (begin < blocks.size()) {
    const auto epoch = scheme.index_of(blocks[begin].timestamp);
    std::size_t end = begin;
    while (end < blocks.size() && scheme.index_of(blocks[end].timestamp) == epoch) ++end;
    table.epochs_.emplace(epoch, tally(epoch, blocks.subspan(begin, end - begin)));
    begin = end;
  }
  return table;
}

const MarketDistribution* MarketTable::find(std::int64_t epoch) const {
  auto it = epochs_.find(epoch);
  return it == epochs_.end() ? nullptr : &it->second;
}

double kl_divergence(std::span<const double> p, std::span<const double> s) {
  if (p.size() != s.size()) {
    throw Error("exclusivity", Errc::InvalidArgument, "distributions differ in length");
  }
  long double sum = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (s[i] <= 0.0) {
      throw Error("exclusivity", Errc::SupportViolation,
                  "p[" + std::to_string(i) + "] > 0 outside the support of s");
    }
    sum += static_cast<long double>(p[i]) * std::log(static_cast<long double>(p[i]) / s[i]);
  }
  // Gibbs' inequality; rounding can leave a residue of order 1e-17 below zero.
  return std::max(0.0, static_cast<double>(sum));
}

double ExclusivityScore::average_kl() const noexcept {
  if (terms.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : terms) sum += t.kl;
  return sum / static_cast<double>(terms.size());
}

ExclusivityScore exclusivity_score(const OrderFlow& flow, const MarketTable& markets) {
  ExclusivityScore score;
  score.contract = flow.contract;
  score.total_bribe = flow.total_bribe;

  std::size_t i = 0;
  const auto& cells = flow.cells;
  while (i < cells.size()) {
    const auto epoch = cells[i].epoch;
    std::size_t end = i;
    Wei epoch_total;
    while (end < cells.size() && cells[end].epoch == epoch) epoch_total += cells[end++].amount;

    const auto* market = markets.find(epoch);
    if (market == nullptr) {
      throw Error("exclusivity", Errc::SupportViolation,
                  flow.contract.hex() + " pays bribes in epoch " + std::to_string(epoch) + " which has no blocks");
    }

    // p_i ln(p_i / s_i) with the ratio formed as (R_i Q) / (R Q_i) in exact
    // integer arithmetic, so routing exactly proportional to block counts
    // yields ln(1) = 0 for every term.
    long double kl = 0.0L;
    const Wei::rep q_total = static_cast<Wei::rep>(market->total_blocks);
    for (std::size_t k = i; k < end; ++k) {
      const auto q_i = market->count(cells[k].builder);
      if (q_i == 0) {
        throw Error("exclusivity", Errc::SupportViolation,
                    flow.contract.hex() + " pays a builder without blocks in epoch " + std::to_string(epoch));
      }
      const Wei::rep num = cells[k].amount.value() * q_total;
      const Wei::rep den = epoch_total.value() * static_cast<Wei::rep>(q_i);
      const long double p = cells[k].amount.ld() / epoch_total.ld();
      if (num != den) kl += p * std::log(static_cast<long double>(num) / static_cast<long double>(den));
    }

    EpochTerm term;
    term.epoch = epoch;
    term.bribe = epoch_total;
    term.kl = std::max(0.0, static_cast<double>(kl));
    term.weight = std::sqrt(epoch_total.eth());
    score.total += term.kl * term.weight;
    score.terms.push_back(term);
    i = end;
  }
  return score;
}

std::vector<ExclusivityScore> score_flows(const FlowTable& flows, const MarketTable& markets) {
  std::vector<ExclusivityScore> out(flows.size());
  parallel_for(flows.size(), [&](std::size_t k) { out[k] = exclusivity_score(flows.flows()[k], markets); });
  return out;
}

double f1_score(double precision, double recall) noexcept {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

ThresholdResult optimize_threshold(std::span<const LabeledScore> samples) {
  ThresholdResult result;
  for (const auto& s : samples) (s.positive ? result.positives : result.negatives)++;
  if (result.positives == 0 || result.negatives == 0) {
    throw Error("exclusivity", Errc::DegenerateGroundTruth,
                "ground truth needs both classes (positives=" + std::to_string(result.positives) +
                    ", negatives=" + std::to_string(result.negatives) + ")");
  }

  std::vector<LabeledScore> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score < b.score; });

  // Distinct values with the number of positives / negatives at each.
  struct Group {
    double value;
    std::size_t pos = 0;
    std::size_t neg = 0;
  };
  std::vector<Group> groups;
  for (const auto& s : sorted) {
    if (groups.empty() || groups.back().value != s.score) groups.push_back({s.score});
    (s.positive ? groups.back().pos : groups.back().neg)++;
  }

  // Candidate k predicts positive for groups [k, end).
  auto evaluate = [&](double tau, std::size_t tp, std::size_t fp) {
    ThresholdPoint pt;
    pt.tau = tau;
    pt.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    pt.recall = static_cast<double>(tp) / static_cast<double>(result.positives);
    // 2tp / (2tp + fp + fn): equal ratios round to the same double, so ties are exact.
    const std::size_t fn = result.positives - tp;
    pt.f1 = tp == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
    return pt;
  };

  std::size_t tp = result.positives;
  std::size_t fp = result.negatives;
  result.curve.push_back(evaluate(std::nextafter(groups.front().value, -std::numeric_limits<double>::infinity()), tp, fp));
  for (std::size_t k = 0; k < groups.size(); ++k) {
    tp -= groups[k].pos;
    fp -= groups[k].neg;
    double tau;
    if (k + 1 < groups.size()) {
      tau = groups[k].value + 0.5 * (groups[k + 1].value - groups[k].value);
      if (!(tau < groups[k + 1].value)) tau = groups[k].value;
    } else {
      tau = groups[k].value;
    }
    result.curve.push_back(evaluate(tau, tp, fp));
  }

  const ThresholdPoint* best = &result.curve.front();
  for (const auto& pt : result.curve) {
    if (pt.f1 > best->f1) best = &pt;
  }
  result.tau = best->tau;
  result.precision = best->precision;
  result.recall = best->recall;
  result.f1 = best->f1;
  return result;
}

ThresholdResult optimize_threshold(std::span<const ExclusivityScore> scores, const LabelSet& ground_truth) {
  std::vector<LabeledScore> samples;
  for (const auto& s : scores) {
    const auto* label = ground_truth.find(s.contract);
    if (label != nullptr && label->known_eof) samples.push_back({s.total, *label->known_eof});
  }
  return optimize_threshold(samples);
}

std::vector<Address> classify_eof(std::span<const ExclusivityScore> scores, double tau) {
  std::vector<Address> out;
  for (const auto& s : scores) {
    if (s.total > tau) out.push_back(s.contract);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace flowscope
