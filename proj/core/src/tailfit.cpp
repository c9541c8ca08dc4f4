#include "flowscope/tailfit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "flowscope/error.hpp"
#include "flowscope/parallel.hpp"

namespace flowscope {

namespace {

std::vector<double> sorted_positive(std::span<const double> samples) {
  std::vector<double> x(samples.begin(), samples.end());
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error("tailfit", Errc::InvalidArgument, "power-law samples must be positive and finite");
    }
  }
  std::sort(x.begin(), x.end());
  return x;
}

// KS distance of the tail x[first..] given precomputed logs.
double ks_from_logs(std::span<const double> logs, std::size_t first, double alpha) {
  const double m = static_cast<double>(logs.size() - first);
  const double base = logs[first];
  double d = 0.0;
  for (std::size_t k = first; k < logs.size(); ++k) {
    const double fitted = -std::expm1((1.0 - alpha) * (logs[k] - base));
    const double below = static_cast<double>(k - first) / m;
    const double above = static_cast<double>(k - first + 1) / m;
    d = std::max({d, std::abs(above - fitted), std::abs(fitted - below)});
  }
  return d;
}

}  // namespace

double ks_distance(std::span<const double> sorted_tail, double alpha, double x_min) {
  std::vector<double> logs;
  logs.reserve(sorted_tail.size() + 1);
  logs.push_back(std::log(x_min));
  for (double v : sorted_tail) logs.push_back(std::log(v));
  // Evaluate against x_min's log but skip it as a sample.
  const double m = static_cast<double>(sorted_tail.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted_tail.size(); ++k) {
    const double fitted = -std::expm1((1.0 - alpha) * (logs[k + 1] - logs[0]));
    d = std::max({d, std::abs(static_cast<double>(k + 1) / m - fitted), std::abs(fitted - static_cast<double>(k) / m)});
  }
  return d;
}

TailFit fit_power_law_at(std::span<const double> samples, double x_min) {
  if (!(x_min > 0.0)) throw Error("tailfit", Errc::InvalidArgument, "x_min must be positive");
  const auto x = sorted_positive(samples);
  auto first = std::lower_bound(x.begin(), x.end(), x_min);
  std::span<const double> tail(&*first, static_cast<std::size_t>(x.end() - first));
  if (first == x.end()) throw Error("tailfit", Errc::InsufficientTail, "no samples at or above x_min");
  long double sum_log = 0.0L;
  for (double v : tail) sum_log += std::log(static_cast<long double>(v) / x_min);
  if (sum_log <= 0.0L) throw Error("tailfit", Errc::InsufficientTail, "degenerate tail: every sample equals x_min");
  TailFit fit;
  fit.x_min = x_min;
  fit.tail_count = tail.size();
  fit.sample_count = x.size();
  fit.alpha = 1.0 + static_cast<double>(static_cast<long double>(tail.size()) / sum_log);
  fit.ks_statistic = ks_distance(tail, fit.alpha, x_min);
  return fit;
}

TailFit fit_power_law(std::span<const double> samples, std::size_t min_tail) {
  const auto x = sorted_positive(samples);
  const std::size_t n = x.size();
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) logs[i] = std::log(x[i]);
  std::vector<long double> suffix(n + 1, 0.0L);
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + logs[i];

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n && n - i >= min_tail; ++i) {
    if (i == 0 || x[i] != x[i - 1]) candidates.push_back(i);
  }

  constexpr double kInvalid = std::numeric_limits<double>::infinity();
  std::vector<double> alpha(candidates.size(), 0.0);
  std::vector<double> dist(candidates.size(), kInvalid);
  parallel_for(candidates.size(), [&](std::size_t c) {
    const auto i = candidates[c];
    const auto m = static_cast<long double>(n - i);
    const long double sum_log = suffix[i] - m * logs[i];
    if (sum_log <= 0.0L) return;
    alpha[c] = 1.0 + static_cast<double>(m / sum_log);
    dist[c] = ks_from_logs(logs, i, alpha[c]);
  });

  std::size_t best = candidates.size();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (dist[c] == kInvalid) continue;
    if (best == candidates.size() || dist[c] < dist[best]) best = c;
  }
  if (best == candidates.size()) {
    throw Error("tailfit", Errc::InsufficientTail,
                "no x_min leaves " + std::to_string(min_tail) + " samples with a non-degenerate tail");
  }
  TailFit fit;
  fit.alpha = alpha[best];
  fit.x_min = x[candidates[best]];
  fit.ks_statistic = dist[best];
  fit.tail_count = n - candidates[best];
  fit.sample_count = n;
  return fit;
}

double concentration_summary(std::span<const double> values, std::size_t k) {
  if (values.empty()) throw Error("tailfit", Errc::InvalidArgument, "concentration of an empty set");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end(), std::greater<>());
  long double total = 0.0L;
  for (double x : v) total += x;
  if (total <= 0.0L) throw Error("tailfit", Errc::InvalidArgument, "values sum to zero");
  long double top = 0.0L;
  for (std::size_t i = 0; i < std::min(k, v.size()); ++i) top += v[i];
  return k >= v.size() ? 1.0 : static_cast<double>(top / total);
}

}  // namespace flowscope
