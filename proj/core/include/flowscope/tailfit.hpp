#pragma once

#include <cstddef>
#include <span>

namespace flowscope {

struct TailFit {
  double alpha = 0.0;
  double x_min = 0.0;
  double ks_statistic = 0.0;  // D over samples >= x_min
  std::size_t tail_count = 0;
  std::size_t sample_count = 0;
};

inline constexpr std::size_t kMinTailSamples = 10;

// Continuous power-law MLE, alpha = 1 + n / sum ln(x_i / x_min), with x_min
// chosen among the distinct sample values to minimize the KS distance
// (ties keep the smaller x_min). Samples must be positive.
// Throws Error{tailfit.InsufficientTail} if no candidate leaves at least
// `min_tail` samples with a non-degenerate log sum.
TailFit fit_power_law(std::span<const double> samples, std::size_t min_tail = kMinTailSamples);

// MLE and KS distance at a fixed x_min.
TailFit fit_power_law_at(std::span<const double> samples, double x_min);

// max_i max(|(i+1)/n - F(x_i)|, |i/n - F(x_i)|) for ascending `tail`, with
// F(x) = 1 - (x / x_min)^(1 - alpha).
double ks_distance(std::span<const double> sorted_tail, double alpha, double x_min);

// Fraction of the total held by the k largest values (1 when k >= size).
double concentration_summary(std::span<const double> values, std::size_t k);

}  // namespace flowscope
