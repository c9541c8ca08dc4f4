#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace flowscope {

// Seedable generator with portable draws.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The std:: distribution classes are implementation-defined, so all
// draws go through the helpers below, which only depend on raw engine output.
// Streams are split by feeding (seed, stream tag, index) into std::seed_seq,
// which is also fully specified; a flow's draws therefore do not depend on how
// many other flows were generated before it.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, 0, 0) {}
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

  // 64-bit FNV-1a of a stream name.
  static std::uint64_t tag(std::string_view name) noexcept;

  std::uint64_t next() { return engine_(); }

  // [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Uniform on [0, n); unbiased via rejection.
  std::uint64_t below(std::uint64_t n);
  // Uniform on [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p) { return uniform01() < p; }
  // exp(uniform(log lo, log hi)); lo, hi > 0.
  double log_uniform(double lo, double hi);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace flowscope
