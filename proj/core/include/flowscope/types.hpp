#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace flowscope {

// Fixed-width byte identifier rendered as 0x-prefixed lowercase hex.
template <std::size_t N>
class FixedBytes {
 public:
  static constexpr std::size_t kSize = N;

  constexpr FixedBytes() = default;
  explicit constexpr FixedBytes(const std::array<std::uint8_t, N>& bytes) : bytes_(bytes) {}

  // Accepts "0x"-prefixed or bare hex of exactly 2*N digits, any case.
  static FixedBytes from_hex(std::string_view text);
  static bool try_from_hex(std::string_view text, FixedBytes& out) noexcept;

  std::string hex() const;
  const std::array<std::uint8_t, N>& bytes() const noexcept { return bytes_; }
  std::array<std::uint8_t, N>& bytes() noexcept { return bytes_; }

  auto operator<=>(const FixedBytes&) const = default;

 private:
  std::array<std::uint8_t, N> bytes_{};
};

using Address = FixedBytes<20>;
using TxHash = FixedBytes<32>;

extern template class FixedBytes<20>;
extern template class FixedBytes<32>;

// Signed wei amount. 128 bits: cumulative bribes routinely exceed 2^63 wei.
class Wei {
 public:
  using rep = __int128;

  constexpr Wei() = default;
  constexpr explicit Wei(rep v) : value_(v) {}

  static Wei parse(std::string_view decimal);
  static bool try_parse(std::string_view decimal, Wei& out) noexcept;
  // Rounds to the nearest wei.
  static Wei from_eth(double eth);

  constexpr rep value() const noexcept { return value_; }
  std::string str() const;
  double eth() const noexcept;
  long double ld() const noexcept { return static_cast<long double>(value_); }

  constexpr Wei positive_part() const noexcept { return Wei{value_ > 0 ? value_ : 0}; }

  constexpr Wei& operator+=(Wei o) noexcept { value_ += o.value_; return *this; }
  constexpr Wei& operator-=(Wei o) noexcept { value_ -= o.value_; return *this; }
  friend constexpr Wei operator+(Wei a, Wei b) noexcept { return Wei{a.value_ + b.value_}; }
  friend constexpr Wei operator-(Wei a, Wei b) noexcept { return Wei{a.value_ - b.value_}; }
  friend constexpr Wei operator-(Wei a) noexcept { return Wei{-a.value_}; }
  friend constexpr Wei operator*(Wei a, rep k) noexcept { return Wei{a.value_ * k}; }
  friend constexpr bool operator==(Wei a, Wei b) noexcept = default;
  friend constexpr auto operator<=>(Wei a, Wei b) noexcept { return a.value_ <=> b.value_; }

 private:
  rep value_ = 0;
};

inline constexpr Wei::rep kWeiPerEth = 1'000'000'000'000'000'000;

// Dense builder handle; index into BuilderRegistry::names(). 0 is the proposer.
using BuilderId = std::uint32_t;
inline constexpr BuilderId kProposer = 0;
inline constexpr std::string_view kProposerName = "proposer";

enum class MevLabel : std::uint8_t { none, sandwich, atomic_arb, liquidation, frontrun, backrun };

std::string_view to_string(MevLabel label) noexcept;
bool parse_mev_label(std::string_view text, MevLabel& out) noexcept;

struct AddressHash {
  std::size_t operator()(const Address& a) const noexcept;
};

}  // namespace flowscope
