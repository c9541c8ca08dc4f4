#include "flowscope/types.hpp"

#include <cmath>
#include <limits>

#include "flowscope/error.hpp"

namespace flowscope {

namespace {

int hex_value(char c) noexcept {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

constexpr std::string_view kMevLabelNames[] = {"none",        "sandwich", "atomic_arb",
                                               "liquidation", "frontrun", "backrun"};

}  // namespace

template <std::size_t N>
bool FixedBytes<N>::try_from_hex(std::string_view text, FixedBytes& out) noexcept {
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text.remove_prefix(2);
  if (text.size() != 2 * N) return false;
  for (std::size_t i = 0; i < N; ++i) {
    const int hi = hex_value(text[2 * i]);
    const int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    out.bytes_[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return true;
}

template <std::size_t N>
FixedBytes<N> FixedBytes<N>::from_hex(std::string_view text) {
  FixedBytes out;
  if (!try_from_hex(text, out)) {
    throw Error("types", Errc::InvalidArgument,
                "expected " + std::to_string(2 * N) + " hex digits, got '" + std::string(text) + "'");
  }
  return out;
}

template <std::size_t N>
std::string FixedBytes<N>::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(2 + 2 * N);
  s += "0x";
  for (auto b : bytes_) {
    s += kDigits[b >> 4];
    s += kDigits[b & 0xF];
  }
  return s;
}

template class FixedBytes<20>;
template class FixedBytes<32>;

bool Wei::try_parse(std::string_view text, Wei& out) noexcept {
  if (text.empty()) return false;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty() || text.size() > 38) return false;
  rep v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = Wei{negative ? -v : v};
  return true;
}

Wei Wei::parse(std::string_view text) {
  Wei w;
  if (!try_parse(text, w)) {
    throw Error("types", Errc::InvalidArgument, "not an integer wei amount: '" + std::string(text) + "'");
  }
  return w;
}

Wei Wei::from_eth(double eth) {
  const long double wei = std::round(static_cast<long double>(eth) * 1e18L);
  return Wei{static_cast<rep>(wei)};
}

std::string Wei::str() const {
  if (value_ == 0) return "0";
  rep v = value_;
  const bool negative = v < 0;
  std::string digits;
  while (v != 0) {
    int d = static_cast<int>(v % 10);
    digits += static_cast<char>('0' + (d < 0 ? -d : d));
    v /= 10;
  }
  if (negative) digits += '-';
  return {digits.rbegin(), digits.rend()};
}

double Wei::eth() const noexcept {
  // Split to keep full precision for values far beyond 2^64.
  const rep whole = value_ / kWeiPerEth;
  const rep frac = value_ % kWeiPerEth;
  return static_cast<double>(static_cast<long double>(whole) + static_cast<long double>(frac) / 1e18L);
}

std::string_view to_string(MevLabel label) noexcept {
  return kMevLabelNames[static_cast<std::size_t>(label)];
}

bool parse_mev_label(std::string_view text, MevLabel& out) noexcept {
  for (std::size_t i = 0; i < std::size(kMevLabelNames); ++i) {
    if (kMevLabelNames[i] == text) {
      out = static_cast<MevLabel>(i);
      return true;
    }
  }
  return false;
}

std::size_t AddressHash::operator()(const Address& a) const noexcept {
  // FNV-1a; addresses are already uniformly distributed.
  std::uint64_t h = 1469598103934665603ULL;
  for (auto b : a.bytes()) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::MissingFile: return "MissingFile";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::UnknownBlock: return "UnknownBlock";
    case Errc::EmptyEpoch: return "EmptyEpoch";
    case Errc::SupportViolation: return "SupportViolation";
    case Errc::DegenerateGroundTruth: return "DegenerateGroundTruth";
    case Errc::NoBlocks: return "NoBlocks";
    case Errc::UnknownContract: return "UnknownContract";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::SingleClassData: return "SingleClassData";
    case Errc::EmptyPhase: return "EmptyPhase";
    case Errc::InsufficientDays: return "InsufficientDays";
    case Errc::ConstantSeries: return "ConstantSeries";
    case Errc::InsufficientTail: return "InsufficientTail";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(std::string_view module, Errc code, const std::string& message)
    : std::runtime_error(message), module_(module), code_(code) {}

std::string Error::qualified_code() const { return module_ + "." + std::string(to_string(code_)); }

SchemaError::SchemaError(std::string file, std::size_t line, std::string field, const std::string& detail)
    : Error("ingest", Errc::SchemaViolation,
            file + ":" + std::to_string(line) + ": field '" + field + "': " + detail),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

}  // namespace flowscope
