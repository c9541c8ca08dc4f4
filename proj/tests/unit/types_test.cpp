#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "flowscope/digest.hpp"
#include "flowscope/error.hpp"
#include "flowscope/rng.hpp"
#include "flowscope/types.hpp"

namespace flowscope {
namespace {

TEST(Wei, ParsesAndPrintsLargeValues) {
  const auto w = Wei::parse("123456789012345678901234567");
  EXPECT_EQ(w.str(), "123456789012345678901234567");
  EXPECT_EQ(Wei::parse("-42").str(), "-42");
  EXPECT_EQ(Wei{}.str(), "0");
}

TEST(Wei, RejectsGarbage) {
  Wei out;
  EXPECT_FALSE(Wei::try_parse("", out));
  EXPECT_FALSE(Wei::try_parse("1.5", out));
  EXPECT_FALSE(Wei::try_parse("12a", out));
  EXPECT_THROW(Wei::parse("abc"), Error);
}

TEST(Wei, PositivePartAndArithmetic) {
  EXPECT_EQ(Wei{-5}.positive_part(), Wei{0});
  EXPECT_EQ(Wei{7}.positive_part(), Wei{7});
  EXPECT_EQ(Wei{3} + Wei{-5}, Wei{-2});
  EXPECT_EQ(Wei::from_eth(1.5).value(), 1'500'000'000'000'000'000);
  EXPECT_DOUBLE_EQ(Wei{kWeiPerEth}.eth(), 1.0);
}

TEST(FixedBytes, HexRoundTrip) {
  const std::string text = "0x00112233445566778899aabbccddeeff00112233";
  EXPECT_EQ(Address::from_hex(text).hex(), text);
  EXPECT_EQ(Address::from_hex("00112233445566778899AABBCCDDEEFF00112233").hex(), text);
  Address a;
  EXPECT_FALSE(Address::try_from_hex("0x1234", a));
  EXPECT_FALSE(Address::try_from_hex("0xzz112233445566778899aabbccddeeff00112233", a));
}

TEST(MevLabel, RoundTrip) {
  for (auto l : {MevLabel::none, MevLabel::sandwich, MevLabel::atomic_arb, MevLabel::liquidation, MevLabel::frontrun,
                 MevLabel::backrun}) {
    MevLabel out;
    ASSERT_TRUE(parse_mev_label(to_string(l), out));
    EXPECT_EQ(out, l);
  }
}

TEST(Error, QualifiedCode) {
  const Error e("exclusivity", Errc::SupportViolation, "x");
  EXPECT_EQ(e.qualified_code(), "exclusivity.SupportViolation");
  const SchemaError s("txs.jsonl", 3, "index", "dup");
  EXPECT_EQ(s.qualified_code(), "ingest.SchemaViolation");
  EXPECT_EQ(s.line(), 3u);
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Rng, EngineMatchesTheStandardSequence) {
  // [rand.predef]: the 10000th output of a default-constructed mt19937_64.
  std::mt19937_64 e;
  e.discard(9999);
  EXPECT_EQ(e(), 9981545732273789042ULL);
}

TEST(Rng, StreamsAreReproducibleAndIndependent) {
  Rng a(1, Rng::tag("flow:x"), 3);
  Rng b(1, Rng::tag("flow:x"), 3);
  Rng c(1, Rng::tag("flow:x"), 4);
  Rng d(2, Rng::tag("flow:x"), 3);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 16; ++i) {
    va.push_back(a.next());
    vb.push_back(b.next());
    vc.push_back(c.next());
    vd.push_back(d.next());
  }
  EXPECT_EQ(va, vb);
  EXPECT_NE(va, vc);
  EXPECT_NE(va, vd);
  EXPECT_NE(Rng::tag("a"), Rng::tag("b"));
}

TEST(Rng, DrawsStayInRange) {
  Rng r(99);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.below(7), 7u);
    const auto k = r.uniform_int(-2, 2);
    ASSERT_GE(k, -2);
    ASSERT_LE(k, 2);
    seen.insert(k);
    const double l = r.log_uniform(0.01, 10.0);
    ASSERT_GE(l, 0.01 * (1 - 1e-12));
    ASSERT_LE(l, 10.0 * (1 + 1e-12));
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Rng, BelowIsRoughlyUniform) {
  Rng r(5);
  std::array<int, 6> counts{};
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[r.below(6)];
  for (int c : counts) EXPECT_NEAR(c, n / 6, 5 * std::sqrt(n / 6.0));
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng r(11);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  r.shuffle(std::span<int>(w));
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

}  // namespace
}  // namespace flowscope
