#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <fstream>

#include "fixtures.hpp"
#include "flowscope/concentration.hpp"
#include "flowscope/error.hpp"
#include "flowscope/rng.hpp"

namespace flowscope {
namespace {

using namespace flowscope::testing;
using Big = boost::multiprecision::cpp_dec_float_50;

TEST(Hhi, Cases) {
  EXPECT_EQ(hhi(std::vector<double>{1.0}), 1.0);
  EXPECT_DOUBLE_EQ(hhi(std::vector<double>{0.5, 0.5}), 0.5);
  EXPECT_DOUBLE_EQ(hhi(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 0.25);
  EXPECT_DOUBLE_EQ(hhi(std::vector<double>{0.7, 0.2, 0.1}), 0.54);
  EXPECT_EQ(hhi(std::vector<double>{}), 0.0);
}

TEST(Hhi, BoundsOnRandomMarkets) {
  Rng r(5);
  for (int k = 0; k < 200; ++k) {
    const auto n = static_cast<std::size_t>(r.uniform_int(1, 30));
    std::vector<double> s(n);
    double sum = 0;
    for (auto& x : s) sum += (x = r.uniform(0.001, 1));
    for (auto& x : s) x /= sum;
    const double h = hhi(s);
    EXPECT_GE(h, 1.0 / static_cast<double>(n) - 1e-12);
    EXPECT_LE(h, 1.0 + 1e-12);
  }
}

TEST(Hhi, AddressesOfOneBuilderAreMerged) {
  // Builder "x" owns two fee recipients; "y" one. Blocks: x,x,y,y with one
  // address each for x.
  const std::vector<BuilderRegistry::Entry> entries = {
      {addr(1), "x", "X"}, {addr(2), "x", "X"}, {addr(3), "y", "Y"}};
  std::vector<BlockRecord> blocks(4);
  const Address recipients[] = {addr(1), addr(2), addr(3), addr(3)};
  for (std::size_t i = 0; i < 4; ++i) {
    blocks[i].number = i + 1;
    blocks[i].timestamp = static_cast<std::int64_t>(i);
    blocks[i].fee_recipient = recipients[i];
  }
  const auto ds = make_dataset(blocks, {}, {}, BuilderRegistry(entries));
  const auto series = hhi_series(ds);
  ASSERT_EQ(series.size(), 1u);
  EXPECT_DOUBLE_EQ(series[0].hhi, 0.5);  // not 0.375
  EXPECT_EQ(series[0].blocks, 4u);
}

TEST(Hhi, MonopolyWeekAndProposerBlocks) {
  DatasetBuilder b;
  for (std::uint64_t i = 0; i < 5; ++i) b.block(i + 1, static_cast<std::int64_t>(i), 1);
  for (std::uint64_t i = 0; i < 4; ++i) b.block(i + 6, kSecondsPerWeek + static_cast<std::int64_t>(i), i < 2 ? 0 : 2);
  const auto series = hhi_series(b.build());
  ASSERT_EQ(series.size(), 2u);
  EXPECT_EQ(series[0].hhi, 1.0);
  // Each unregistered block is the proposer pseudo-builder: shares 1/2, 1/2.
  EXPECT_DOUBLE_EQ(series[1].hhi, 0.5);
  EXPECT_EQ(series[1].start, kSecondsPerWeek);
}

TEST(Categorize, Boundaries) {
  EXPECT_EQ(categorize_peak(0.5000001), BuilderCategory::dominant);
  EXPECT_EQ(categorize_peak(0.5), BuilderCategory::influential);
  EXPECT_EQ(categorize_peak(0.1000001), BuilderCategory::influential);
  EXPECT_EQ(categorize_peak(0.1), BuilderCategory::niche);
  EXPECT_EQ(categorize_peak(0.0), BuilderCategory::niche);
  EXPECT_EQ(to_string(BuilderCategory::dominant), "dominant");
}

TEST(Categorize, UsesWeeklyPeak) {
  const auto& ds = fixture_dataset("standard");
  const auto peaks = categorize_builders(ds);
  ASSERT_EQ(peaks.size(), ds.registry().size() - 1);
  for (const auto& p : peaks) {
    EXPECT_NE(p.builder, kProposer);
    EXPECT_EQ(p.category, categorize_peak(p.peak_share));
  }
}

double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  Big mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += Big(x[i]);
    my += Big(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  Big sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (Big(x[i]) - mx) * (Big(x[i]) - mx);
    syy += (Big(y[i]) - my) * (Big(y[i]) - my);
    sxy += (Big(x[i]) - mx) * (Big(y[i]) - my);
  }
  return Big(sxy / boost::multiprecision::sqrt(sxx * syy)).convert_to<double>();
}

TEST(Pearson, MatchesHighPrecisionOracle) {
  Rng r(8);
  for (int k = 0; k < 300; ++k) {
    const auto n = static_cast<std::size_t>(r.uniform_int(2, 200));
    std::vector<double> x(n), y(n);
    const double rho = r.uniform(-1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = r.uniform(0, 1);
      y[i] = rho * x[i] + r.uniform(0, 0.5);
    }
    const auto got = pearson(x, y);
    ASSERT_TRUE(got.has_value());
    EXPECT_NEAR(*got, pearson_oracle(x, y), 1e-12);
  }
}

TEST(Pearson, AffineInvariance) {
  Rng r(9);
  std::vector<double> x(50), y(50), ax(50), ay(50);
  for (std::size_t i = 0; i < 50; ++i) {
    x[i] = r.uniform(0, 1);
    y[i] = x[i] * x[i] + r.uniform(0, 0.1);
    ax[i] = 3.5 * x[i] + 100;
    ay[i] = -0.25 * y[i] - 7;
  }
  EXPECT_NEAR(*pearson(ax, ay), -*pearson(x, y), 1e-12);
  EXPECT_NEAR(*pearson(x, x), 1.0, 1e-15);
}

TEST(Pearson, DegenerateInputs) {
  EXPECT_FALSE(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}).has_value());
  EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}), Error);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1}), Error);
}

TEST(Phases, DatesAndBoundaries) {
  EXPECT_EQ(parse_date("1970-01-01"), 0);
  EXPECT_EQ(parse_date("2023-01-02"), 1672617600);
  EXPECT_EQ(format_date(1672617600 + 3600), "2023-01-02");
  EXPECT_THROW(parse_date("2023-13-01"), Error);
  EXPECT_THROW(parse_date("2023/01/01"), Error);
  const auto d = default_phases();
  ASSERT_EQ(d.size(), 4u);
  EXPECT_EQ(format_date(d[0].start), "2022-09-01");
  EXPECT_EQ(d[0].end, d[1].start);
  EXPECT_EQ(format_date(d[3].end), "2025-08-31");
  const std::int64_t bad[] = {10, 5};
  EXPECT_THROW(phases_from_boundaries(bad), Error);
}

TEST(Phases, LoadBothTomlShapes) {
  const auto dir = scratch("phases");
  {
    std::ofstream(dir / "a.toml") << "boundaries = [\"2023-01-01\", \"2023-02-01\", \"2023-03-01\"]\n"
                                     "names = [\"early\", \"late\"]\n";
    std::ofstream(dir / "b.toml") << "[[phase]]\nname = \"only\"\nstart = \"2023-01-01\"\nend = 2023-02-01\n";
    std::ofstream(dir / "c.toml") << "nothing = 1\n";
  }
  const auto a = load_phases(dir / "a.toml");
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].name, "late");
  EXPECT_EQ(a[1].start, parse_date("2023-02-01"));
  const auto b = load_phases(dir / "b.toml");
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].end, parse_date("2023-02-01"));
  EXPECT_THROW(load_phases(dir / "c.toml"), Error);
  EXPECT_THROW(load_phases(dir / "missing.toml"), Error);
  EXPECT_EQ(load_phases(data_dir() / "phases.toml").size(), 4u);
}

std::map<Address, Category> planted_mechanisms(const Manifest& m) {
  std::map<Address, Category> out;
  for (const auto& f : m.flows) out[f.contract] = *category_of(f.mechanism);
  return out;
}

TEST(Composition, MatchesPlantedBudgetsExactly) {
  const auto& ds = fixture_dataset("phases");
  const auto& m = fixture_manifest("phases");
  ASSERT_EQ(m.phases.size(), 4u);
  std::vector<Phase> phases;
  for (const auto& p : m.phases) phases.push_back({p.name, p.start, p.end});
  const auto comp = phase_composition(ds, planted_mechanisms(m), phases);
  for (std::size_t i = 0; i < comp.size(); ++i) {
    EXPECT_EQ(comp[i].bribe, m.phases[i].bribe) << i;
    EXPECT_EQ(comp[i].total, m.phases[i].total);
    double sum = 0;
    for (double f : comp[i].fraction) sum += f;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Composition, EmptyPhase) {
  const auto& ds = fixture_dataset("phases");
  const Phase before{"before", 0, 86400};
  try {
    compose_phase(ds, planted_mechanisms(fixture_manifest("phases")), before);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.qualified_code(), "concentration.EmptyPhase");
  }
}

TEST(Correlation, DailyShareAgainstEofRatio) {
  // Three days; builder 1 holds 1/4, 2/4, 3/4 of the blocks and its EOF
  // bribes are 10%, 20%, 30% of the day's trading revenue.
  DatasetBuilder b;
  std::uint64_t n = 1;
  for (int day = 0; day < 3; ++day) {
    for (int k = 0; k < 4; ++k) {
      const unsigned builder = k <= day ? 1 : 2;
      b.block(n, day * kSecondsPerDay + k, builder);
      b.tx(n, addr(k <= day && k == 0 ? 50 : 60), gwei(k == 0 ? (day + 1) * 10 : 30));
      ++n;
    }
  }
  const auto ds = b.build();
  const auto r = eof_share_correlation(ds, {addr(50)}, 1);
  EXPECT_EQ(r.days, 3u);
  EXPECT_EQ(r.active_days, 3u);
  ASSERT_TRUE(r.r.has_value());
  EXPECT_GT(*r.r, 0.99);
  EXPECT_EQ(r.share, (std::vector<double>{0.25, 0.5, 0.75}));
}

TEST(Correlation, InsufficientDays) {
  DatasetBuilder b;
  b.block(1, 0, 1);
  b.block(2, kSecondsPerDay, 1);
  b.block(3, 2 * kSecondsPerDay, 2);
  b.tx(1, addr(50), gwei(1));
  const auto ds = b.build();
  try {
    eof_share_correlation(ds, {addr(50)}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.qualified_code(), "concentration.InsufficientDays");
  }
}

TEST(Correlation, ZeroRevenueDaysAreDropped) {
  DatasetBuilder b;
  for (int day = 0; day < 4; ++day) b.block(static_cast<std::uint64_t>(day + 1), day * kSecondsPerDay, 1);
  b.tx(1, addr(50), gwei(1));
  b.tx(2, addr(60), gwei(1));
  const auto ds = b.build();
  const auto r = eof_share_correlation(ds, {addr(50)}, 1);
  EXPECT_EQ(r.dropped_days, 2u);
  EXPECT_EQ(r.days, 2u);
  EXPECT_FALSE(r.r.has_value());  // share is 1 every day
}

}  // namespace
}  // namespace flowscope
