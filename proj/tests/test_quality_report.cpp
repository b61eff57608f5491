#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace physeeio;
using namespace testing_support;

TEST(Coverage, Inventory263) {
  const auto report = classify_coverage(parse_inventory(io::read_csv(fixture("coverage/inventory_263.csv"))));
  const auto& s = report.summary;
  EXPECT_EQ(s.total, 263u);
  EXPECT_EQ(s.good, 48u);
  EXPECT_EQ(s.partial, 6u);
  EXPECT_EQ(s.no_flow, 2u);
  EXPECT_EQ(s.no_data, 207u);
  EXPECT_EQ(s.percent_floor(s.no_data), 78u);
  EXPECT_LT(s.fraction(s.good), 0.20);
  EXPECT_EQ(report.sectors.size(), 263u);
}

TEST(Coverage, EmptyAndSingle) {
  const auto empty = classify_coverage({});
  EXPECT_EQ(empty.summary.total, 0u);
  EXPECT_EQ(empty.summary.percent_floor(empty.summary.good), 0u);
  const auto one = classify_coverage({{SectorId("A"), true, true, true}});
  EXPECT_EQ(one.summary.good, 1u);
  EXPECT_EQ(one.summary.percent_floor(one.summary.good), 100u);
}

TEST(Coverage, Classification) {
  EXPECT_EQ(classify({SectorId("A"), true, true, true}), CoverageClass::GoodData);
  EXPECT_EQ(classify({SectorId("A"), true, false, true}), CoverageClass::PartialData);
  EXPECT_EQ(classify({SectorId("A"), false, false, true}), CoverageClass::NoData);
  EXPECT_EQ(classify({SectorId("A"), true, true, false}), CoverageClass::NoPhysicalFlow);
  EXPECT_THROW(classify_coverage({{SectorId("A")}, {SectorId("A")}}), Error);
}

TEST(Coverage, CountsSumToTotal) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<InventoryEntry> inv;
    const int n = static_cast<int>(rng() % 300);
    for (int i = 0; i < n; ++i) {
      inv.push_back({SectorId("S" + std::to_string(i)), rng() % 2 == 0, rng() % 2 == 0, rng() % 10 != 0});
    }
    const auto s = classify_coverage(inv).summary;
    EXPECT_EQ(s.good + s.partial + s.no_data + s.no_flow, s.total);
    EXPECT_EQ(s.total, static_cast<std::size_t>(n));
  }
}

TEST(PercentDifference, Examples) {
  EXPECT_EQ(percent_difference(42.0, 42.0), 0.0);
  EXPECT_NEAR(percent_difference(100.0, 50.0), 66.67, 0.01);
  EXPECT_NEAR(percent_difference(100.0, 120.0), 18.18, 0.01);
  try {
    percent_difference(0.0, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveMass);
  }
}

TEST(PercentDifference, SymmetryAndScaleInvariance) {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> mag(-6.0, 12.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = std::pow(10.0, mag(rng));
    const double b = std::pow(10.0, mag(rng));
    const double k = std::pow(10.0, mag(rng) / 2.0);
    EXPECT_EQ(percent_difference(a, b), percent_difference(b, a));
    EXPECT_NEAR(percent_difference(k * a, k * b), percent_difference(a, b), 1e-12 * 200.0);
    EXPECT_GE(percent_difference(a, b), 0.0);
    // saturates to 200 in double precision once a/b passes ~1e16
    EXPECT_LE(percent_difference(a, b), 200.0);
  }
}

TEST(CompareMethods, Examples) {
  const auto r = compare_methods({{SectorId("A"), 100.0}, {SectorId("B"), 100.0}, {SectorId("C"), 5.0}},
                                 {{SectorId("A"), 120.0}, {SectorId("B"), 2000.0}, {SectorId("D"), 9.0}});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_NEAR(r.rows[0].pct_difference, 18.18, 0.01);
  EXPECT_FALSE(r.rows[0].magnitude_mismatch);
  EXPECT_TRUE(r.rows[1].magnitude_mismatch);
  ASSERT_EQ(r.not_comparable.size(), 2u);
  EXPECT_EQ(r.not_comparable[0].code, "C");
  EXPECT_EQ(r.not_comparable[1].code, "D");
  ASSERT_TRUE(r.min_pct && r.max_pct);
  EXPECT_EQ(*r.min_pct, r.rows[0].pct_difference);
  EXPECT_EQ(*r.max_pct, r.rows[1].pct_difference);

  const auto disjoint = compare_methods({{SectorId("A"), 1.0}}, {{SectorId("B"), 1.0}});
  EXPECT_TRUE(disjoint.rows.empty());
  EXPECT_EQ(disjoint.not_comparable.size(), 2u);
  EXPECT_FALSE(disjoint.min_pct);
}

TEST(CompareMethods, MagnitudeFlag) {
  EXPECT_TRUE(magnitude_differs(100.0, 2000.0));
  EXPECT_FALSE(magnitude_differs(100.0, 999.0));
  EXPECT_TRUE(magnitude_differs(99.0, 100.0));
}
