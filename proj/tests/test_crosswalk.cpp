#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace physeeio;
using namespace testing_support;

namespace {

Decimal dec(const std::string& s) {
  Decimal d;
  EXPECT_TRUE(Decimal::parse(s, d)) << s;
  return d;
}

Concordance hs_fixture(const std::string& name) {
  return parse_concordance(fixture("crosswalk/" + name), ConcordanceKind::HsToNaics);
}

Concordance bea_fixture() { return parse_concordance(fixture("crosswalk/naics_bea.csv"), ConcordanceKind::NaicsToBea); }

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ConfigError;
}

Concordance concordance(ConcordanceKind kind, std::map<std::string, std::vector<std::string>> m) {
  Concordance c;
  c.kind = kind;
  for (auto& [src, dsts] : m) {
    for (auto& d : dsts) c.entries[src].push_back({d, std::nullopt});
  }
  return c;
}

}  // namespace

TEST(Codes, Validation) {
  EXPECT_TRUE(HsCode::valid("123456"));
  EXPECT_FALSE(HsCode::valid("12345"));
  EXPECT_FALSE(HsCode::valid("12345a"));
  EXPECT_THROW(HsCode("1234567"), Error);
  for (const char* ok : {"33", "331", "3311", "331110"}) EXPECT_TRUE(NaicsCode::valid(ok)) << ok;
  for (const char* bad : {"3", "33111", "3311100", "33a"}) EXPECT_FALSE(NaicsCode::valid(bad)) << bad;
}

TEST(ParseConcordance, Examples) {
  EXPECT_EQ(hs_fixture("hs_naics_two_rows.csv").size(), 2u);
  EXPECT_EQ(code_of([] { hs_fixture("hs_naics_short_code.csv"); }), ErrorCode::MalformedCode);
  const auto dup = hs_fixture("hs_naics_duplicate.csv");
  EXPECT_EQ(dup.size(), 1u);
  EXPECT_EQ(dup.warnings.size(), 1u);
  EXPECT_EQ(code_of([] { hs_fixture("hs_naics_empty.csv"); }), ErrorCode::EmptyFile);
}

TEST(ParseConcordance, Shares) {
  const auto c = hs_fixture("hs_naics_shares.csv");
  EXPECT_EQ(c.entries.at("111111")[0].share, 0.7);
  EXPECT_EQ(code_of([] { hs_fixture("hs_naics_mixed_shares.csv"); }), ErrorCode::SchemaViolation);
  try {
    hs_fixture("hs_naics_bad_header.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_NE(e.detail().find("source_code,target"), std::string::npos);
    EXPECT_EQ(e.where().line, 1u);
  }
}

TEST(Translate, OneToOne) {
  const auto tr = translate(HsCode("111111"), hs_fixture("hs_naics_two_rows.csv"), bea_fixture());
  ASSERT_EQ(tr.shares.size(), 1u);
  EXPECT_EQ(tr.shares[0].first.code, "22A");
  EXPECT_EQ(tr.shares[0].second, 1.0);
  EXPECT_EQ(tr.unmapped_share, 0.0);
}

TEST(Translate, Unmapped) {
  const auto tr = translate(HsCode("999999"), hs_fixture("hs_naics_two_rows.csv"), bea_fixture());
  EXPECT_TRUE(tr.unmapped());
  EXPECT_EQ(tr.unmapped_share, 1.0);
}

TEST(Translate, TwoSectorSplit) {
  const auto tr = translate(HsCode("333333"), hs_fixture("hs_naics_two_rows.csv"), bea_fixture());
  ASSERT_EQ(tr.shares.size(), 2u);
  EXPECT_EQ(tr.shares[0].second, 0.5);
  EXPECT_EQ(tr.shares[1].second, 0.5);
}

TEST(Translate, EqualSplitOverDistinctTargets) {
  // HS -> two NAICS, one of which maps to two BEA sectors: three BEA targets
  const auto hs = concordance(ConcordanceKind::HsToNaics, {{"100000", {"11", "22"}}});
  const auto nb = concordance(ConcordanceKind::NaicsToBea, {{"11", {"A"}}, {"22", {"B", "C"}}});
  const auto tr = translate(HsCode("100000"), hs, nb);
  ASSERT_EQ(tr.shares.size(), 3u);
  for (const auto& [s, v] : tr.shares) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
}

TEST(Translate, PartialMapping) {
  const auto hs = concordance(ConcordanceKind::HsToNaics, {{"100000", {"11", "99"}}});
  const auto nb = concordance(ConcordanceKind::NaicsToBea, {{"11", {"A"}}});
  const auto tr = translate(HsCode("100000"), hs, nb);
  ASSERT_EQ(tr.shares.size(), 1u);
  EXPECT_EQ(tr.shares[0].second, 0.5);
  EXPECT_EQ(tr.unmapped_share, 0.5);
}

TEST(Translate, ExplicitSharesMultiply) {
  const auto hs = hs_fixture("hs_naics_shares.csv");  // 0.7 -> 222222, 0.3 -> 333333
  Concordance nb;
  nb.kind = ConcordanceKind::NaicsToBea;
  nb.entries["222222"] = {{"X", 0.5}, {"Y", 0.5}};
  nb.entries["333333"] = {{"Y", std::nullopt}};
  const auto tr = translate(HsCode("111111"), hs, nb);
  ASSERT_EQ(tr.shares.size(), 2u);
  EXPECT_DOUBLE_EQ(tr.shares[0].second, 0.35);
  EXPECT_DOUBLE_EQ(tr.shares[1].second, 0.65);
}

TEST(Aggregate, SingleBucket) {
  const Crosswalk cw(hs_fixture("hs_naics_two_rows.csv"), bea_fixture());
  std::vector<TradeRecord> trade{{HsCode("111111"), dec("10.5"), dec("3")},
                                 {HsCode("111111"), dec("20.25"), dec("4")},
                                 {HsCode("111111"), dec("1"), dec("0.001")}};
  const auto r = aggregate(trade, {{HsCode("111111"), dec("2.5")}}, cw);
  ASSERT_EQ(r.aggregates.size(), 1u);
  EXPECT_EQ(r.aggregates[0].sector.code, "22A");
  EXPECT_EQ(r.aggregates[0].cif_total, dec("31.75"));
  EXPECT_EQ(r.aggregates[0].net_weight_total, dec("7.001"));
  EXPECT_EQ(r.aggregates[0].duty_total, dec("2.5"));
}

TEST(Aggregate, HalfSplit) {
  const Crosswalk cw(hs_fixture("hs_naics_two_rows.csv"), bea_fixture());
  const auto r = aggregate({{HsCode("333333"), dec("1000"), dec("300")}}, {}, cw);
  ASSERT_EQ(r.aggregates.size(), 2u);
  EXPECT_EQ(r.aggregates[0].cif_total, dec("500"));
  EXPECT_EQ(r.aggregates[1].cif_total, dec("500"));
  EXPECT_EQ(r.aggregates[0].net_weight_total, dec("150"));
  EXPECT_EQ(r.diagnostics.multi_mapped_codes, 1u);
}

TEST(Aggregate, UnmappedRecord) {
  const Crosswalk cw(hs_fixture("hs_naics_two_rows.csv"), bea_fixture());
  const auto r = aggregate({{HsCode("999999"), dec("12.34"), dec("5")}}, {{HsCode("999999"), dec("1")}}, cw);
  EXPECT_TRUE(r.aggregates.empty());
  EXPECT_EQ(r.diagnostics.unmapped_cif, dec("12.34"));
  EXPECT_EQ(r.diagnostics.unmapped_weight, dec("5"));
  EXPECT_EQ(r.diagnostics.unmapped_duty, dec("1"));
  EXPECT_EQ(r.diagnostics.unmapped_codes.at("999999"), 2u);
  EXPECT_TRUE(aggregate({}, {}, cw).aggregates.empty());
}

TEST(Aggregate, IdempotentOnAggregatedData) {
  const Crosswalk cw(hs_fixture("hs_naics_two_rows.csv"), bea_fixture());
  const auto once = aggregate({{HsCode("111111"), dec("7"), dec("2")}}, {{HsCode("111111"), dec("0.5")}}, cw);
  const auto& a = once.aggregates.at(0);
  const auto twice = aggregate({{HsCode("111111"), a.cif_total, a.net_weight_total}},
                               {{HsCode("111111"), a.duty_total}}, cw);
  EXPECT_EQ(twice.aggregates.at(0).cif_total, a.cif_total);
  EXPECT_EQ(twice.aggregates.at(0).net_weight_total, a.net_weight_total);
  EXPECT_EQ(twice.aggregates.at(0).duty_total, a.duty_total);
}

TEST(Decimals, ParseAndSplit) {
  EXPECT_EQ(dec("1.5e3"), dec("1500"));
  EXPECT_EQ(dec("0.0000005"), Decimal::from_units(0));  // half to even
  EXPECT_EQ(dec("0.0000015"), Decimal::from_units(2));
  EXPECT_EQ(dec("12.340").to_string(), "12.34");
  Decimal d;
  EXPECT_FALSE(Decimal::parse("1.2.3", d));
  EXPECT_FALSE(Decimal::parse("", d));
  EXPECT_FALSE(Decimal::parse("1e", d));
  const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto parts = split_exact(dec("1"), thirds);
  EXPECT_EQ(parts[0] + parts[1] + parts[2], dec("1"));
}

TEST(ParseRecords, NegativeWeightRejectedAtRow) {
  const auto t = io::parse_csv_text("hs_code,cif_usd,net_weight_kg\n111111,10,5\n222222,3,-1\n", "trade.csv");
  try {
    parse_trade_records(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_EQ(e.where().line, 3u);
    EXPECT_EQ(e.where().column, 3u);
  }
}

namespace {

struct RandomCase {
  Concordance hs, nb;
  std::vector<TradeRecord> trade;
  std::vector<DutyRecord> duty;
};

RandomCase random_case(std::mt19937_64& rng) {
  RandomCase c;
  c.hs.kind = ConcordanceKind::HsToNaics;
  c.nb.kind = ConcordanceKind::NaicsToBea;
  const int codes = 1 + static_cast<int>(rng() % 30);
  std::vector<std::string> naics{"11", "21", "311", "3312", "331110", "332", "333"};
  for (int k = 0; k < codes; ++k) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06d", 100000 + k);
    if (rng() % 8 == 0) continue;  // unmapped
    const int fan = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < fan; ++f) {
      const auto& n = naics[rng() % naics.size()];
      auto& v = c.hs.entries[buf];
      if (std::none_of(v.begin(), v.end(), [&](const auto& t) { return t.code == n; })) v.push_back({n, std::nullopt});
    }
  }
  for (const auto& n : naics) {
    if (rng() % 6 == 0) continue;  // dangling NAICS
    const int fan = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < fan; ++f) {
      const std::string b = "B" + std::to_string(rng() % 6);
      auto& v = c.nb.entries[n];
      if (std::none_of(v.begin(), v.end(), [&](const auto& t) { return t.code == b; })) v.push_back({b, std::nullopt});
    }
  }
  const int records = static_cast<int>(rng() % 200);
  for (int r = 0; r < records; ++r) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%06d", 100000 + static_cast<int>(rng() % codes));
    const auto amount = [&] { return Decimal::from_units(static_cast<Decimal::Rep>(rng() % 10'000'000'000ULL)); };
    c.trade.push_back({HsCode(buf), amount(), amount()});
    if (rng() % 2) c.duty.push_back({HsCode(buf), amount()});
  }
  return c;
}

}  // namespace

TEST(Properties, ConservationOrderAndThreadIndependence) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = random_case(rng);
    const Crosswalk cw(c.hs, c.nb);
    const auto a = aggregate(c.trade, c.duty, cw, 1);
    Decimal cif = a.diagnostics.unmapped_cif, w = a.diagnostics.unmapped_weight, d = a.diagnostics.unmapped_duty;
    for (const auto& g : a.aggregates) {
      cif += g.cif_total;
      w += g.net_weight_total;
      d += g.duty_total;
    }
    EXPECT_EQ(cif, a.diagnostics.input_cif);
    EXPECT_EQ(w, a.diagnostics.input_weight);
    EXPECT_EQ(d, a.diagnostics.input_duty);

    std::shuffle(c.trade.begin(), c.trade.end(), rng);
    std::shuffle(c.duty.begin(), c.duty.end(), rng);
    const auto b = aggregate(c.trade, c.duty, cw, 7);
    ASSERT_EQ(a.aggregates.size(), b.aggregates.size());
    for (std::size_t k = 0; k < a.aggregates.size(); ++k) {
      EXPECT_EQ(a.aggregates[k].sector, b.aggregates[k].sector);
      EXPECT_EQ(a.aggregates[k].cif_total, b.aggregates[k].cif_total);
      EXPECT_EQ(a.aggregates[k].net_weight_total, b.aggregates[k].net_weight_total);
      EXPECT_EQ(a.aggregates[k].duty_total, b.aggregates[k].duty_total);
    }
    EXPECT_EQ(a.diagnostics.unmapped_cif, b.diagnostics.unmapped_cif);
  }
}
