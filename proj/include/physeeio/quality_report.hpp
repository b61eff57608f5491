#pragma once

// Data-coverage classification of goods-producing sectors and comparison of
// masses obtained by independent estimation methods.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "physeeio/core_model.hpp"
#include "physeeio/error.hpp"
#include "physeeio/io/csv.hpp"

namespace physeeio {

enum class CoverageClass { GoodData, PartialData, NoData, NoPhysicalFlow };

inline constexpr std::string_view to_string(CoverageClass c) {
  switch (c) {
    case CoverageClass::GoodData: return "good";
    case CoverageClass::PartialData: return "partial";
    case CoverageClass::NoData: return "none";
    case CoverageClass::NoPhysicalFlow: return "no_flow";
  }
  return "?";
}

inline std::optional<CoverageClass> parse_coverage_class(std::string_view s) {
  if (s == "good") return CoverageClass::GoodData;
  if (s == "partial") return CoverageClass::PartialData;
  if (s == "none") return CoverageClass::NoData;
  if (s == "no_flow") return CoverageClass::NoPhysicalFlow;
  return std::nullopt;
}

/// What primary data exists for one goods-producing sector.
struct InventoryEntry {
  SectorId sector;
  bool has_direct_data = false;
  bool direct_data_complete = false;
  bool physical_flow = true;
};

struct SectorCoverage {
  SectorId sector;
  CoverageClass coverage = CoverageClass::NoData;
};

struct CoverageSummary {
  std::size_t total = 0;
  std::size_t good = 0;
  std::size_t partial = 0;
  std::size_t no_data = 0;
  std::size_t no_flow = 0;

  double fraction(std::size_t count) const {
    return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
  }
  /// Integer percent, truncated toward zero.
  std::size_t percent_floor(std::size_t count) const {
    return total == 0 ? 0 : (count * 100) / total;
  }
};

struct CoverageReport {
  std::vector<SectorCoverage> sectors;  // sorted by sector
  CoverageSummary summary;
};

inline CoverageClass classify(const InventoryEntry& e) {
  if (!e.physical_flow) return CoverageClass::NoPhysicalFlow;
  if (!e.has_direct_data) return CoverageClass::NoData;
  return e.direct_data_complete ? CoverageClass::GoodData : CoverageClass::PartialData;
}

inline CoverageReport classify_coverage(const std::vector<InventoryEntry>& inventory) {
  std::map<SectorId, CoverageClass> by_sector;
  for (const auto& e : inventory) {
    if (!by_sector.emplace(e.sector, classify(e)).second) {
      throw Error(ErrorCode::DuplicateSectorId, "sector '" + e.sector.code + "' listed twice in inventory");
    }
  }
  CoverageReport r;
  for (const auto& [sector, c] : by_sector) {
    r.sectors.push_back({sector, c});
    ++r.summary.total;
    switch (c) {
      case CoverageClass::GoodData: ++r.summary.good; break;
      case CoverageClass::PartialData: ++r.summary.partial; break;
      case CoverageClass::NoData: ++r.summary.no_data; break;
      case CoverageClass::NoPhysicalFlow: ++r.summary.no_flow; break;
    }
  }
  return r;
}

/// Reads `sector_id,coverage` with coverage in {good, partial, none, no_flow}.
inline std::vector<InventoryEntry> parse_inventory(const io::CsvTable& t) {
  io::expect_header(t, {"sector_id", "coverage"});
  std::vector<InventoryEntry> out;
  for (const auto& row : t.rows) {
    const auto& id = io::non_empty(t, row, 0);
    const auto c = parse_coverage_class(io::non_empty(t, row, 1));
    if (!c) {
      throw Error(ErrorCode::SchemaViolation,
                  "coverage '" + row.fields[1] + "' is not one of good, partial, none, no_flow",
                  t.at(row, 2));
    }
    InventoryEntry e{SectorId(id)};
    e.physical_flow = *c != CoverageClass::NoPhysicalFlow;
    e.has_direct_data = *c == CoverageClass::GoodData || *c == CoverageClass::PartialData;
    e.direct_data_complete = *c == CoverageClass::GoodData;
    out.push_back(std::move(e));
  }
  return out;
}

/// Symmetric percent difference |a - b| / ((a + b) / 2) * 100, in [0, 200).
inline double percent_difference(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw Error(ErrorCode::NonPositiveMass, "percent difference needs positive masses");
  }
  return std::abs(a - b) / ((a + b) / 2.0) * 100.0;
}

inline constexpr double kKgPerMegatonne = 1e9;

struct MethodComparison {
  SectorId sector;
  double mass_data_driven = 0.0;   // kg
  double mass_price_driven = 0.0;  // kg
  double pct_difference = 0.0;
  bool magnitude_mismatch = false;  // floor(log10) differs
};

struct ComparisonResult {
  std::vector<MethodComparison> rows;    // sorted by sector
  std::vector<SectorId> not_comparable;  // sorted
  std::optional<double> min_pct;
  std::optional<double> max_pct;
};

inline bool magnitude_differs(double a, double b) {
  return std::floor(std::log10(a)) != std::floor(std::log10(b));
}

/// Pairs masses by sector; sectors present in only one map (or with a
/// non-positive mass) are listed as not comparable.
inline ComparisonResult compare_methods(const std::map<SectorId, double>& data_driven,
                                        const std::map<SectorId, double>& price_driven) {
  ComparisonResult out;
  std::map<SectorId, bool> all;
  for (const auto& [s, m] : data_driven) all[s] = true;
  for (const auto& [s, m] : price_driven) all[s] = true;
  for (const auto& [sector, unused] : all) {
    auto a = data_driven.find(sector);
    auto b = price_driven.find(sector);
    if (a == data_driven.end() || b == price_driven.end() || !(a->second > 0.0) || !(b->second > 0.0)) {
      out.not_comparable.push_back(sector);
      continue;
    }
    MethodComparison row{sector, a->second, b->second, percent_difference(a->second, b->second),
                         magnitude_differs(a->second, b->second)};
    out.min_pct = out.min_pct ? std::min(*out.min_pct, row.pct_difference) : row.pct_difference;
    out.max_pct = out.max_pct ? std::max(*out.max_pct, row.pct_difference) : row.pct_difference;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace physeeio
