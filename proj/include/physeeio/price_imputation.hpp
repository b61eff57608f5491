#pragma once

// Price-driven method: duty rates from trade aggregates, three-tier duty
// smoothing, basic price and producer price per sector.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "physeeio/core_model.hpp"
#include "physeeio/decimal.hpp"
#include "physeeio/error.hpp"
#include "physeeio/parallel.hpp"
#include "physeeio/physical_extension.hpp"

namespace physeeio {

/// Import totals for one sector after crosswalk translation.
struct IndustryTradeAggregate {
  SectorId sector;
  Decimal cif_total;
  Decimal net_weight_total;
  Decimal duty_total;
};

enum class DutyTier { Zero, Low, Medium, High };

inline constexpr std::string_view to_string(DutyTier t) {
  switch (t) {
    case DutyTier::Zero: return "zero";
    case DutyTier::Low: return "low";
    case DutyTier::Medium: return "medium";
    case DutyTier::High: return "high";
  }
  return "?";
}

struct DutyTierAssignment {
  SectorId sector;
  double raw_rate = 0.0;
  DutyTier tier = DutyTier::Zero;
  double assigned_rate = 0.0;
};

/// Basic-to-producer price ratio. Missing entries default to 1.
using TauTable = std::map<SectorId, double>;

inline double duty_rate(double duty_total, double cif_total) {
  if (!(cif_total > 0.0)) {
    throw Error(ErrorCode::ZeroCif, "CIF total is zero; no duty rate can be formed");
  }
  if (duty_total < 0.0) throw Error(ErrorCode::NegativeValue, "duty total is negative");
  return duty_total / cif_total;
}

inline double duty_rate(const IndustryTradeAggregate& agg) {
  if (!(agg.cif_total.units() > 0)) {
    throw Error(ErrorCode::ZeroCif, "sector '" + agg.sector.code + "' has zero CIF total");
  }
  return duty_rate(agg.duty_total.to_double(), agg.cif_total.to_double());
}

/// Three equal-width intervals over [min, max] of the non-zero rates:
/// [min, low_upper), [low_upper, medium_upper), [medium_upper, max].
struct TierBounds {
  double min = 0.0;
  double max = 0.0;
  double width = 0.0;
  double low_upper = 0.0;
  double medium_upper = 0.0;

  DutyTier classify(double rate) const {
    if (rate == 0.0) return DutyTier::Zero;
    if (rate < low_upper) return DutyTier::Low;
    if (rate < medium_upper && rate != max) return DutyTier::Medium;
    return DutyTier::High;
  }
};

inline TierBounds tier_bounds(const std::vector<double>& nonzero_rates) {
  if (nonzero_rates.empty()) {
    throw Error(ErrorCode::EmptyRates, "no non-zero duty rates to tier");
  }
  const auto [lo, hi] = std::minmax_element(nonzero_rates.begin(), nonzero_rates.end());
  if (*lo <= 0.0) throw Error(ErrorCode::NegativeValue, "tier bounds need strictly positive rates");
  if (*lo == *hi) {
    throw Error(ErrorCode::DegenerateRange,
                "all non-zero duty rates equal " + std::to_string(*lo));
  }
  TierBounds b;
  b.min = *lo;
  b.max = *hi;
  b.width = (b.max - b.min) / 3.0;
  b.low_upper = b.min + b.width;
  b.medium_upper = b.min + 2.0 * b.width;
  return b;
}

/// Outcome of tiering a full rate set, including the degenerate cases.
struct TieringResult {
  std::vector<DutyTierAssignment> assignments;  // sorted by sector
  std::optional<TierBounds> bounds;
  bool degenerate = false;  // all non-zero rates equal: one tier
  bool empty = false;       // no non-zero rates: everything Zero
  std::map<DutyTier, double> tier_means;
  std::map<DutyTier, std::size_t> tier_counts;
};

/// Classifies sectors into tiers and assigns each the mean raw rate of its
/// tier. Zero-rate sectors get no duty. Tiers may be empty.
inline std::vector<DutyTierAssignment> assign_tiers(const std::map<SectorId, double>& rates,
                                                    const TierBounds& bounds) {
  std::vector<DutyTierAssignment> out;
  out.reserve(rates.size());
  std::map<DutyTier, double> sums;
  std::map<DutyTier, std::size_t> counts;
  for (const auto& [sector, rate] : rates) {
    if (rate < 0.0) throw Error(ErrorCode::NegativeValue, "negative duty rate for '" + sector.code + "'");
    const DutyTier t = bounds.classify(rate);
    out.push_back({sector, rate, t, 0.0});
    if (t != DutyTier::Zero) {
      sums[t] += rate;
      ++counts[t];
    }
  }
  for (auto& a : out) {
    if (a.tier != DutyTier::Zero) a.assigned_rate = sums[a.tier] / static_cast<double>(counts[a.tier]);
  }
  return out;
}

/// assign_tiers with the degenerate and empty rate sets handled: equal rates
/// collapse into the Low tier, no non-zero rates leaves every sector Zero.
inline TieringResult tier_duty_rates(const std::map<SectorId, double>& rates) {
  TieringResult result;
  std::vector<double> nonzero;
  for (const auto& [sector, rate] : rates) {
    if (rate < 0.0) throw Error(ErrorCode::NegativeValue, "negative duty rate for '" + sector.code + "'");
    if (rate > 0.0) nonzero.push_back(rate);
  }
  try {
    result.bounds = tier_bounds(nonzero);
    result.assignments = assign_tiers(rates, *result.bounds);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyRates) {
      result.empty = true;
      for (const auto& [sector, rate] : rates) result.assignments.push_back({sector, rate, DutyTier::Zero, 0.0});
    } else if (e.code() == ErrorCode::DegenerateRange) {
      result.degenerate = true;
      const double only = nonzero.front();
      for (const auto& [sector, rate] : rates) {
        if (rate > 0.0) {
          result.assignments.push_back({sector, rate, DutyTier::Low, only});
        } else {
          result.assignments.push_back({sector, rate, DutyTier::Zero, 0.0});
        }
      }
    } else {
      throw;
    }
  }
  for (const auto& a : result.assignments) {
    if (a.tier == DutyTier::Zero) continue;
    result.tier_means[a.tier] = a.assigned_rate;
    ++result.tier_counts[a.tier];
  }
  return result;
}

/// (CIF + CIF * rate) / net weight, in $/kg.
inline double basic_price(const IndustryTradeAggregate& agg, double assigned_rate) {
  if (!(agg.net_weight_total.units() > 0)) {
    throw Error(ErrorCode::ZeroWeight, "sector '" + agg.sector.code + "' has zero net weight");
  }
  if (assigned_rate < 0.0) throw Error(ErrorCode::NegativeValue, "assigned duty rate is negative");
  const double cif = agg.cif_total.to_double();
  return (cif + cif * assigned_rate) / agg.net_weight_total.to_double();
}

inline double producer_price(double basic, double tau_ratio) {
  if (!(tau_ratio > 0.0) || !std::isfinite(tau_ratio)) {
    throw Error(ErrorCode::NonPositiveTau, "tau ratio must be positive, got " + std::to_string(tau_ratio));
  }
  return basic / tau_ratio;
}

struct SectorReject {
  SectorId sector;
  ErrorCode reason;
  std::string message;
};

struct ImputationResult {
  std::vector<PriceEstimate> estimates;  // method PriceDriven, sorted by sector
  std::vector<SectorReject> rejects;     // sorted by sector
  TieringResult tiering;
  std::vector<std::string> warnings;
  std::size_t sectors_in_scope = 0;
};

/// Full price-driven pipeline per sector: duty rate, tiering, basic price,
/// producer price. Failing sectors land in `rejects`, never silently dropped.
/// Aggregates for the same sector are summed first, so row order is irrelevant.
inline ImputationResult impute_prices(const std::vector<IndustryTradeAggregate>& aggregates,
                                      const TauTable& tau, unsigned threads = 1) {
  ImputationResult result;
  std::map<SectorId, IndustryTradeAggregate> by_sector;
  for (const auto& a : aggregates) {
    auto [it, inserted] = by_sector.try_emplace(a.sector, a);
    if (!inserted) {
      it->second.cif_total += a.cif_total;
      it->second.net_weight_total += a.net_weight_total;
      it->second.duty_total += a.duty_total;
    }
  }
  result.sectors_in_scope = by_sector.size();

  std::map<SectorId, double> rates;
  std::map<SectorId, SectorReject> rejects;
  for (const auto& [sector, agg] : by_sector) {
    try {
      rates.emplace(sector, duty_rate(agg));
    } catch (const Error& e) {
      rejects.emplace(sector, SectorReject{sector, e.code(), e.detail()});
    }
  }
  result.tiering = tier_duty_rates(rates);
  if (result.tiering.degenerate) {
    result.warnings.push_back("all non-zero duty rates are equal; a single duty tier was used");
  }

  const auto& assignments = result.tiering.assignments;
  std::vector<std::optional<PriceEstimate>> priced(assignments.size());
  std::vector<std::optional<SectorReject>> failed(assignments.size());
  std::vector<bool> tau_defaulted(assignments.size(), false);
  parallel_for(assignments.size(), threads, [&](std::size_t k) {
    const auto& asg = assignments[k];
    const auto& agg = by_sector.at(asg.sector);
    try {
      const double basic = basic_price(agg, asg.assigned_rate);
      double ratio = 1.0;
      if (auto t = tau.find(asg.sector); t != tau.end()) {
        ratio = t->second;
      } else {
        tau_defaulted[k] = true;
      }
      priced[k] = PriceEstimate{asg.sector, producer_price(basic, ratio), PriceMethod::PriceDriven,
                                PriceQuality::Imputed};
    } catch (const Error& e) {
      failed[k] = SectorReject{asg.sector, e.code(), e.detail()};
    }
  });
  for (std::size_t k = 0; k < assignments.size(); ++k) {
    if (priced[k]) result.estimates.push_back(*priced[k]);
    if (failed[k]) rejects.emplace(failed[k]->sector, *failed[k]);
    if (tau_defaulted[k] && priced[k]) {
      result.warnings.push_back("sector '" + assignments[k].sector.code +
                                "' has no tau ratio; using 1.0");
    }
  }
  for (auto& [sector, r] : rejects) result.rejects.push_back(std::move(r));
  return result;
}

}  // namespace physeeio
