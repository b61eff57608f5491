#pragma once

// Physical extension of the IO model: mass-based production vector and
// mass-based impact intensities from per-sector characteristic prices.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "physeeio/core_model.hpp"
#include "physeeio/error.hpp"
#include "physeeio/units.hpp"

namespace physeeio {

enum class PriceMethod { DataDriven, PriceDriven, InputDriven, UnityService };
enum class PriceQuality { Good, Partial, Imputed, MassBalance };

inline constexpr std::string_view to_string(PriceMethod m) {
  switch (m) {
    case PriceMethod::DataDriven: return "data_driven";
    case PriceMethod::PriceDriven: return "price_driven";
    case PriceMethod::InputDriven: return "input_driven";
    case PriceMethod::UnityService: return "unity_service";
  }
  return "?";
}

inline constexpr std::string_view to_string(PriceQuality q) {
  switch (q) {
    case PriceQuality::Good: return "good";
    case PriceQuality::Partial: return "partial";
    case PriceQuality::Imputed: return "imputed";
    case PriceQuality::MassBalance: return "mass_balance";
  }
  return "?";
}

/// Characteristic output price of one sector. For goods the price is in
/// $/kg; for UnityService it is exactly 1 and dimensionless.
struct PriceEstimate {
  SectorId sector;
  double price = 1.0;
  PriceMethod method = PriceMethod::UnityService;
  PriceQuality quality = PriceQuality::Good;

  static PriceEstimate unity(SectorId s) {
    return {std::move(s), 1.0, PriceMethod::UnityService, PriceQuality::Good};
  }
  bool is_unity() const { return method == PriceMethod::UnityService; }
};

using PriceMap = std::map<SectorId, PriceEstimate>;

/// Per-sector output: kg for goods, USD for services, zero/None for support
/// sectors. Aligned with the model's sector order.
struct PhysicalVector {
  std::vector<Tagged> entries;
  std::vector<std::string> notes;

  std::size_t size() const { return entries.size(); }
  const Tagged& operator[](std::size_t i) const { return entries[i]; }
};

/// r* for one impact category. Support sectors have no entry.
struct IntensityVector {
  std::string category;
  std::vector<std::optional<Tagged>> entries;

  std::size_t size() const { return entries.size(); }
};

/// Mass from monetary output at a given $/kg price.
inline double production_from_gross_output(double output_usd, double price_per_kg) {
  if (!(price_per_kg > 0.0) || !std::isfinite(price_per_kg)) {
    throw Error(ErrorCode::NonPositivePrice,
                "price must be positive, got " + std::to_string(price_per_kg));
  }
  if (output_usd < 0.0) {
    throw Error(ErrorCode::NegativeValue, "monetary output must be non-negative");
  }
  return output_usd / price_per_kg;
}

namespace detail {

/// Looks up the goods price for sector `rec`; services resolve to unity.
/// Returns nullopt for support sectors.
inline std::optional<double> price_for(const SectorRecord& rec, const PriceMap& prices) {
  auto it = prices.find(rec.id);
  switch (rec.kind) {
    case SectorKind::SupportNoPhysicalFlow:
      return std::nullopt;
    case SectorKind::Service:
      if (it != prices.end() && !it->second.is_unity()) {
        throw Error(ErrorCode::UnitMismatch,
                    "service sector '" + rec.id.code + "' carries a $/kg price");
      }
      return 1.0;
    case SectorKind::Goods:
      if (it == prices.end() || it->second.is_unity()) {
        throw Error(ErrorCode::MissingPrice, "goods sector '" + rec.id.code + "' has no price");
      }
      if (!(it->second.price > 0.0) || !std::isfinite(it->second.price)) {
        throw Error(ErrorCode::NonPositivePrice,
                    "goods sector '" + rec.id.code + "' has non-positive price");
      }
      return it->second.price;
  }
  return std::nullopt;
}

}  // namespace detail

/// One entry of P given the sector's total output value.
inline Tagged physical_entry(const SectorRecord& rec, double output_usd, const PriceMap& prices) {
  const auto p = detail::price_for(rec, prices);
  switch (rec.kind) {
    case SectorKind::Goods: return {production_from_gross_output(output_usd, *p), Unit::Kilogram};
    case SectorKind::Service: return {output_usd, Unit::Usd};
    case SectorKind::SupportNoPhysicalFlow: return {0.0, Unit::None};
  }
  return {0.0, Unit::None};
}

inline PhysicalVector physical_production(const EconomyModel& model, const Matrix& leontief,
                                          const Vector& d, const PriceMap& prices) {
  const Vector xhat = total_output(leontief, d);
  PhysicalVector out;
  out.entries.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& rec = model.sectors()[i];
    out.entries.push_back(physical_entry(rec, xhat(static_cast<Eigen::Index>(i)), prices));
    if (rec.kind == SectorKind::SupportNoPhysicalFlow) {
      out.notes.push_back("sector '" + rec.id.code + "' provides support services; no physical flow");
    }
  }
  return out;
}

inline PhysicalVector physical_production(const EconomyModel& model, const Vector& d,
                                          const PriceMap& prices) {
  return physical_production(model, leontief_inverse(model), d, prices);
}

inline IntensityVector mass_intensity(const EconomyModel& model, const PriceMap& prices,
                                      std::string_view category) {
  const Vector r = model.intensity_row(category);
  IntensityVector out;
  out.category = std::string(category);
  out.entries.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& rec = model.sectors()[i];
    const double ri = r(static_cast<Eigen::Index>(i));
    const auto p = detail::price_for(rec, prices);
    switch (rec.kind) {
      case SectorKind::Goods: out.entries.emplace_back(Tagged{*p * ri, Unit::ImpactPerKg}); break;
      case SectorKind::Service: out.entries.emplace_back(Tagged{ri, Unit::ImpactPerUsd}); break;
      case SectorKind::SupportNoPhysicalFlow: out.entries.emplace_back(std::nullopt); break;
    }
  }
  return out;
}

/// r* (x) P per sector; support sectors yield no entry.
inline std::vector<std::optional<Tagged>> sector_impacts(const IntensityVector& intensity,
                                                         const PhysicalVector& production) {
  if (intensity.size() != production.size()) {
    throw Error(ErrorCode::DimensionMismatch, "intensity and production differ in length");
  }
  std::vector<std::optional<Tagged>> out(intensity.size());
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    if (intensity.entries[i]) out[i] = *intensity.entries[i] * production.entries[i];
  }
  return out;
}

}  // namespace physeeio
