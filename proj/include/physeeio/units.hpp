#pragma once

#include <string>
#include <string_view>

#include "physeeio/error.hpp"

namespace physeeio {

/// Unit tag carried by every entry of a hybrid physical/monetary vector.
enum class Unit {
  Kilogram,      // goods output
  Usd,           // service output
  None,          // no physical flow
  ImpactPerKg,   // e.g. kg CO2e / kg
  ImpactPerUsd,  // e.g. kg CO2e / $
  Impact,        // e.g. kg CO2e
};

inline constexpr std::string_view to_string(Unit u) {
  switch (u) {
    case Unit::Kilogram: return "kg";
    case Unit::Usd: return "usd";
    case Unit::None: return "none";
    case Unit::ImpactPerKg: return "impact_per_kg";
    case Unit::ImpactPerUsd: return "impact_per_usd";
    case Unit::Impact: return "impact";
  }
  return "?";
}

/// A scalar with a unit tag. Addition and subtraction require equal tags;
/// multiplication is only defined for the unit pairings that occur in the
/// extension (intensity x output -> impact).
struct Tagged {
  double value = 0.0;
  Unit unit = Unit::None;

  friend Tagged operator+(const Tagged& a, const Tagged& b) {
    require_same(a, b, "+");
    return {a.value + b.value, a.unit};
  }
  friend Tagged operator-(const Tagged& a, const Tagged& b) {
    require_same(a, b, "-");
    return {a.value - b.value, a.unit};
  }
  friend Tagged operator*(const Tagged& intensity, const Tagged& output) {
    const bool ok =
        (intensity.unit == Unit::ImpactPerKg && output.unit == Unit::Kilogram) ||
        (intensity.unit == Unit::ImpactPerUsd && output.unit == Unit::Usd);
    if (!ok) {
      throw Error(ErrorCode::UnitMismatch,
                  std::string("cannot multiply ") + std::string(to_string(intensity.unit)) +
                      " by " + std::string(to_string(output.unit)));
    }
    return {intensity.value * output.value, Unit::Impact};
  }

 private:
  static void require_same(const Tagged& a, const Tagged& b, const char* op) {
    if (a.unit != b.unit) {
      throw Error(ErrorCode::UnitMismatch, std::string(to_string(a.unit)) + " " + op + " " +
                                               std::string(to_string(b.unit)));
    }
  }
};

}  // namespace physeeio
