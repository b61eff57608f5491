#pragma once

// Economic input-output model and Leontief algebra.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "physeeio/error.hpp"

namespace physeeio {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Short alphanumeric sector code, e.g. a BEA grouping like "331" or "111CA".
struct SectorId {
  std::string code;

  SectorId() = default;
  explicit SectorId(std::string c) : code(std::move(c)) {}

  friend bool operator==(const SectorId&, const SectorId&) = default;
  friend auto operator<=>(const SectorId&, const SectorId&) = default;
};

struct SectorIdHash {
  std::size_t operator()(const SectorId& id) const noexcept {
    return std::hash<std::string>{}(id.code);
  }
};

enum class SectorKind { Goods, Service, SupportNoPhysicalFlow };
enum class ClassificationLevel { Sector12, Summary71, Detail400 };

inline constexpr std::string_view to_string(SectorKind k) {
  switch (k) {
    case SectorKind::Goods: return "goods";
    case SectorKind::Service: return "service";
    case SectorKind::SupportNoPhysicalFlow: return "support";
  }
  return "?";
}

inline constexpr std::string_view to_string(ClassificationLevel l) {
  switch (l) {
    case ClassificationLevel::Sector12: return "sector";
    case ClassificationLevel::Summary71: return "summary";
    case ClassificationLevel::Detail400: return "detail";
  }
  return "?";
}

inline std::optional<SectorKind> parse_sector_kind(std::string_view s) {
  if (s == "goods") return SectorKind::Goods;
  if (s == "service") return SectorKind::Service;
  if (s == "support") return SectorKind::SupportNoPhysicalFlow;
  return std::nullopt;
}

inline std::optional<ClassificationLevel> parse_level(std::string_view s) {
  if (s == "sector" || s == "sector12") return ClassificationLevel::Sector12;
  if (s == "summary" || s == "summary71") return ClassificationLevel::Summary71;
  if (s == "detail" || s == "detail400") return ClassificationLevel::Detail400;
  return std::nullopt;
}

struct SectorRecord {
  SectorId id;
  std::string name;
  SectorKind kind = SectorKind::Goods;
  ClassificationLevel level = ClassificationLevel::Summary71;

  /// Goods and support sectors together make up the goods-producing
  /// subsectors; support sectors simply have no physical output.
  bool goods_producing() const { return kind != SectorKind::Service; }
};

struct ImpactCategory {
  std::string key;             // e.g. "ghg_co2e"
  std::string unit_numerator;  // e.g. "kg CO2e"
};

/// Validated, immutable IO model. Columns of `A` and of the satellite, and
/// entries of `d` and `x`, follow the order of `sectors()`.
class EconomyModel {
 public:
  const std::vector<SectorRecord>& sectors() const { return sectors_; }
  std::size_t size() const { return sectors_.size(); }
  const Matrix& direct_requirements() const { return a_; }
  const Vector& final_demand() const { return d_; }
  const Vector& gross_output() const { return x_; }
  const Matrix& satellite() const { return r_; }
  const std::vector<ImpactCategory>& impacts() const { return impacts_; }

  std::optional<std::size_t> index_of(const SectorId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const SectorId& id) const {
    if (auto i = index_of(id)) return *i;
    throw Error(ErrorCode::UnknownSector, "sector '" + id.code + "' is not in the model");
  }

  std::size_t impact_row(std::string_view key) const {
    for (std::size_t k = 0; k < impacts_.size(); ++k) {
      if (impacts_[k].key == key) return k;
    }
    throw Error(ErrorCode::UnknownImpactCategory,
                "impact category '" + std::string(key) + "' is not in the satellite");
  }

  /// Satellite row for one impact category, per dollar of output.
  Vector intensity_row(std::string_view key) const { return r_.row(impact_row(key)).transpose(); }

 private:
  friend EconomyModel build_model(std::vector<SectorRecord>, Matrix, Vector, Vector,
                                  std::vector<ImpactCategory>, Matrix);

  std::vector<SectorRecord> sectors_;
  std::unordered_map<SectorId, std::size_t, SectorIdHash> index_;
  Matrix a_;
  Vector d_;
  Vector x_;
  std::vector<ImpactCategory> impacts_;
  Matrix r_;
};

namespace detail {

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

}  // namespace detail

/// Validates and assembles a model. `satellite` is impacts x sectors.
inline EconomyModel build_model(std::vector<SectorRecord> sectors, Matrix a, Vector d, Vector x,
                                std::vector<ImpactCategory> impacts, Matrix satellite) {
  const auto n = static_cast<Eigen::Index>(sectors.size());
  if (a.rows() != n || a.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "direct requirements matrix is " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " but there are " + std::to_string(n) + " sectors");
  }
  if (d.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "final demand has length " +
                                                  std::to_string(d.size()) + ", expected " +
                                                  std::to_string(n));
  }
  if (x.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "gross output has length " +
                                                  std::to_string(x.size()) + ", expected " +
                                                  std::to_string(n));
  }
  if (satellite.cols() != n || satellite.rows() != static_cast<Eigen::Index>(impacts.size())) {
    throw Error(ErrorCode::DimensionMismatch,
                "satellite is " + std::to_string(satellite.rows()) + "x" +
                    std::to_string(satellite.cols()) + ", expected " +
                    std::to_string(impacts.size()) + "x" + std::to_string(n));
  }

  EconomyModel m;
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    if (sectors[i].id.code.empty()) {
      throw Error(ErrorCode::SchemaViolation, "sector " + std::to_string(i) + " has an empty id");
    }
    if (!m.index_.emplace(sectors[i].id, i).second) {
      throw Error(ErrorCode::DuplicateSectorId, "duplicate sector id '" + sectors[i].id.code + "'");
    }
  }
  for (std::size_t k = 0; k < impacts.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (impacts[j].key == impacts[k].key) {
        throw Error(ErrorCode::SchemaViolation, "duplicate impact category '" + impacts[k].key + "'");
      }
    }
  }

  if (!detail::all_finite(a) || !d.allFinite() || !x.allFinite() ||
      !detail::all_finite(satellite)) {
    throw Error(ErrorCode::NonFiniteValue, "model contains NaN or infinite entries");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a(i, j) < 0.0) {
        throw Error(ErrorCode::NegativeCoefficient,
                    "A[" + sectors[i].id.code + "," + sectors[j].id.code + "] is negative");
      }
    }
    const double col = a.col(j).sum();
    if (!(col < 1.0)) {
      throw Error(ErrorCode::NonProductiveEconomy,
                  "column sum of A for sector '" + sectors[j].id.code + "' is " +
                      std::to_string(col) + " (must be < 1)");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d(i) < 0.0) {
      throw Error(ErrorCode::NegativeValue,
                  "final demand for '" + sectors[i].id.code + "' is negative");
    }
    if (!(x(i) > 0.0)) {
      throw Error(ErrorCode::NegativeValue,
                  "gross output for '" + sectors[i].id.code + "' must be positive");
    }
  }

  m.sectors_ = std::move(sectors);
  m.a_ = std::move(a);
  m.d_ = std::move(d);
  m.x_ = std::move(x);
  m.impacts_ = std::move(impacts);
  m.r_ = std::move(satellite);
  return m;
}

/// Factorization of (I - A), reusable across demand vectors.
class LeontiefSolver {
 public:
  static constexpr double kConditionWarning = 1e12;

  explicit LeontiefSolver(const Matrix& a) {
    const auto n = a.rows();
    const Matrix i_minus_a = Matrix::Identity(n, n) - a;
    lu_.compute(i_minus_a);
    const auto& packed = lu_.matrixLU();
    const double u_max = n > 0 ? packed.diagonal().cwiseAbs().maxCoeff() : 1.0;
    const double u_min = n > 0 ? packed.diagonal().cwiseAbs().minCoeff() : 1.0;
    if (!packed.allFinite() || !(u_min > u_max * 1e-15 * static_cast<double>(std::max<Eigen::Index>(n, 1)))) {
      throw Error(ErrorCode::SingularMatrix, "I - A is numerically singular");
    }
    inverse_ = lu_.inverse();
    // 1-norm condition number, exact since the inverse is formed anyway
    const double norm_fwd = i_minus_a.cwiseAbs().colwise().sum().maxCoeff();
    const double norm_inv = n > 0 ? inverse_.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
    condition_ = norm_fwd * norm_inv;
    if (condition_ > kConditionWarning) {
      warnings_.push_back("condition number of I - A is " + std::to_string(condition_));
    }
  }

  const Matrix& inverse() const { return inverse_; }
  double condition_number() const { return condition_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Total output L*d.
  Vector solve(const Vector& d) const {
    if (d.size() != inverse_.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "demand vector has wrong length");
    }
    return inverse_ * d;
  }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  Matrix inverse_;
  double condition_ = 1.0;
  std::vector<std::string> warnings_;
};

/// Total requirements matrix (I - A)^-1.
inline Matrix leontief_inverse(const EconomyModel& model) {
  return LeontiefSolver(model.direct_requirements()).inverse();
}

inline Vector total_output(const Matrix& leontief, const Vector& d) {
  if (leontief.rows() != leontief.cols() || d.size() != leontief.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cannot multiply " + std::to_string(leontief.rows()) + "x" +
                    std::to_string(leontief.cols()) + " by vector of length " +
                    std::to_string(d.size()));
  }
  if ((d.array() < 0.0).any()) {
    throw Error(ErrorCode::NegativeValue, "final demand must be non-negative");
  }
  return leontief * d;
}

/// Sector-level impacts E_i = r_i * (L d)_i for one impact category.
inline Vector env_impacts(const EconomyModel& model, const Matrix& leontief, const Vector& d,
                          std::string_view category) {
  const Vector r = model.intensity_row(category);
  return r.cwiseProduct(total_output(leontief, d));
}

inline Vector env_impacts(const EconomyModel& model, const Vector& d, std::string_view category) {
  model.impact_row(category);
  return env_impacts(model, leontief_inverse(model), d, category);
}

}  // namespace physeeio
