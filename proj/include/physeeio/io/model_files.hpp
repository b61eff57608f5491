#pragma once

// Readers for the model and auxiliary CSV files.

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "physeeio/core_model.hpp"
#include "physeeio/crosswalk.hpp"
#include "physeeio/error.hpp"
#include "physeeio/io/csv.hpp"
#include "physeeio/mass_balance.hpp"
#include "physeeio/price_imputation.hpp"

namespace physeeio::io {

inline std::vector<SectorRecord> parse_sectors(const CsvTable& t) {
  expect_header(t, {"sector_id", "name", "kind", "level"});
  if (t.rows.empty()) throw Error(ErrorCode::EmptyFile, "no sectors", {t.file, 0, 0});
  std::vector<SectorRecord> out;
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    SectorRecord rec;
    rec.id = SectorId(non_empty(t, row, 0));
    if (!valid_sector_code(rec.id.code)) {
      throw Error(ErrorCode::MalformedCode, "invalid sector id '" + rec.id.code + "'", t.at(row, 1));
    }
    if (!seen.insert(rec.id.code).second) {
      throw Error(ErrorCode::DuplicateSectorId, "duplicate sector id '" + rec.id.code + "'", t.at(row, 1));
    }
    rec.name = row.fields[1];
    const auto kind = parse_sector_kind(non_empty(t, row, 2));
    if (!kind) {
      throw Error(ErrorCode::SchemaViolation, "kind '" + row.fields[2] + "' is not goods, service or support",
                  t.at(row, 3));
    }
    rec.kind = *kind;
    const auto level = parse_level(non_empty(t, row, 3));
    if (!level) {
      throw Error(ErrorCode::SchemaViolation, "level '" + row.fields[3] + "' is not sector, summary or detail",
                  t.at(row, 4));
    }
    rec.level = *level;
    out.push_back(std::move(rec));
  }
  return out;
}

using SectorIndex = std::map<std::string, std::size_t>;

inline SectorIndex index_sectors(const std::vector<SectorRecord>& sectors) {
  SectorIndex idx;
  for (std::size_t i = 0; i < sectors.size(); ++i) idx.emplace(sectors[i].id.code, i);
  return idx;
}

inline std::size_t lookup_sector(const SectorIndex& idx, const CsvTable& t, const CsvRow& row, std::size_t col) {
  const auto& code = non_empty(t, row, col);
  auto it = idx.find(code);
  if (it == idx.end()) {
    throw Error(ErrorCode::SchemaViolation, "unknown sector id '" + code + "'", t.at(row, col + 1));
  }
  return it->second;
}

/// Square matrix file: header `sector_id,<col ids>`, one row per sector.
/// Rows are supplying sectors, columns consuming sectors; both may come in
/// any order and are rearranged to the sector list.
inline Matrix parse_direct_requirements(const CsvTable& t, const std::vector<SectorRecord>& sectors) {
  const auto idx = index_sectors(sectors);
  const auto n = sectors.size();
  if (t.header.empty() || t.header[0] != "sector_id" || t.header.size() != n + 1) {
    throw Error(ErrorCode::SchemaViolation,
                "header '" + join(t.header) + "' must be 'sector_id' followed by one column per sector (" +
                    std::to_string(n) + ")",
                {t.file, 1, 0});
  }
  std::vector<std::size_t> col_of(n);
  std::set<std::size_t> cols_seen;
  for (std::size_t c = 1; c <= n; ++c) {
    auto it = idx.find(t.header[c]);
    if (it == idx.end() || !cols_seen.insert(it->second).second) {
      throw Error(ErrorCode::SchemaViolation, "header column '" + t.header[c] + "' is unknown or repeated",
                  {t.file, 1, c + 1});
    }
    col_of[c - 1] = it->second;
  }
  if (t.rows.size() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "matrix has " + std::to_string(t.rows.size()) + " rows, expected " + std::to_string(n),
                {t.file, 0, 0});
  }
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::set<std::size_t> rows_seen;
  for (const auto& row : t.rows) {
    if (row.fields.size() != n + 1) {
      throw Error(ErrorCode::SchemaViolation, "expected " + std::to_string(n + 1) + " fields", t.at(row));
    }
    const auto r = lookup_sector(idx, t, row, 0);
    if (!rows_seen.insert(r).second) {
      throw Error(ErrorCode::SchemaViolation, "row for '" + row.fields[0] + "' repeated", t.at(row, 1));
    }
    for (std::size_t c = 1; c <= n; ++c) {
      const double v = parse_number(t, row, c);
      if (v < 0.0) {
        throw Error(ErrorCode::SchemaViolation, "direct requirement coefficient is negative", t.at(row, c + 1));
      }
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_of[c - 1])) = v;
    }
  }
  return a;
}

/// `sector_id,value_usd` with every sector exactly once.
inline Vector parse_sector_vector(const CsvTable& t, const std::vector<SectorRecord>& sectors) {
  expect_header(t, {"sector_id", "value_usd"});
  const auto idx = index_sectors(sectors);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(sectors.size()));
  std::vector<bool> seen(sectors.size(), false);
  for (const auto& row : t.rows) {
    const auto i = lookup_sector(idx, t, row, 0);
    if (seen[i]) throw Error(ErrorCode::SchemaViolation, "sector '" + row.fields[0] + "' repeated", t.at(row, 1));
    seen[i] = true;
    v(static_cast<Eigen::Index>(i)) = parse_non_negative(t, row, 1);
  }
  for (std::size_t i = 0; i < sectors.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::SchemaViolation, "no value for sector '" + sectors[i].id.code + "'", {t.file, 0, 0});
    }
  }
  return v;
}

struct SatelliteData {
  std::vector<ImpactCategory> impacts;
  Matrix matrix;
};

/// Long format `impact_key,sector_id,intensity_per_usd`; absent pairs are 0.
/// Categories are ordered by key.
inline SatelliteData parse_satellite(const CsvTable& t, const std::vector<SectorRecord>& sectors) {
  expect_header(t, {"impact_key", "sector_id", "intensity_per_usd"});
  const auto idx = index_sectors(sectors);
  std::map<std::string, std::map<std::size_t, double>> values;
  for (const auto& row : t.rows) {
    const auto& key = non_empty(t, row, 0);
    const auto i = lookup_sector(idx, t, row, 1);
    const double v = parse_non_negative(t, row, 2);
    if (!values[key].emplace(i, v).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate entry for " + key + "/" + row.fields[1], t.at(row, 1));
    }
  }
  SatelliteData s;
  s.matrix = Matrix::Zero(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(sectors.size()));
  Eigen::Index k = 0;
  for (const auto& [key, per_sector] : values) {
    s.impacts.push_back({key, ""});
    for (const auto& [i, v] : per_sector) s.matrix(k, static_cast<Eigen::Index>(i)) = v;
    ++k;
  }
  return s;
}

struct ModelFiles {
  std::filesystem::path sectors, a, demand, gross_output, satellite;
};

inline EconomyModel load_model(const ModelFiles& f) {
  auto sectors = parse_sectors(read_csv(f.sectors));
  auto a = parse_direct_requirements(read_csv(f.a), sectors);
  auto d = parse_sector_vector(read_csv(f.demand), sectors);
  auto x = parse_sector_vector(read_csv(f.gross_output), sectors);
  auto sat = parse_satellite(read_csv(f.satellite), sectors);
  try {
    return build_model(std::move(sectors), std::move(a), std::move(d), std::move(x), std::move(sat.impacts),
                       std::move(sat.matrix));
  } catch (const Error& e) {
    // attribute model-level failures to the matrix/vector files
    const auto file = e.code() == ErrorCode::NegativeValue ? f.gross_output : f.a;
    throw Error(e.code(), e.detail(), {file.string(), 0, 0});
  }
}

namespace detail {

/// Rejects ids absent from `model`, or not of kind Goods when `goods_only`.
inline void check_sector(const CsvTable& t, const CsvRow& row, const EconomyModel* model, bool goods_only) {
  if (!model) return;
  const SectorId id(row.fields[0]);
  const auto i = model->index_of(id);
  if (!i) throw Error(ErrorCode::SchemaViolation, "unknown sector id '" + id.code + "'", t.at(row, 1));
  if (goods_only && model->sectors()[*i].kind != SectorKind::Goods) {
    throw Error(ErrorCode::SchemaViolation, "sector '" + id.code + "' is not a goods sector", t.at(row, 1));
  }
}

}  // namespace detail

inline TauTable parse_tau(const CsvTable& t) {
  expect_header(t, {"sector_id", "tau_ratio"});
  TauTable out;
  for (const auto& row : t.rows) {
    SectorId id(non_empty(t, row, 0));
    const double v = parse_number(t, row, 1);
    if (!(v > 0.0)) throw Error(ErrorCode::SchemaViolation, "tau ratio must be positive", t.at(row, 2));
    if (!out.emplace(id, v).second) {
      throw Error(ErrorCode::SchemaViolation, "sector '" + id.code + "' repeated", t.at(row, 1));
    }
  }
  return out;
}

inline WasteTable parse_waste(const CsvTable& t, const EconomyModel* model = nullptr) {
  expect_header(t, {"sector_id", "waste_coefficient"});
  WasteTable out;
  for (const auto& row : t.rows) {
    SectorId id(non_empty(t, row, 0));
    detail::check_sector(t, row, model, false);
    const double v = parse_number(t, row, 1);
    if (!(v >= 0.0 && v < 1.0)) {
      throw Error(ErrorCode::SchemaViolation, "waste coefficient must lie in [0, 1)", t.at(row, 2));
    }
    if (!out.emplace(id, v).second) {
      throw Error(ErrorCode::SchemaViolation, "sector '" + id.code + "' repeated", t.at(row, 1));
    }
  }
  return out;
}

struct DirectProduction {
  double mass_kg = 0.0;
  bool complete = true;  // coverage good vs partial
};

using ProductionTable = std::map<SectorId, DirectProduction>;

inline ProductionTable parse_production(const CsvTable& t, const EconomyModel* model = nullptr) {
  expect_header(t, {"sector_id", "mass_kg", "coverage"});
  ProductionTable out;
  for (const auto& row : t.rows) {
    SectorId id(non_empty(t, row, 0));
    detail::check_sector(t, row, model, true);
    const double mass = parse_non_negative(t, row, 1);
    const auto& cov = non_empty(t, row, 2);
    if (cov != "good" && cov != "partial") {
      throw Error(ErrorCode::SchemaViolation, "coverage must be good or partial", t.at(row, 3));
    }
    if (!out.emplace(id, DirectProduction{mass, cov == "good"}).second) {
      throw Error(ErrorCode::SchemaViolation, "sector '" + id.code + "' repeated", t.at(row, 1));
    }
  }
  return out;
}

}  // namespace physeeio::io
