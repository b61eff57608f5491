#pragma once

// Shared helpers for the test binaries.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "physeeio/physeeio.hpp"

namespace testing_support {

using namespace physeeio;

inline std::filesystem::path fixture(const std::string& rel) {
  return std::filesystem::path(PHYSEEIO_FIXTURES) / rel;
}

inline std::vector<SectorRecord> make_sectors(const std::vector<SectorKind>& kinds) {
  std::vector<SectorRecord> out;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    out.push_back({SectorId("S" + std::to_string(i)), "sector " + std::to_string(i), kinds[i],
                   ClassificationLevel::Summary71});
  }
  return out;
}

/// Random non-negative A with every column sum at most `max_col_sum`.
inline Matrix random_a(std::mt19937_64& rng, int n, double max_col_sum, double density = 0.6) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (u(rng) < density) a(i, j) = u(rng);
    }
    const double target = max_col_sum * u(rng);
    const double s = a.col(j).sum();
    if (s > 0.0) a.col(j) *= target / s;
  }
  return a;
}

inline Vector random_positive(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

inline SectorKind random_kind(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(0, 9);
  const int v = k(rng);
  if (v < 6) return SectorKind::Goods;
  if (v < 9) return SectorKind::Service;
  return SectorKind::SupportNoPhysicalFlow;
}

/// Random valid model with `categories` impact rows.
inline EconomyModel random_model(std::mt19937_64& rng, int n, int categories = 2, double max_col_sum = 0.8) {
  std::vector<SectorKind> kinds;
  for (int i = 0; i < n; ++i) kinds.push_back(random_kind(rng));
  std::vector<ImpactCategory> impacts;
  for (int k = 0; k < categories; ++k) impacts.push_back({"cat" + std::to_string(k), "unit"});
  Matrix r(categories, n);
  for (int k = 0; k < categories; ++k) r.row(k) = random_positive(rng, n, 0.0, 2.0).transpose();
  return build_model(make_sectors(kinds), random_a(rng, n, max_col_sum), random_positive(rng, n, 0.0, 1000.0),
                     random_positive(rng, n, 1.0, 5000.0), impacts, r);
}

/// Random positive $/kg price for every goods sector.
inline PriceMap random_prices(std::mt19937_64& rng, const EconomyModel& m) {
  std::uniform_real_distribution<double> u(0.05, 50.0);
  PriceMap out;
  for (const auto& s : m.sectors()) {
    if (s.kind == SectorKind::Goods) out[s.id] = {s.id, u(rng), PriceMethod::DataDriven, PriceQuality::Good};
  }
  return out;
}

/// Truncated Neumann series sum_k A^k, stopping once ||A^k||_inf < 1e-12.
inline Matrix neumann(const Matrix& a) {
  const auto n = a.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 0; k < 10000; ++k) {
    term = term * a;
    sum += term;
    if (term.cwiseAbs().rowwise().sum().maxCoeff() < 1e-12) break;
  }
  return sum;
}

inline double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing_support
