#pragma once

// Input-driven method: characteristic price from the mass of a sector's
// goods inputs, corrected by a waste coefficient. Sectors that depend on
// each other's prices are resolved in dependency order; mutual dependencies
// are closed by fixed-point iteration.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "physeeio/core_model.hpp"
#include "physeeio/error.hpp"
#include "physeeio/physical_extension.hpp"
#include "physeeio/price_imputation.hpp"

namespace physeeio {

struct WasteCoefficient {
  SectorId sector;
  double w = 0.0;
};

using WasteTable = std::map<SectorId, double>;

inline void validate_waste(double w) {
  if (!(w >= 0.0 && w < 1.0)) {
    throw Error(ErrorCode::InvalidWasteCoefficient,
                "waste coefficient must lie in [0, 1), got " + std::to_string(w));
  }
}

/// Input masses z_{i,j} (kg) used by sector i, indexed by model sector j.
struct InputMassRow {
  SectorId sector;
  std::vector<double> masses;

  double total() const {
    return std::accumulate(masses.begin(), masses.end(), 0.0);
  }
};

/// p_i = x_i / ((1 - w_i) * sum_j z_{i,j}), in $/kg.
inline double input_driven_price(double output_usd, const InputMassRow& row, double waste) {
  validate_waste(waste);
  if (!(output_usd > 0.0)) {
    throw Error(ErrorCode::NegativeValue, "gross output of '" + row.sector.code + "' must be positive");
  }
  const double mass = row.total();
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::ZeroInputMass, "sector '" + row.sector.code + "' has no goods input mass");
  }
  return output_usd / ((1.0 - waste) * mass);
}

/// Input masses of sector `i` from the monetary use flows A(j,i) * x_i
/// divided by each goods input's price. Service and support inputs carry no
/// mass. Throws UnresolvedDependency if a goods input has no price.
inline InputMassRow derive_input_masses(const EconomyModel& model, const PriceMap& resolved,
                                        std::size_t i) {
  const auto& a = model.direct_requirements();
  const double xi = model.gross_output()(static_cast<Eigen::Index>(i));
  InputMassRow row{model.sectors()[i].id, std::vector<double>(model.size(), 0.0)};
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& src = model.sectors()[j];
    const double coef = a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
    if (src.kind != SectorKind::Goods || coef == 0.0) continue;
    auto it = resolved.find(src.id);
    if (it == resolved.end() || it->second.is_unity()) {
      throw Error(ErrorCode::UnresolvedDependency,
                  "sector '" + row.sector.code + "' uses goods from '" + src.id.code +
                      "' which has no price yet");
    }
    row.masses[j] = coef * xi / it->second.price;
  }
  return row;
}

struct MassBalanceOptions {
  double tolerance = 1e-8;        // max relative price change at convergence
  std::size_t max_iterations = 500;
  // After meeting `tolerance` iteration continues while the change keeps
  // shrinking, down to this floor.
  double polish_floor = 1e-15;
};

struct InputDrivenRecord {
  PriceEstimate estimate;
  InputMassRow inputs;
  double waste = 0.0;
  bool waste_defaulted = false;
  std::size_t pass = 0;
  bool in_cycle = false;
  /// p_i * (1 - w_i) * sum z - x_i, in USD.
  double closure_residual = 0.0;
};

struct CycleReport {
  std::vector<SectorId> members;
  std::size_t iterations = 0;
  double final_change = 0.0;
  bool converged = false;
  bool damped = false;
};

struct MassBalanceResult {
  PriceMap prices;  // input map plus every resolved input-driven sector
  std::vector<InputDrivenRecord> records;
  std::vector<SectorReject> rejects;
  std::vector<CycleReport> cycles;
  std::vector<std::string> warnings;
};

namespace detail {

/// Tarjan SCC over the dependency graph; components come out with every
/// component's dependencies ahead of it.
inline std::vector<std::vector<std::size_t>> strongly_connected(
    const std::vector<std::vector<std::size_t>>& deps) {
  const std::size_t n = deps.size();
  std::vector<long> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  long counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : deps[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return out;
}

}  // namespace detail

/// Fills in prices for every goods sector missing from `partial` using the
/// input-driven mass balance. When `eligible` is given, only those sectors
/// are resolved; other unpriced goods sectors stay unpriced.
inline MassBalanceResult resolve_input_driven(const EconomyModel& model, const PriceMap& partial,
                                              const WasteTable& waste,
                                              const MassBalanceOptions& opts = {},
                                              const std::set<SectorId>* eligible = nullptr) {
  MassBalanceResult result;
  result.prices = partial;
  const auto& a = model.direct_requirements();
  const auto& x = model.gross_output();
  const auto& sectors = model.sectors();

  std::vector<std::size_t> unresolved;  // model indices
  std::vector<long> local(model.size(), -1);
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (sectors[i].kind != SectorKind::Goods) continue;
    auto it = partial.find(sectors[i].id);
    if (it != partial.end() && !it->second.is_unity()) continue;
    if (eligible && !eligible->count(sectors[i].id)) continue;
    local[i] = static_cast<long>(unresolved.size());
    unresolved.push_back(i);
  }

  std::vector<double> w(unresolved.size(), 0.0);
  std::vector<bool> w_defaulted(unresolved.size(), false);
  for (std::size_t k = 0; k < unresolved.size(); ++k) {
    const auto& id = sectors[unresolved[k]].id;
    if (auto it = waste.find(id); it != waste.end()) {
      validate_waste(it->second);
      w[k] = it->second;
    } else {
      w_defaulted[k] = true;
      result.warnings.push_back("sector '" + id.code + "' has no waste coefficient; using 0");
    }
  }

  // k depends on l when unresolved sector l supplies goods to unresolved k
  std::vector<std::vector<std::size_t>> deps(unresolved.size());
  for (std::size_t k = 0; k < unresolved.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(unresolved[k]);
    for (std::size_t l = 0; l < unresolved.size(); ++l) {
      if (a(static_cast<Eigen::Index>(unresolved[l]), i) > 0.0) deps[k].push_back(l);
    }
  }
  const auto components = detail::strongly_connected(deps);

  std::vector<std::size_t> pass(unresolved.size(), 0);
  std::vector<bool> failed(unresolved.size(), false);
  std::map<SectorId, SectorReject> rejects;

  auto reject = [&](std::size_t k, ErrorCode code, const std::string& msg) {
    failed[k] = true;
    const auto& id = sectors[unresolved[k]].id;
    rejects.emplace(id, SectorReject{id, code, msg});
  };

  auto finish = [&](std::size_t k, double price, bool in_cycle) {
    const std::size_t i = unresolved[k];
    const auto& id = sectors[i].id;
    PriceEstimate est{id, price, PriceMethod::InputDriven, PriceQuality::MassBalance};
    result.prices[id] = est;
    result.records.push_back({est, InputMassRow{id, {}}, w[k], w_defaulted[k], pass[k], in_cycle, 0.0});
  };

  for (const auto& comp : components) {
    std::set<std::size_t> members(comp.begin(), comp.end());
    const bool is_cycle =
        comp.size() > 1 ||
        std::find(deps[comp[0]].begin(), deps[comp[0]].end(), comp[0]) != deps[comp[0]].end();

    std::size_t level = 0;
    std::optional<std::string> blocked;
    for (std::size_t k : comp) {
      for (std::size_t l : deps[k]) {
        if (members.count(l)) continue;
        level = std::max(level, pass[l] + 1);
        if (failed[l]) {
          blocked = "depends on unresolved sector '" + sectors[unresolved[l]].id.code + "'";
        }
      }
    }
    for (std::size_t k : comp) pass[k] = level;
    if (blocked) {
      for (std::size_t k : comp) reject(k, ErrorCode::UnresolvedDependency, *blocked);
      continue;
    }

    if (!is_cycle) {
      const std::size_t k = comp[0];
      try {
        const auto row = derive_input_masses(model, result.prices, unresolved[k]);
        finish(k, input_driven_price(x(static_cast<Eigen::Index>(unresolved[k])), row, w[k]), false);
      } catch (const Error& e) {
        reject(k, e.code(), e.detail());
      }
      continue;
    }

    // Mutually dependent sectors. Mass from inputs outside the component is
    // fixed; inside, it depends on the prices being solved for.
    CycleReport report;
    for (std::size_t k : comp) report.members.push_back(sectors[unresolved[k]].id);
    std::vector<double> external(comp.size(), 0.0);
    std::optional<std::string> missing;
    for (std::size_t c = 0; c < comp.size(); ++c) {
      const auto i = static_cast<Eigen::Index>(unresolved[comp[c]]);
      for (std::size_t j = 0; j < model.size(); ++j) {
        const double coef = a(static_cast<Eigen::Index>(j), i);
        if (sectors[j].kind != SectorKind::Goods || coef == 0.0) continue;
        if (local[j] >= 0 && members.count(static_cast<std::size_t>(local[j]))) continue;
        auto it = result.prices.find(sectors[j].id);
        if (it == result.prices.end() || it->second.is_unity()) {
          missing = "cycle input '" + sectors[j].id.code + "' has no price";
          continue;
        }
        external[c] += coef * x(i) / it->second.price;
      }
    }
    if (missing) {
      for (std::size_t k : comp) reject(k, ErrorCode::UnresolvedDependency, *missing);
      result.cycles.push_back(std::move(report));
      continue;
    }
    if (std::all_of(external.begin(), external.end(), [](double e) { return e == 0.0; })) {
      for (std::size_t k : comp) {
        reject(k, ErrorCode::ZeroInputMass, "cycle has no goods inputs from outside itself");
      }
      result.cycles.push_back(std::move(report));
      continue;
    }

    double seed = 0.0;
    std::size_t seeded = 0;
    for (const auto& [id, est] : result.prices) {
      const auto idx = model.index_of(id);
      if (!idx || sectors[*idx].kind != SectorKind::Goods || est.is_unity()) continue;
      seed += est.price;
      ++seeded;
    }
    seed = seeded > 0 ? seed / static_cast<double>(seeded) : 1.0;

    std::vector<double> price(comp.size(), seed);
    std::vector<double> next(comp.size());
    double change = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    bool damping = false;
    bool met = false;
    std::size_t iter = 0;
    while (iter < opts.max_iterations) {
      ++iter;
      for (std::size_t c = 0; c < comp.size(); ++c) {
        const auto i = static_cast<Eigen::Index>(unresolved[comp[c]]);
        double mass = external[c];
        for (std::size_t d = 0; d < comp.size(); ++d) {
          mass += a(static_cast<Eigen::Index>(unresolved[comp[d]]), i) * x(i) / price[d];
        }
        double p = x(i) / ((1.0 - w[comp[c]]) * mass);
        if (damping) p = 0.5 * price[c] + 0.5 * p;
        next[c] = p;
      }
      change = 0.0;
      for (std::size_t c = 0; c < comp.size(); ++c) {
        change = std::max(change, std::abs(next[c] - price[c]) / std::abs(price[c]));
      }
      if (!met && change > previous && iter > 1) damping = true;
      if (met && !(change < previous)) break;
      price = next;
      if (change < opts.tolerance) met = true;
      if (met && change <= opts.polish_floor) break;
      previous = change;
    }
    report.iterations = iter;
    report.final_change = change;
    report.converged = met;
    report.damped = damping;
    if (!met) {
      std::string names;
      for (const auto& id : report.members) names += (names.empty() ? "" : ", ") + id.code;
      for (std::size_t k : comp) {
        reject(k, ErrorCode::NonConvergentCycle,
               "fixed point did not converge within " + std::to_string(opts.max_iterations) +
                   " iterations for cycle {" + names + "}");
      }
      result.cycles.push_back(std::move(report));
      continue;
    }
    for (std::size_t c = 0; c < comp.size(); ++c) finish(comp[c], price[c], true);
    result.cycles.push_back(std::move(report));
  }

  // Final input rows and closure residuals, with every price in place.
  for (auto& rec : result.records) {
    const std::size_t i = model.require_index(rec.estimate.sector);
    rec.inputs = derive_input_masses(model, result.prices, i);
    rec.closure_residual = rec.estimate.price * (1.0 - rec.waste) * rec.inputs.total() -
                           x(static_cast<Eigen::Index>(i));
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const auto& l, const auto& r) { return l.estimate.sector < r.estimate.sector; });
  for (auto& [id, r] : rejects) result.rejects.push_back(std::move(r));
  return result;
}

}  // namespace physeeio
