#pragma once

// Run orchestration: loads every input, picks a price per goods sector in
// the order data-driven -> price-driven -> input-driven, computes the
// physical production and mass-based intensity vectors, and renders the run
// outputs. Nothing is written unless every step before writing succeeded.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "physeeio/core_model.hpp"
#include "physeeio/crosswalk.hpp"
#include "physeeio/error.hpp"
#include "physeeio/io/csv.hpp"
#include "physeeio/io/json_out.hpp"
#include "physeeio/io/model_files.hpp"
#include "physeeio/io/run_config.hpp"
#include "physeeio/mass_balance.hpp"
#include "physeeio/physical_extension.hpp"
#include "physeeio/price_imputation.hpp"
#include "physeeio/quality_report.hpp"

namespace physeeio {

inline constexpr const char* kPercentDifferenceFormula = "|a - b| / ((a + b) / 2) * 100";

struct TradeInputs {
  std::vector<TradeRecord> trade;
  std::vector<DutyRecord> duty;
  Concordance hs2naics;
  Concordance naics2bea;
};

struct Datasets {
  EconomyModel model;
  std::optional<TradeInputs> trade;
  TauTable tau;
  WasteTable waste;
  io::ProductionTable production;
  std::vector<std::string> warnings;
};

/// Optional auxiliary inputs, as paths.
struct AuxiliaryPaths {
  std::optional<std::filesystem::path> trade, duty, hs2naics, naics2bea, tau, waste, production;
};

inline Datasets load_datasets(const io::ModelFiles& model_files, const AuxiliaryPaths& aux) {
  Datasets ds{io::load_model(model_files), std::nullopt, {}, {}, {}, {}};
  if (aux.trade || aux.duty || aux.hs2naics || aux.naics2bea) {
    if (!(aux.trade && aux.duty && aux.hs2naics && aux.naics2bea)) {
      throw Error(ErrorCode::ConfigError, "trade, duty, hs2naics and naics2bea must be given together");
    }
    TradeInputs t;
    t.trade = parse_trade_records(io::read_csv(*aux.trade));
    t.duty = parse_duty_records(io::read_csv(*aux.duty));
    t.hs2naics = parse_concordance(*aux.hs2naics, ConcordanceKind::HsToNaics);
    t.naics2bea = parse_concordance(*aux.naics2bea, ConcordanceKind::NaicsToBea);
    for (const auto& w : t.hs2naics.warnings) ds.warnings.push_back(w);
    for (const auto& w : t.naics2bea.warnings) ds.warnings.push_back(w);
    ds.trade = std::move(t);
  }
  if (aux.tau) ds.tau = io::parse_tau(io::read_csv(*aux.tau));
  if (aux.waste) ds.waste = io::parse_waste(io::read_csv(*aux.waste), &ds.model);
  if (aux.production) ds.production = io::parse_production(io::read_csv(*aux.production), &ds.model);
  return ds;
}

/// Parses and validates every input named by the config. Throws on the first
/// problem, before any computation.
inline Datasets parse_inputs(const io::RunConfig& cfg) {
  const auto& in = cfg.inputs;
  auto ds = load_datasets({in.sectors, in.a, in.demand, in.gross_output, in.satellite},
                          {in.trade, in.duty, in.hs2naics, in.naics2bea, in.tau, in.waste, in.production});
  for (const auto& [sector, method] : cfg.overrides) {
    const auto i = ds.model.index_of(sector);
    if (!i || ds.model.sectors()[*i].kind != SectorKind::Goods) {
      throw Error(ErrorCode::ConfigError, "override names '" + sector.code + "', which is not a goods sector",
                  {cfg.source, 0, 0});
    }
  }
  if (cfg.level) {
    for (const auto& s : ds.model.sectors()) {
      if (s.level != *cfg.level) {
        ds.warnings.push_back("sector '" + s.id.code + "' is tagged " + std::string(to_string(s.level)) +
                              " but the run level is " + std::string(to_string(*cfg.level)));
      }
    }
  }
  return ds;
}

struct LedgerStep {
  PriceMethod method;
  std::string outcome;  // "chosen", "unavailable: ...", "rejected: ..."
};

struct LedgerEntry {
  SectorId sector;
  SectorKind kind = SectorKind::Goods;
  std::optional<PriceEstimate> estimate;  // the chosen one
  std::vector<LedgerStep> chain;
  std::vector<std::string> warnings;
  bool overridden = false;
};

struct PriceRun {
  PriceMap prices;                      // chosen goods prices
  std::map<SectorId, LedgerEntry> ledger;  // every goods-producing sector
  std::optional<AggregationResult> aggregation;
  std::optional<ImputationResult> imputation;
  std::optional<MassBalanceResult> mass_balance;
  std::map<SectorId, PriceEstimate> data_candidates;
  std::map<SectorId, PriceEstimate> price_candidates;
  std::map<SectorId, double> data_masses;   // kg, from production data
  std::map<SectorId, double> price_masses;  // kg, gross output / price-driven price
  std::vector<std::string> warnings;
};

/// Chooses a price for every goods sector.
inline PriceRun estimate_prices(const Datasets& ds, const std::map<SectorId, PriceMethod>& overrides = {},
                                unsigned threads = 1) {
  PriceRun run;
  const auto& model = ds.model;
  const auto& x = model.gross_output();
  std::map<SectorId, std::string> data_unavailable;
  std::map<SectorId, std::string> price_unavailable;

  for (const auto& [sector, prod] : ds.production) {
    const auto i = model.require_index(sector);
    run.data_masses[sector] = prod.mass_kg;
    if (!(prod.mass_kg > 0.0)) {
      data_unavailable[sector] = "rejected: NonPositiveMass: production mass is zero";
      continue;
    }
    run.data_candidates[sector] = PriceEstimate{
        sector, x(static_cast<Eigen::Index>(i)) / prod.mass_kg, PriceMethod::DataDriven,
        prod.complete ? PriceQuality::Good : PriceQuality::Partial};
  }

  if (ds.trade) {
    const Crosswalk cw(ds.trade->hs2naics, ds.trade->naics2bea);
    run.aggregation = aggregate(ds.trade->trade, ds.trade->duty, cw, threads);
    std::vector<IndustryTradeAggregate> in_scope;
    for (const auto& agg : run.aggregation->aggregates) {
      const auto i = model.index_of(agg.sector);
      if (!i) {
        run.warnings.push_back("trade maps to sector '" + agg.sector.code + "' which is not in the model; ignored");
      } else if (model.sectors()[*i].kind != SectorKind::Goods) {
        run.warnings.push_back("trade maps to non-goods sector '" + agg.sector.code + "'; ignored");
      } else {
        in_scope.push_back(agg);
      }
    }
    run.imputation = impute_prices(in_scope, ds.tau, threads);
    for (const auto& w : run.imputation->warnings) run.warnings.push_back(w);
    for (const auto& est : run.imputation->estimates) {
      run.price_candidates[est.sector] = est;
      const auto i = model.require_index(est.sector);
      run.price_masses[est.sector] = production_from_gross_output(x(static_cast<Eigen::Index>(i)), est.price);
    }
    for (const auto& r : run.imputation->rejects) {
      price_unavailable[r.sector] = "rejected: " + std::string(to_string(r.reason)) + ": " + r.message;
    }
  }

  std::set<SectorId> wants_input;
  for (const auto& rec : model.sectors()) {
    if (!rec.goods_producing()) continue;
    LedgerEntry entry{rec.id, rec.kind, std::nullopt, {}, {}, false};
    if (rec.kind == SectorKind::SupportNoPhysicalFlow) {
      entry.warnings.push_back("support sector: no physical flow");
      run.ledger.emplace(rec.id, std::move(entry));
      continue;
    }
    std::vector<PriceMethod> chain{PriceMethod::DataDriven, PriceMethod::PriceDriven, PriceMethod::InputDriven};
    if (auto o = overrides.find(rec.id); o != overrides.end()) {
      chain = {o->second};
      entry.overridden = true;
    }
    for (const auto m : chain) {
      if (m == PriceMethod::DataDriven) {
        if (auto c = run.data_candidates.find(rec.id); c != run.data_candidates.end()) {
          entry.estimate = c->second;
          entry.chain.push_back({m, "chosen"});
          break;
        }
        auto u = data_unavailable.find(rec.id);
        entry.chain.push_back({m, u != data_unavailable.end() ? u->second : "unavailable: no production data"});
      } else if (m == PriceMethod::PriceDriven) {
        if (auto c = run.price_candidates.find(rec.id); c != run.price_candidates.end()) {
          entry.estimate = c->second;
          entry.chain.push_back({m, "chosen"});
          break;
        }
        auto u = price_unavailable.find(rec.id);
        entry.chain.push_back({m, u != price_unavailable.end() ? u->second : "unavailable: no trade data"});
      } else {
        wants_input.insert(rec.id);
      }
    }
    if (entry.estimate) run.prices[rec.id] = *entry.estimate;
    run.ledger.emplace(rec.id, std::move(entry));
  }

  if (!wants_input.empty()) {
    run.mass_balance = resolve_input_driven(model, run.prices, ds.waste, {}, &wants_input);
    const auto& mb = *run.mass_balance;
    for (const auto& rec : mb.records) {
      auto& entry = run.ledger.at(rec.estimate.sector);
      entry.estimate = rec.estimate;
      entry.chain.push_back({PriceMethod::InputDriven, "chosen"});
      if (rec.waste_defaulted) entry.warnings.push_back("no waste coefficient; using 0");
      run.prices[rec.estimate.sector] = rec.estimate;
    }
    for (const auto& r : mb.rejects) {
      run.ledger.at(r.sector).chain.push_back(
          {PriceMethod::InputDriven, "rejected: " + std::string(to_string(r.reason)) + ": " + r.message});
    }
  }
  return run;
}

struct RunOutputs {
  // file name -> contents, in write order
  std::vector<std::pair<std::string, std::string>> files;
  std::size_t uncovered = 0;
};

namespace detail {

inline io::Json decimal_json(Decimal d) { return d.to_string(); }

inline io::Json ledger_json(const PriceRun& run, const EconomyModel& model) {
  io::Json entries = io::Json::array();
  for (const auto& rec : model.sectors()) {
    auto it = run.ledger.find(rec.id);
    if (it == run.ledger.end()) continue;
    const auto& e = it->second;
    io::Json j;
    j["sector_id"] = rec.id.code;
    j["kind"] = std::string(to_string(rec.kind));
    if (rec.kind == SectorKind::SupportNoPhysicalFlow) {
      j["chosen_method"] = "no_physical_flow";
    } else if (e.estimate) {
      j["chosen_method"] = std::string(to_string(e.estimate->method));
    } else {
      j["chosen_method"] = "uncovered";
    }
    j["price_usd_per_kg"] = e.estimate ? io::number(e.estimate->price) : io::Json(nullptr);
    j["quality"] = e.estimate ? io::Json(std::string(to_string(e.estimate->quality))) : io::Json(nullptr);
    j["override"] = e.overridden;
    io::Json chain = io::Json::array();
    for (const auto& s : e.chain) {
      chain.push_back({{"method", std::string(to_string(s.method))}, {"outcome", s.outcome}});
    }
    j["chain"] = chain;
    j["warnings"] = e.warnings;
    entries.push_back(j);
  }
  io::Json out;
  out["goods_producing_sectors"] = run.ledger.size();
  out["method_order"] = {"data_driven", "price_driven", "input_driven"};
  out["entries"] = entries;
  return out;
}

}  // namespace detail

/// Computes every output document for a loaded dataset.
inline RunOutputs compute_outputs(const Datasets& ds, const io::RunConfig& cfg) {
  const auto& model = ds.model;
  const auto run = estimate_prices(ds, cfg.overrides, cfg.threads);
  const LeontiefSolver solver(model.direct_requirements());
  const Vector xhat = solver.solve(model.final_demand());

  io::Json meta;
  meta["year"] = cfg.year;
  meta["level"] = cfg.level ? std::string(to_string(*cfg.level)) : std::string();
  meta["sectors"] = model.size();

  // physical production
  RunOutputs out;
  io::Json prod = io::Json::array();
  std::vector<std::optional<Tagged>> physical(model.size());
  std::vector<std::string> uncovered;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& rec = model.sectors()[i];
    io::Json j;
    j["sector_id"] = rec.id.code;
    j["kind"] = std::string(to_string(rec.kind));
    if (rec.kind == SectorKind::Goods && !run.prices.count(rec.id)) {
      uncovered.push_back(rec.id.code);
      j["unit"] = "kg";
      j["value"] = nullptr;
      j["value_mt"] = nullptr;
      j["method"] = "uncovered";
      prod.push_back(j);
      continue;
    }
    physical[i] = physical_entry(rec, xhat(static_cast<Eigen::Index>(i)), run.prices);
    j["unit"] = std::string(to_string(physical[i]->unit));
    j["value"] = io::number(physical[i]->value);
    j["value_mt"] = physical[i]->unit == Unit::Kilogram ? io::number(physical[i]->value / kKgPerMegatonne)
                                                        : io::Json(nullptr);
    if (rec.kind == SectorKind::Goods) {
      j["method"] = std::string(to_string(run.prices.at(rec.id).method));
    } else if (rec.kind == SectorKind::Service) {
      j["method"] = "unity_service";
    } else {
      j["method"] = "no_physical_flow";
    }
    prod.push_back(j);
  }
  out.uncovered = uncovered.size();
  {
    io::Json doc;
    doc["metadata"] = meta;
    doc["total_output_basis"] = "leontief_inverse_times_final_demand";
    doc["sectors"] = prod;
    doc["uncovered"] = uncovered;
    out.files.emplace_back("physical_production.json", io::dump(doc));
  }

  // mass-based intensities
  {
    io::Json cats = io::Json::array();
    for (const auto& cat : model.impacts()) {
      const Vector r = model.intensity_row(cat.key);
      io::Json rows = io::Json::array();
      io::Json excluded = io::Json::array();
      for (std::size_t i = 0; i < model.size(); ++i) {
        const auto& rec = model.sectors()[i];
        const double ri = r(static_cast<Eigen::Index>(i));
        if (rec.kind == SectorKind::SupportNoPhysicalFlow || !physical[i]) {
          excluded.push_back(rec.id.code);
          continue;
        }
        Tagged rstar = rec.kind == SectorKind::Goods ? Tagged{run.prices.at(rec.id).price * ri, Unit::ImpactPerKg}
                                                     : Tagged{ri, Unit::ImpactPerUsd};
        const Tagged impact = rstar * *physical[i];
        rows.push_back({{"sector_id", rec.id.code},
                        {"unit", std::string(to_string(rstar.unit))},
                        {"value", io::number(rstar.value)},
                        {"impact", io::number(impact.value)}});
      }
      cats.push_back({{"key", cat.key}, {"sectors", rows}, {"excluded", excluded}});
    }
    io::Json doc;
    doc["metadata"] = meta;
    doc["categories"] = cats;
    out.files.emplace_back("mass_intensity.json", io::dump(doc));
  }

  out.files.emplace_back("ledger.json", io::dump(detail::ledger_json(run, model)));

  // method comparison
  const auto cmp = compare_methods(run.data_masses, run.price_masses);
  {
    io::Json rows = io::Json::array();
    for (const auto& r : cmp.rows) {
      rows.push_back({{"sector_id", r.sector.code},
                      {"mass_data_driven_kg", io::number(r.mass_data_driven)},
                      {"mass_price_driven_kg", io::number(r.mass_price_driven)},
                      {"mass_data_driven_mt", io::number(r.mass_data_driven / kKgPerMegatonne)},
                      {"mass_price_driven_mt", io::number(r.mass_price_driven / kKgPerMegatonne)},
                      {"pct_difference", io::number(r.pct_difference)},
                      {"magnitude_mismatch", r.magnitude_mismatch}});
    }
    io::Json nc = io::Json::array();
    for (const auto& s : cmp.not_comparable) nc.push_back(s.code);
    io::Json doc;
    doc["metadata"] = meta;
    doc["formula"] = kPercentDifferenceFormula;
    doc["rows"] = rows;
    doc["not_comparable"] = nc;
    doc["min_pct_difference"] = cmp.min_pct ? io::number(*cmp.min_pct) : io::Json(nullptr);
    doc["max_pct_difference"] = cmp.max_pct ? io::number(*cmp.max_pct) : io::Json(nullptr);
    out.files.emplace_back("comparison.json", io::dump(doc));
  }

  // coverage
  std::vector<InventoryEntry> inventory;
  for (const auto& rec : model.sectors()) {
    if (!rec.goods_producing()) continue;
    InventoryEntry e{rec.id};
    e.physical_flow = rec.kind == SectorKind::Goods;
    if (auto p = ds.production.find(rec.id); p != ds.production.end()) {
      e.has_direct_data = true;
      e.direct_data_complete = p->second.complete;
    }
    inventory.push_back(e);
  }
  const auto coverage = classify_coverage(inventory);
  io::Json coverage_doc;
  {
    const auto& s = coverage.summary;
    io::Json rows = io::Json::array();
    for (const auto& c : coverage.sectors) {
      rows.push_back({{"sector_id", c.sector.code}, {"coverage", std::string(to_string(c.coverage))}});
    }
    coverage_doc["metadata"] = meta;
    coverage_doc["summary"] = {{"goods_producing", s.total},
                               {"good", s.good},
                               {"partial", s.partial},
                               {"no_flow", s.no_flow},
                               {"no_data", s.no_data},
                               {"good_percent_floor", s.percent_floor(s.good)},
                               {"no_data_percent_floor", s.percent_floor(s.no_data)},
                               {"no_data_fraction", io::number(s.fraction(s.no_data))}};
    coverage_doc["sectors"] = rows;
    out.files.emplace_back("coverage.json", io::dump(coverage_doc));
  }

  // run report: diagnostics for every phase
  io::Json report;
  report["metadata"] = meta;
  report["conventions"] = {
      {"percent_difference", kPercentDifferenceFormula},
      {"crosswalk_split", "equal 1/k over BEA targets unless the concordance gives shares"},
      {"duty_tiers", "three equal-width intervals over non-zero rates; top interval closed at max"},
      {"duty_tier_scope", "goods sectors of the loaded model with trade data"},
      {"input_mass_scope", "all goods inputs in the direct requirements matrix"},
      {"mass_unit", "kg; Mt = 1e9 kg"}};
  report["leontief"] = {{"condition_number_1", io::number(solver.condition_number())},
                        {"warnings", solver.warnings()}};
  if (run.aggregation) {
    const auto& d = run.aggregation->diagnostics;
    io::Json unmapped = io::Json::object();
    for (const auto& [code, n] : d.unmapped_codes) unmapped[code] = n;
    report["crosswalk"] = {{"trade_records", d.trade_records},
                           {"duty_records", d.duty_records},
                           {"input_cif_usd", detail::decimal_json(d.input_cif)},
                           {"input_net_weight_kg", detail::decimal_json(d.input_weight)},
                           {"input_duty_usd", detail::decimal_json(d.input_duty)},
                           {"unmapped_cif_usd", detail::decimal_json(d.unmapped_cif)},
                           {"unmapped_net_weight_kg", detail::decimal_json(d.unmapped_weight)},
                           {"unmapped_duty_usd", detail::decimal_json(d.unmapped_duty)},
                           {"multi_mapped_codes", d.multi_mapped_codes},
                           {"partially_mapped_codes", d.partially_mapped_codes},
                           {"unmapped_codes", unmapped}};
    io::Json aggs = io::Json::array();
    for (const auto& a : run.aggregation->aggregates) {
      aggs.push_back({{"sector_id", a.sector.code},
                      {"cif_usd", detail::decimal_json(a.cif_total)},
                      {"net_weight_kg", detail::decimal_json(a.net_weight_total)},
                      {"duty_usd", detail::decimal_json(a.duty_total)}});
    }
    report["trade_aggregates"] = aggs;
  }
  if (run.imputation) {
    const auto& t = run.imputation->tiering;
    io::Json tiers;
    tiers["degenerate"] = t.degenerate;
    tiers["empty"] = t.empty;
    if (t.bounds) {
      tiers["bounds"] = {{"min", io::number(t.bounds->min)},
                         {"low_upper", io::number(t.bounds->low_upper)},
                         {"medium_upper", io::number(t.bounds->medium_upper)},
                         {"max", io::number(t.bounds->max)}};
    }
    io::Json asg = io::Json::array();
    for (const auto& a : t.assignments) {
      asg.push_back({{"sector_id", a.sector.code},
                     {"raw_rate", io::number(a.raw_rate)},
                     {"tier", std::string(to_string(a.tier))},
                     {"assigned_rate", io::number(a.assigned_rate)}});
    }
    tiers["assignments"] = asg;
    report["duty_tiers"] = tiers;
    io::Json rej = io::Json::array();
    for (const auto& r : run.imputation->rejects) {
      rej.push_back({{"sector_id", r.sector.code}, {"reason", std::string(to_string(r.reason))}, {"message", r.message}});
    }
    report["price_driven_rejects"] = rej;
  }
  if (run.mass_balance) {
    const auto& mb = *run.mass_balance;
    io::Json recs = io::Json::array();
    for (const auto& r : mb.records) {
      recs.push_back({{"sector_id", r.estimate.sector.code},
                      {"price_usd_per_kg", io::number(r.estimate.price)},
                      {"waste_coefficient", io::number(r.waste)},
                      {"input_mass_kg", io::number(r.inputs.total())},
                      {"pass", r.pass},
                      {"in_cycle", r.in_cycle},
                      {"closure_residual_usd", io::number(r.closure_residual)}});
    }
    io::Json cycles = io::Json::array();
    for (const auto& c : mb.cycles) {
      io::Json members = io::Json::array();
      for (const auto& m : c.members) members.push_back(m.code);
      cycles.push_back({{"members", members},
                        {"converged", c.converged},
                        {"iterations", c.iterations},
                        {"damped", c.damped}});
    }
    report["input_driven"] = {{"records", recs}, {"cycles", cycles}};
  }
  std::vector<std::string> warnings = ds.warnings;
  warnings.insert(warnings.end(), run.warnings.begin(), run.warnings.end());
  if (run.mass_balance) warnings.insert(warnings.end(), run.mass_balance->warnings.begin(), run.mass_balance->warnings.end());
  report["warnings"] = warnings;
  report["uncovered"] = uncovered;
  out.files.emplace_back("run_report.json", io::dump(report));

  // human-readable summary
  std::ostringstream txt;
  txt << "Physical extension run";
  if (!cfg.year.empty()) txt << " - year " << cfg.year;
  if (cfg.level) txt << " - " << to_string(*cfg.level) << " level";
  txt << "\n\n";
  txt << "Percent difference: " << kPercentDifferenceFormula << " (range 0-200%)\n";
  txt << "Masses in kg; Mt = 1e9 kg\n\n";
  txt << "Method ledger\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %-12s %-10s %-18s %16s %12s\n", "sector", "kind", "method", "price $/kg", "quality");
  txt << line;
  for (const auto& rec : model.sectors()) {
    auto it = run.ledger.find(rec.id);
    if (it == run.ledger.end()) continue;
    const auto& e = it->second;
    std::string method = rec.kind == SectorKind::SupportNoPhysicalFlow ? "no_physical_flow"
                         : e.estimate                                  ? std::string(to_string(e.estimate->method))
                                                                       : "uncovered";
    char price[32] = "-";
    if (e.estimate) std::snprintf(price, sizeof price, "%.6g", e.estimate->price);
    std::snprintf(line, sizeof line, "  %-12s %-10s %-18s %16s %12s\n", rec.id.code.c_str(),
                  std::string(to_string(rec.kind)).c_str(), method.c_str(), price,
                  e.estimate ? std::string(to_string(e.estimate->quality)).c_str() : "-");
    txt << line;
  }
  txt << "\nCoverage of goods-producing sectors\n";
  const auto& s = coverage.summary;
  txt << "  total " << s.total << ", good " << s.good << ", partial " << s.partial << ", no physical flow "
      << s.no_flow << ", no data " << s.no_data << " (" << s.percent_floor(s.no_data) << "%)\n";
  txt << "\nData-driven vs price-driven masses\n";
  if (cmp.rows.empty()) txt << "  none comparable\n";
  for (const auto& r : cmp.rows) {
    std::snprintf(line, sizeof line, "  %-12s %14.6g Mt %14.6g Mt %8.2f%%%s\n", r.sector.code.c_str(),
                  r.mass_data_driven / kKgPerMegatonne, r.mass_price_driven / kKgPerMegatonne, r.pct_difference,
                  r.magnitude_mismatch ? "  magnitude differs" : "");
    txt << line;
  }
  if (!uncovered.empty()) {
    txt << "\nUncovered goods sectors:";
    for (const auto& u : uncovered) txt << " " << u;
    txt << "\n";
  }
  if (!warnings.empty()) {
    txt << "\nWarnings\n";
    for (const auto& w : warnings) txt << "  " << w << "\n";
  }
  out.files.emplace_back("report.txt", txt.str());
  return out;
}

/// Full run: parse, compute, then write outputs into cfg.output_dir.
inline RunOutputs run_pipeline(const io::RunConfig& cfg) {
  const auto ds = parse_inputs(cfg);
  auto out = compute_outputs(ds, cfg);
  std::filesystem::create_directories(cfg.output_dir);
  for (const auto& [name, text] : out.files) io::write_text(cfg.output_dir / name, text);
  return out;
}

/// Structured error document for a failed run.
inline io::Json error_json(const Error& e) {
  io::Json j;
  j["error"] = std::string(to_string(e.code()));
  j["message"] = e.detail();
  if (!e.where().file.empty()) j["file"] = e.where().file;
  if (e.where().line > 0) j["line"] = e.where().line;
  if (e.where().column > 0) j["column"] = e.where().column;
  return j;
}

}  // namespace physeeio
