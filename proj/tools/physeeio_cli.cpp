// physeeio command-line front end.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "physeeio/physeeio.hpp"

namespace fs = std::filesystem;
using namespace physeeio;

namespace {

struct ModelOptions {
  std::string sectors, a, demand, output, satellite;

  void add(CLI::App* app, bool required) {
    auto* o1 = app->add_option("--sectors", sectors, "sectors.csv")->check(CLI::ExistingFile);
    auto* o2 = app->add_option("--a", a, "direct requirements matrix CSV")->check(CLI::ExistingFile);
    auto* o3 = app->add_option("--demand", demand, "final demand CSV")->check(CLI::ExistingFile);
    auto* o4 = app->add_option("--output", output, "gross output CSV")->check(CLI::ExistingFile);
    auto* o5 = app->add_option("--satellite", satellite, "satellite intensities CSV")->check(CLI::ExistingFile);
    if (required) {
      for (auto* o : {o1, o2, o3, o4, o5}) o->required();
    }
  }

  io::ModelFiles files() const { return {sectors, a, demand, output, satellite}; }
};

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

io::Json read_json(const fs::path& p) { return io::Json::parse(io::read_file(p)); }

int model_build(const ModelOptions& mo) {
  const auto model = io::load_model(mo.files());
  const LeontiefSolver solver(model.direct_requirements());
  const Vector xhat = solver.solve(model.final_demand());
  io::Json sectors = io::Json::array();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    io::Json j;
    j["sector_id"] = model.sectors()[i].id.code;
    j["kind"] = std::string(to_string(model.sectors()[i].kind));
    j["total_output_usd"] = io::number(xhat(idx));
    for (const auto& cat : model.impacts()) {
      j["impact_" + cat.key] = io::number(model.intensity_row(cat.key)(idx) * xhat(idx));
    }
    sectors.push_back(j);
  }
  io::Json doc;
  doc["sectors"] = sectors;
  doc["condition_number_1"] = io::number(solver.condition_number());
  doc["warnings"] = solver.warnings();
  std::cout << io::dump(doc);
  return 0;
}

struct PriceOptions {
  std::string trade, duty, hs2naics, naics2bea, tau, waste, production;
};

int prices_estimate(const ModelOptions& mo, const PriceOptions& po, unsigned threads) {
  const auto ds = load_datasets(mo.files(), {opt_path(po.trade), opt_path(po.duty), opt_path(po.hs2naics),
                                             opt_path(po.naics2bea), opt_path(po.tau), opt_path(po.waste),
                                             opt_path(po.production)});
  const auto run = estimate_prices(ds, {}, threads);
  auto doc = detail::ledger_json(run, ds.model);
  std::vector<std::string> warnings = ds.warnings;
  warnings.insert(warnings.end(), run.warnings.begin(), run.warnings.end());
  doc["warnings"] = warnings;
  std::cout << io::dump(doc);
  return 0;
}

int extend(const std::string& config, std::optional<unsigned> threads) {
  auto cfg = io::load_run_config(config);
  if (threads) cfg.threads = *threads;
  const auto out = run_pipeline(cfg);
  std::cerr << "wrote " << out.files.size() << " files to " << cfg.output_dir.string();
  if (out.uncovered) std::cerr << " (" << out.uncovered << " goods sectors uncovered)";
  std::cerr << "\n";
  return 0;
}

int compare(const fs::path& run) {
  const auto doc = read_json(run / "comparison.json");
  std::cout << "formula: " << doc["formula"].get<std::string>() << "\n";
  for (const auto& r : doc["rows"]) {
    std::printf("%-12s %14.6g Mt %14.6g Mt %8.2f%%%s\n", r["sector_id"].get<std::string>().c_str(),
                r["mass_data_driven_mt"].get<double>(), r["mass_price_driven_mt"].get<double>(),
                r["pct_difference"].get<double>(), r["magnitude_mismatch"].get<bool>() ? "  magnitude differs" : "");
  }
  if (!doc["min_pct_difference"].is_null()) {
    std::printf("range %.2f%% - %.2f%%\n", doc["min_pct_difference"].get<double>(),
                doc["max_pct_difference"].get<double>());
  }
  return 0;
}

int coverage_from_inventory(const fs::path& inventory) {
  const auto report = classify_coverage(parse_inventory(io::read_csv(inventory)));
  const auto& s = report.summary;
  io::Json doc;
  doc["goods_producing"] = s.total;
  doc["good"] = s.good;
  doc["partial"] = s.partial;
  doc["no_flow"] = s.no_flow;
  doc["no_data"] = s.no_data;
  doc["good_percent_floor"] = s.percent_floor(s.good);
  doc["no_data_percent_floor"] = s.percent_floor(s.no_data);
  std::cout << io::dump(doc);
  return 0;
}

int coverage(const fs::path& run) {
  std::cout << io::dump(read_json(run / "coverage.json")["summary"]);
  return 0;
}

int report(const fs::path& run) {
  std::cout << io::read_file(run / "report.txt");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physical and environmental extension of input-output models"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));

  auto* model = app.add_subcommand("model", "model operations")->require_subcommand(1);
  auto* build = model->add_subcommand("build", "load a model and compute total output and impacts");
  ModelOptions build_opts;
  build_opts.add(build, true);

  auto* prices = app.add_subcommand("prices", "price operations")->require_subcommand(1);
  auto* estimate = prices->add_subcommand("estimate", "estimate characteristic prices");
  ModelOptions price_model;
  price_model.add(estimate, true);
  PriceOptions po;
  estimate->add_option("--trade", po.trade)->check(CLI::ExistingFile);
  estimate->add_option("--duty", po.duty)->check(CLI::ExistingFile);
  estimate->add_option("--hs2naics", po.hs2naics)->check(CLI::ExistingFile);
  estimate->add_option("--naics2bea", po.naics2bea)->check(CLI::ExistingFile);
  estimate->add_option("--tau", po.tau)->check(CLI::ExistingFile);
  estimate->add_option("--waste", po.waste)->check(CLI::ExistingFile);
  estimate->add_option("--production", po.production)->check(CLI::ExistingFile);
  unsigned estimate_threads = 0;
  estimate->add_option("--threads", estimate_threads)->check(CLI::Range(1u, 256u));

  auto* ext = app.add_subcommand("extend", "run the full pipeline");
  std::string config;
  ext->add_option("--config", config, "run.toml")->required();
  unsigned ext_threads = 0;
  ext->add_option("--threads", ext_threads)->check(CLI::Range(1u, 256u));

  std::string run_dir, inventory;
  auto* cmp = app.add_subcommand("compare", "data-driven vs price-driven masses of a run");
  cmp->add_option("--run", run_dir)->required()->check(CLI::ExistingDirectory);
  auto* cov = app.add_subcommand("coverage", "coverage summary of a run or an inventory file");
  auto* cov_run = cov->add_option("--run", run_dir)->check(CLI::ExistingDirectory);
  auto* cov_inv = cov->add_option("--inventory", inventory)->check(CLI::ExistingFile);
  cov_run->excludes(cov_inv);
  auto* rep = app.add_subcommand("report", "print the text report of a run");
  rep->add_option("--run", run_dir)->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return model_build(build_opts);
    if (estimate->parsed()) return prices_estimate(price_model, po, estimate_threads ? estimate_threads : threads);
    if (ext->parsed()) {
      std::optional<unsigned> t;
      if (ext_threads) t = ext_threads;
      else if (app.count("--threads")) t = threads;
      return extend(config, t);
    }
    if (cmp->parsed()) return compare(run_dir);
    if (cov->parsed()) {
      if (!inventory.empty()) return coverage_from_inventory(inventory);
      if (run_dir.empty()) {
        std::cerr << "coverage needs --run or --inventory\n";
        return 2;
      }
      return coverage(run_dir);
    }
    if (rep->parsed()) return report(run_dir);
  } catch (const Error& e) {
    std::cerr << error_json(e).dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    io::Json j;
    j["error"] = "InternalError";
    j["message"] = e.what();
    std::cerr << j.dump(2) << "\n";
    return 1;
  }
  return 0;
}
