#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace physeeio;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("physeeio_cli_ingest_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

io::RunConfig toy_config(const fs::path& out, unsigned threads = 1) {
  auto cfg = io::load_run_config(fixture("toy/run.toml"));
  cfg.output_dir = out;
  cfg.threads = threads;
  return cfg;
}

std::string slurp(const fs::path& p) { return io::read_file(p); }

io::Json output_json(const fs::path& dir, const std::string& name) { return io::Json::parse(slurp(dir / name)); }

/// Copies the toy fixture into `dir` so single files can be broken.
fs::path copy_toy(const std::string& name) {
  const auto dir = scratch(name);
  for (const auto& e : fs::directory_iterator(fixture("toy"))) {
    if (e.is_regular_file()) fs::copy_file(e.path(), dir / e.path().filename());
  }
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

ErrorCode run_error(const io::RunConfig& cfg) {
  try {
    run_pipeline(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "pipeline did not fail";
  return ErrorCode::ConfigError;
}

const char* kOutputs[] = {"physical_production.json", "mass_intensity.json", "ledger.json", "comparison.json",
                          "coverage.json",            "run_report.json",     "report.txt"};

}  // namespace

TEST(Pipeline, ToyMatchesGoldenFiles) {
  const auto out = scratch("golden");
  run_pipeline(toy_config(out));
  for (const char* name : {"physical_production.json", "mass_intensity.json", "ledger.json", "comparison.json",
                           "coverage.json", "run_report.json"}) {
    EXPECT_EQ(slurp(out / name), slurp(fixture("toy/golden") / name)) << name;
  }
}

TEST(Pipeline, ToyValuesMatchReferenceComputation) {
  const auto out = scratch("values");
  run_pipeline(toy_config(out));
  const auto ledger = output_json(out, "ledger.json");
  ASSERT_EQ(ledger["entries"].size(), 4u);
  std::map<std::string, io::Json> by;
  for (const auto& e : ledger["entries"]) by[e["sector_id"].get<std::string>()] = e;
  EXPECT_EQ(by["GA"]["chosen_method"], "data_driven");
  EXPECT_EQ(by["GB"]["chosen_method"], "price_driven");
  EXPECT_EQ(by["GC"]["chosen_method"], "input_driven");
  EXPECT_EQ(by["SP"]["chosen_method"], "no_physical_flow");
  EXPECT_DOUBLE_EQ(by["GA"]["price_usd_per_kg"].get<double>(), 2.5);
  EXPECT_NEAR(by["GB"]["price_usd_per_kg"].get<double>(), 4.777777777777778, 1e-10);
  EXPECT_NEAR(by["GC"]["price_usd_per_kg"].get<double>(), 9.974483878450476, 1e-9);

  const auto prod = output_json(out, "physical_production.json")["sectors"];
  EXPECT_NEAR(prod[0]["value"].get<double>(), 549975140.1024588, 1e-2);
  EXPECT_NEAR(prod[1]["value"].get<double>(), 244507408.6637251, 1e-2);
  EXPECT_NEAR(prod[2]["value"].get<double>(), 59189250.272187896, 1e-2);
  EXPECT_EQ(prod[3]["unit"], "usd");
  EXPECT_NEAR(prod[3]["value"].get<double>(), 2783740370.391845, 1e-2);
  EXPECT_EQ(prod[4]["unit"], "none");

  const auto ghg = output_json(out, "mass_intensity.json")["categories"][0];
  EXPECT_EQ(ghg["key"], "ghg_kg_co2e");
  EXPECT_DOUBLE_EQ(ghg["sectors"][0]["value"].get<double>(), 1.25);
  EXPECT_NEAR(ghg["sectors"][1]["value"].get<double>(), 3.8222222222222224, 1e-10);
  EXPECT_NEAR(ghg["sectors"][2]["value"].get<double>(), 11.96938065414057, 1e-9);
  EXPECT_NEAR(ghg["sectors"][2]["impact"].get<double>(), 708458667.1410104, 1e-2);
  EXPECT_EQ(ghg["excluded"][0], "SP");

  const auto cmp = output_json(out, "comparison.json");
  ASSERT_EQ(cmp["rows"].size(), 1u);
  EXPECT_EQ(cmp["rows"][0]["sector_id"], "GA");
  EXPECT_DOUBLE_EQ(cmp["rows"][0]["mass_data_driven_kg"].get<double>(), 1e9);
  EXPECT_NEAR(cmp["rows"][0]["mass_price_driven_kg"].get<double>(), 825958702.0648967, 1e-2);
  EXPECT_NEAR(cmp["rows"][0]["pct_difference"].get<double>(), 19.063004846526663, 1e-9);

  const auto cov = output_json(out, "coverage.json")["summary"];
  EXPECT_EQ(cov["goods_producing"], 4);
  EXPECT_EQ(cov["good"], 1);
  EXPECT_EQ(cov["no_flow"], 1);
  EXPECT_EQ(cov["no_data"], 2);

  const auto report = output_json(out, "run_report.json");
  EXPECT_EQ(report["crosswalk"]["unmapped_cif_usd"], "50");
  EXPECT_EQ(report["trade_aggregates"][0]["cif_usd"], "1650");
  EXPECT_EQ(report["trade_aggregates"][1]["duty_usd"], "215");
  EXPECT_EQ(report["duty_tiers"]["assignments"][0]["tier"], "low");
  EXPECT_EQ(report["duty_tiers"]["assignments"][1]["tier"], "high");
  const auto txt = slurp(out / "report.txt");
  EXPECT_NE(txt.find("|a - b| / ((a + b) / 2) * 100"), std::string::npos);
  EXPECT_NE(txt.find("Mt"), std::string::npos);
}

TEST(Pipeline, ByteIdenticalAcrossRunsAndThreads) {
  const auto a = scratch("repeat_a"), b = scratch("repeat_b"), c = scratch("repeat_c");
  run_pipeline(toy_config(a, 1));
  run_pipeline(toy_config(b, 1));
  run_pipeline(toy_config(c, 8));
  for (const char* name : kOutputs) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(c / name)) << name;
  }
}

TEST(Pipeline, OverrideForcesMethod) {
  auto cfg = toy_config(scratch("override"));
  cfg.overrides[SectorId("GA")] = PriceMethod::PriceDriven;
  cfg.overrides[SectorId("GB")] = PriceMethod::InputDriven;
  run_pipeline(cfg);
  const auto ledger = output_json(cfg.output_dir, "ledger.json");
  EXPECT_EQ(ledger["entries"][0]["chosen_method"], "price_driven");
  EXPECT_EQ(ledger["entries"][0]["override"], true);
  EXPECT_NEAR(ledger["entries"][0]["price_usd_per_kg"].get<double>(), 3.0267857142857144, 1e-10);
  EXPECT_EQ(ledger["entries"][1]["chosen_method"], "input_driven");
  // comparison still uses both estimates for GA
  EXPECT_EQ(output_json(cfg.output_dir, "comparison.json")["rows"].size(), 1u);
}

TEST(Pipeline, OverrideOnNonGoodsSectorRejected) {
  auto cfg = toy_config(scratch("override_bad"));
  cfg.overrides[SectorId("SV")] = PriceMethod::DataDriven;
  EXPECT_EQ(run_error(cfg), ErrorCode::ConfigError);
}

TEST(Pipeline, UncoveredSectorStillCompletes) {
  // GC's only mass-bearing inputs come from GA and GB; force GB to data-driven
  // where no production data exists, leaving GB and then GC without a price
  auto cfg = toy_config(scratch("uncovered"));
  cfg.overrides[SectorId("GB")] = PriceMethod::DataDriven;
  const auto out = run_pipeline(cfg);
  EXPECT_EQ(out.uncovered, 2u);
  const auto ledger = output_json(cfg.output_dir, "ledger.json");
  EXPECT_EQ(ledger["entries"][1]["chosen_method"], "uncovered");
  EXPECT_EQ(ledger["entries"][2]["chosen_method"], "uncovered");
  const auto prod = output_json(cfg.output_dir, "physical_production.json");
  EXPECT_TRUE(prod["sectors"][1]["value"].is_null());
  EXPECT_EQ(prod["uncovered"].size(), 2u);
}

TEST(Pipeline, CycleFixtureClosure) {
  auto cfg = io::load_run_config(fixture("cycle/run.toml"));
  cfg.output_dir = scratch("cycle");
  run_pipeline(cfg);
  const auto report = output_json(cfg.output_dir, "run_report.json");
  for (const auto& rec : report["input_driven"]["records"]) {
    EXPECT_NEAR(rec["price_usd_per_kg"].get<double>(), 7.0, 1e-8);
    EXPECT_TRUE(rec["in_cycle"].get<bool>());
  }
  EXPECT_TRUE(report["input_driven"]["cycles"][0]["converged"].get<bool>());
}

TEST(ParseInputs, ValidFixtureLoads) {
  const auto ds = parse_inputs(toy_config(scratch("parse")));
  EXPECT_EQ(ds.model.size(), 5u);
  ASSERT_TRUE(ds.trade);
  EXPECT_EQ(ds.trade->trade.size(), 5u);
  EXPECT_EQ(ds.tau.size(), 2u);
  EXPECT_EQ(ds.waste.size(), 1u);
  EXPECT_EQ(ds.production.size(), 1u);
  EXPECT_EQ(ds.model.impacts().size(), 2u);
}

TEST(ParseInputs, MissingFileFailsBeforeComputation) {
  const auto dir = copy_toy("missing");
  fs::remove(dir / "duty.csv");
  try {
    io::load_run_config(dir / "run.toml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
    EXPECT_NE(e.where().file.find("duty.csv"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(ParseInputs, WrongHeaderNamesHeader) {
  const auto dir = copy_toy("header");
  write(dir / "tau.csv", "sector,tau\nGA,0.8\n");
  auto cfg = io::load_run_config(dir / "run.toml");
  try {
    run_pipeline(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_NE(e.detail().find("sector,tau"), std::string::npos);
    EXPECT_EQ(e.where().line, 1u);
  }
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(ParseInputs, NegativeWeightAtRow) {
  const auto dir = copy_toy("negative");
  write(dir / "trade.csv", "hs_code,cif_usd,net_weight_kg\n111111,1000,400\n111112,500,-250\n");
  try {
    run_pipeline(io::load_run_config(dir / "run.toml"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_EQ(e.where().line, 3u);
    EXPECT_EQ(e.where().column, 3u);
  }
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(ParseInputs, InvalidEncoding) {
  const auto dir = copy_toy("encoding");
  write(dir / "sectors.csv", "sector_id,name,kind,level\nGA,Bad \xff name,goods,summary\n");
  EXPECT_EQ(run_error(io::load_run_config(dir / "run.toml")), ErrorCode::EncodingError);
}

TEST(ParseInputs, ModelErrorsCarryLocation) {
  const auto dir = copy_toy("model_errors");
  write(dir / "demand.csv", "sector_id,value_usd\nGA,1\nGB,1\nGC,1\nSV,1\n");
  try {
    run_pipeline(io::load_run_config(dir / "run.toml"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaViolation);
    EXPECT_NE(e.detail().find("SP"), std::string::npos);
  }
  write(dir / "demand.csv", slurp(fixture("toy/demand.csv")));
  write(dir / "a.csv",
        "sector_id,GA,GB,GC,SV,SP\nGA,0.9,0,0,0,0\nGB,0.2,0,0,0,0\nGC,0,0,0,0,0\nSV,0,0,0,0,0\nSP,0,0,0,0,0\n");
  EXPECT_EQ(run_error(io::load_run_config(dir / "run.toml")), ErrorCode::NonProductiveEconomy);
}

TEST(RunConfig, ParsesSubset) {
  const auto doc = io::parse_toml(
      "# c\nyear = \"2022\"\nthreads = 4\n[overrides]\n\"GA\" = \"price_driven\" # trailing\n", "x.toml");
  EXPECT_EQ(std::get<std::string>(doc.at("").at("year")), "2022");
  EXPECT_EQ(std::get<long long>(doc.at("").at("threads")), 4);
  EXPECT_EQ(std::get<std::string>(doc.at("overrides").at("GA")), "price_driven");
  EXPECT_THROW(io::parse_toml("a = \n", "x"), Error);
  EXPECT_THROW(io::parse_toml("[t\n", "x"), Error);
  EXPECT_THROW(io::parse_toml("a = 1\na = 2\n", "x"), Error);
}

TEST(RunConfig, RejectsUnknownKeysAndPartialTradeGroup) {
  const auto dir = copy_toy("config");
  write(dir / "bad1.toml", slurp(dir / "run.toml") + "colour = \"red\"\n");
  EXPECT_THROW(io::load_run_config(dir / "bad1.toml"), Error);
  auto text = slurp(dir / "run.toml");
  text.replace(text.find("duty = \"duty.csv\"\n"), std::string("duty = \"duty.csv\"\n").size(), "");
  write(dir / "bad2.toml", text);
  try {
    io::load_run_config(dir / "bad2.toml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
  }
}

namespace {

int run_cli(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd = std::string("\"") + PHYSEEIO_CLI + "\" " + args + " > /dev/null 2> \"" +
                          stderr_file.string() + "\"";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Cli, ExtendSucceedsAndErrorsAreStructured) {
  const auto dir = copy_toy("cli");
  const auto err = dir / "stderr.txt";
  EXPECT_EQ(run_cli("extend --config \"" + (dir / "run.toml").string() + "\" --threads 2", err), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "ledger.json"));
  EXPECT_EQ(slurp(dir / "out" / "ledger.json"), slurp(fixture("toy/golden/ledger.json")));
  EXPECT_EQ(run_cli("report --run \"" + (dir / "out").string() + "\"", err), 0);
  EXPECT_EQ(run_cli("compare --run \"" + (dir / "out").string() + "\"", err), 0);
  EXPECT_EQ(run_cli("coverage --run \"" + (dir / "out").string() + "\"", err), 0);

  fs::remove_all(dir / "out");
  write(dir / "gross_output.csv", "sector_id,value_usd\nGA,x\n");
  EXPECT_NE(run_cli("extend --config \"" + (dir / "run.toml").string() + "\"", err), 0);
  const auto j = io::Json::parse(slurp(err));
  EXPECT_EQ(j["error"], "SchemaViolation");
  EXPECT_EQ(j["line"], 2);
  EXPECT_NE(j["file"].get<std::string>().find("gross_output.csv"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, ModelBuildPricesEstimateAndInventory) {
  const auto dir = copy_toy("cli_sub");
  const auto err = dir / "stderr.txt";
  const auto f = [&](const char* n) { return "\"" + (dir / n).string() + "\""; };
  const std::string model = "--sectors " + f("sectors.csv") + " --a " + f("a.csv") + " --demand " +
                            f("demand.csv") + " --output " + f("gross_output.csv") + " --satellite " +
                            f("satellite.csv");
  EXPECT_EQ(run_cli("model build " + model, err), 0);
  EXPECT_EQ(run_cli("prices estimate " + model + " --trade " + f("trade.csv") + " --duty " + f("duty.csv") +
                        " --hs2naics " + f("hs_naics.csv") + " --naics2bea " + f("naics_bea.csv") + " --tau " +
                        f("tau.csv") + " --waste " + f("waste.csv") + " --production " + f("production.csv"),
                    err),
            0);
  EXPECT_EQ(run_cli("coverage --inventory \"" + fixture("coverage/inventory_263.csv").string() + "\"", err), 0);
  EXPECT_NE(run_cli("prices estimate " + model + " --trade " + f("trade.csv"), err), 0);
}
