#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmelimit/harness.hpp"
#include "test_support.hpp"

using namespace pmelimit;
using nlohmann::json;
using pmelimit::testing::expect_error;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.n = 2;
  c.L = 2.0;
  c.N = 32;
  c.m_values = {2.0, 4.0, 8.0};
  c.initial.bumps = {Bump{{0.0, 0.0, 0.0}, 0.8, 0.9}};
  c.T = 0.02;
  c.samples = 4;
  c.snapshots = 3;
  c.refine.N_list = {16, 32};
  return c;
}

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "pmelimit_tests" / (std::string(info->test_suite_name()) + "_" + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const json& j) {
  try {
    (void)RunConfig::from_json(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
    return e.what();
  }
  ADD_FAILURE() << "config accepted: " << j.dump();
  return {};
}

bool same_tree(const fs::path& a, const fs::path& b, const std::string& skip) {
  std::size_t count = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().filename() == skip) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    if (slurp(entry.path()) != slurp(b / rel)) {
      ADD_FAILURE() << "differs: " << rel;
      return false;
    }
    ++count;
  }
  return count > 0;
}

}  // namespace

TEST(Config, DefaultsMatchExportedJson) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  const RunConfig back = RunConfig::from_json(json::parse(c.to_json().dump()));
  EXPECT_EQ(back.to_json().dump(), c.to_json().dump());
  EXPECT_EQ(c.to_json()["m"], json({8.0, 16.0, 32.0, 64.0}));
}

TEST(Config, PartialJsonKeepsDefaults) {
  const RunConfig c = RunConfig::from_json(json::parse(R"({"T": 0.5, "grid": {"N": 64}})"));
  EXPECT_EQ(c.T, 0.5);
  EXPECT_EQ(c.N, 64);
  EXPECT_EQ(c.L, 4.0);
  EXPECT_EQ(c.m_values.size(), 4u);
}

TEST(Config, FieldLevelErrors) {
  EXPECT_NE(config_error(json::parse(R"({"m": []})")).find("m"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"m": [8, 4]})")).find("increasing"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"m": [1.5]})")).find(">= 2"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"grid": {"N": 2}})")).find("grid"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"grid": {"n": 1}})")).find("kernel"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"bogus": 1})")).find("bogus"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"kernel": "custom"})")).find("kernel"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"growth": {"G_M": 1.0}})")).find("P_M"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"initial": {"bumps": [{"amplitude": 1.5}]}})"))
                .find("initial.bumps[0].amplitude"),
            std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"T": "long"})")).find("T"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"samples": 0})")).find("samples"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"l4_alpha": 1.0})")).find("l4_alpha"), std::string::npos);
  EXPECT_NE(config_error(json::parse(R"({"refine": {"N_list": [64, 96]}})")).find("N_list"), std::string::npos);
  EXPECT_NE(config_error(json::parse("[1, 2]")).find("object"), std::string::npos);
}

TEST(Config, GrowthOffNeedsNoCeiling) {
  const RunConfig c =
      RunConfig::from_json(json::parse(R"({"growth": {"kind": "off"}, "P_M": null})"));
  EXPECT_EQ(c.growth.kind, GrowthLaw::Kind::Off);
  EXPECT_FALSE(c.pressure_ceiling.has_value());
}

TEST(Config, LoadErrors) {
  expect_error(ErrorKind::IoFailure, [] { (void)load_config("/nonexistent/cfg.json"); });
  const fs::path dir = scratch_dir();
  std::ofstream(dir / "broken.json") << "{ not json";
  expect_error(ErrorKind::ConfigInvalid, [&] { (void)load_config((dir / "broken.json").string()); });
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& entry : fs::directory_iterator(PMELIMIT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW((void)load_config(entry.path().string())) << entry.path();
  }
  const RunConfig def = load_config(std::string(PMELIMIT_CONFIG_DIR) + "/default_sweep.json");
  EXPECT_EQ(def.to_json().dump(), RunConfig{}.to_json().dump());
}

TEST(Config, JitterIsSeeded) {
  RunConfig c = small_config();
  c.initial.jitter = 0.1;
  c.seed = 7;
  const ScalarField a = c.initial_density(c.grid(), 2.0);
  EXPECT_EQ(a, c.initial_density(c.grid(), 2.0));
  c.seed = 8;
  EXPECT_NE(a, c.initial_density(c.grid(), 2.0));
}

TEST(ExponentTag, Formatting) {
  EXPECT_EQ(exponent_tag(8.0), "8");
  EXPECT_EQ(exponent_tag(64.0), "64");
  EXPECT_EQ(exponent_tag(2.5), "2.5");
}

TEST(Sweep, SingleExponentHasZeroCauchyMatrix) {
  RunConfig c = small_config();
  c.m_values = {4.0};
  const SweepReport r = run_m_sweep(c);
  ASSERT_EQ(r.cauchy_frac.size(), 1u);
  EXPECT_EQ(r.cauchy_frac[0], std::vector<double>{0.0});
  EXPECT_EQ(r.cauchy_grad[0], std::vector<double>{0.0});
}

TEST(Sweep, CauchyMatrixSymmetric) {
  const SweepReport r = run_m_sweep(small_config());
  ASSERT_EQ(r.runs.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.cauchy_frac[i][i], 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(r.cauchy_frac[i][j], r.cauchy_frac[j][i]);
      EXPECT_EQ(r.cauchy_grad[i][j], r.cauchy_grad[j][i]);
      if (i != j) EXPECT_GT(r.cauchy_grad[i][j], 0.0);
    }
  }
  for (const auto& run : r.runs) {
    EXPECT_EQ(run.records.size(), 5u);
    EXPECT_EQ(run.snapshots.size(), 3u);
    EXPECT_EQ(run.snapshots.front().time, 0.0);
    EXPECT_EQ(run.snapshots.back().time, 0.02);
    EXPECT_TRUE(run.p_samples.empty());  // released after the distances
  }
}

TEST(Sweep, TrajectoryDistanceOracle) {
  // Constant-in-time fields a and b: distance² = T ∫|∇(a - b)|².
  const GridSpec g = GridSpec::make(2, 2.0, 32);
  const ScalarField a = pmelimit::testing::bump(g, {0.0, 0.0, 0.0}, 0.8);
  const ScalarField zero(g);
  const double energy = integrate(gradient_energy_density(a));
  const double d = gradient_trajectory_distance({a, a, a}, {zero, zero, zero}, {0.0, 0.5, 1.0});
  EXPECT_NEAR(d, std::sqrt(energy), 1e-12 * std::sqrt(energy));
  EXPECT_EQ(gradient_trajectory_distance({a, a}, {a, a}, {0.0, 1.0}), 0.0);
}

TEST(Sweep, ParallelMatchesSerialByteForByte) {
  const fs::path dir = scratch_dir();
  const RunConfig c = small_config();
  export_report(run_m_sweep(c, 1), (dir / "serial").string());
  export_report(run_m_sweep(c, 3), (dir / "parallel").string());
  EXPECT_TRUE(same_tree(dir / "serial", dir / "parallel", "timing.json"));
}

TEST(Sweep, RepeatRunsAreByteIdentical) {
  const fs::path dir = scratch_dir();
  const RunConfig c = small_config();
  export_report(run_m_sweep(c, 2), (dir / "a").string());
  export_report(run_m_sweep(c, 2), (dir / "b").string());
  EXPECT_TRUE(same_tree(dir / "a", dir / "b", "timing.json"));
}

TEST(Export, SummaryAndFiles) {
  const fs::path dir = scratch_dir();
  const SweepReport r = run_m_sweep(small_config(), 2);
  export_report(r, dir.string());
  const json s = json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(s["schema_version"], 1);
  EXPECT_EQ(s["m"], json({2.0, 4.0, 8.0}));
  EXPECT_EQ(s["outside_theory"], false);
  EXPECT_EQ(s["runs"].size(), 3u);
  EXPECT_EQ(s["residual"]["integrated"].size(), 3u);
  EXPECT_EQ(s["cauchy"]["grad_p"].size(), 3u);
  EXPECT_TRUE(s["proxies"]["integrated"].contains("p_times_onemrho"));
  for (const auto& run : s["runs"]) {
    const fs::path csv = dir / run["csv"].get<std::string>();
    std::ifstream in(csv);
    const auto rows = read_csv(in);
    EXPECT_EQ(rows.size(), 5u);
    for (const auto& snap : run["snapshots"]) {
      const Snapshot back = read_snapshot((dir / snap["file"].get<std::string>()).string());
      EXPECT_EQ(back.time, snap["t"].get<double>());
      EXPECT_EQ(back.exponent, run["m"].get<double>());
    }
  }
  EXPECT_TRUE(fs::exists(dir / "timing.json"));
  // Snapshot contents are the run's densities.
  const Snapshot last = read_snapshot((dir / s["runs"][0]["snapshots"][2]["file"].get<std::string>()).string());
  EXPECT_EQ(last.field, r.runs[0].snapshots.back().field);
}

TEST(Export, EmptyReport) {
  const json s = summary_json(SweepReport{});
  EXPECT_EQ(s["schema_version"], 1);
  EXPECT_TRUE(s["runs"].empty());
  EXPECT_TRUE(s["m"].empty());
  EXPECT_TRUE(s["cauchy"]["grad_p"].empty());
}

TEST(Export, OneSampleCsvHasOneRow) {
  const fs::path dir = scratch_dir();
  RunConfig c = small_config();
  c.m_values = {2.0};
  c.T = 0.0;
  c.snapshots = 1;
  export_report(run_m_sweep(c), dir.string());
  std::ifstream in(dir / "diagnostics_m2.csv");
  EXPECT_EQ(read_csv(in).size(), 1u);
}

TEST(Export, UnwritableDirectory) {
  const fs::path dir = scratch_dir();
  std::ofstream(dir / "file") << "x";
  expect_error(ErrorKind::IoFailure, [&] { export_report(SweepReport{}, (dir / "file" / "sub").string()); });
}

TEST(Refinement, OrdersFromErrors) {
  EXPECT_TRUE(observed_orders({0.1}, {64}).empty());
  const auto o = observed_orders({0.4, 0.1, 0.025}, {32, 64, 128});
  ASSERT_EQ(o.size(), 2u);
  EXPECT_DOUBLE_EQ(o[0], 2.0);
  EXPECT_DOUBLE_EQ(o[1], 2.0);
}

TEST(Refinement, NListValidation) {
  const RunConfig c = small_config();
  expect_error(ErrorKind::ConfigInvalid, [&] { (void)run_refinement_study(c, {}); });
  expect_error(ErrorKind::ConfigInvalid, [&] { (void)run_refinement_study(c, {32, 16}); });
  expect_error(ErrorKind::ConfigInvalid, [&] { (void)run_refinement_study(c, {16, 24}); });
}

TEST(Refinement, SingleResolutionHasNoOrders) {
  RunConfig c = small_config();
  c.refine.scenario = RefineScenario::Fund1;
  c.L = 6.0;
  const RefinementReport r = run_refinement_study(c, {64});
  EXPECT_EQ(r.fund1.size(), 1u);
  EXPECT_TRUE(r.fund1_orders.empty());
}

TEST(Refinement, ConfigScenarioExports) {
  const fs::path dir = scratch_dir();
  const RunConfig c = small_config();
  const RefinementReport r = run_refinement_study(c, {16, 32, 64});
  EXPECT_EQ(r.rho_errors.size(), 2u);
  EXPECT_EQ(r.rho_orders.size(), 1u);
  export_refinement(r, dir.string());
  const json j = json::parse(slurp(dir / "refinement.json"));
  EXPECT_EQ(j["N_list"], json({16, 32, 64}));
  EXPECT_EQ(j["rho_l1_errors"].size(), 2u);
}

TEST(RunErrorTest, CarriesPartialRecords) {
  const std::vector<DiagnosticsRecord> partial(3);
  const RunError e(Error(ErrorKind::PositivityLoss, "boom"), 16.0, partial);
  EXPECT_EQ(e.kind(), ErrorKind::PositivityLoss);
  EXPECT_TRUE(e.is_numerical());
  EXPECT_EQ(e.exponent(), 16.0);
  EXPECT_EQ(e.partial().size(), 3u);
  EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
}

TEST(OperatorChecks, AllPass) {
  for (const auto& c : run_operator_checks()) EXPECT_TRUE(c.passed) << c.name << " = " << c.value;
}
