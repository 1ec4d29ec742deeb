#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "tfaccel/cli/config.hpp"
#include "tfaccel/cli/figures.hpp"
#include "tfaccel/cli/sweep.hpp"

using namespace tfaccel;
using namespace tfaccel::cli;
namespace fs = std::filesystem;

namespace {

RunConfig small_sweep(int atoms = 2) {
  RunConfig c;
  c.sweep.parameter = SweepParameter::Accel;
  c.sweep.values = {1.0, 3.0, 7.0};
  c.atoms = atoms;
  return c;
}

std::string csv_of(const RunConfig& c) {
  std::ostringstream os;
  write_csv(os, run_sweep(c).rows);
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("tfaccel_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const char* exe = std::getenv("TFACCEL_CLI");
  if (!exe) return -1;
  const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultsValidate) {
  RunConfig c;
  c.sweep = default_accel_sweep();
  EXPECT_TRUE(violations(c).empty());
  EXPECT_EQ(c.sweep.resolved().size(), 101u);
  EXPECT_EQ(c.sweep.resolved().front(), 0.02);
  EXPECT_EQ(c.sweep.resolved().back(), 10.0);
}

TEST(Config, RejectsUnknownKeys) {
  const Json j = Json::parse(R"({"sweep": {"values": [1, 2]}, "detctor": {"sigma": 1}})");
  try {
    from_json(j);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_NE(e.violations()[0].find("detctor"), std::string::npos);
  }
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"values": [1]}, "detector": {"omega": 1}})")), ConfigError);
}

TEST(Config, OddAtomCountNamesField) {
  try {
    from_json(Json::parse(R"({"sweep": {"values": [1]}, "N": 7})"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations().at(0).rfind("N:", 0), 0u);
  }
}

TEST(Config, NegativeSigmaRejected) {
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"values": [1]}, "detector": {"sigma": -0.4}})")), ConfigError);
}

TEST(Config, SweepListRules) {
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"values": []}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"values": [2, 1]}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"values": [1, 1]}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"parameter": "N", "values": [2, 5]}})")), ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"values": [1], "from": 1, "to": 2, "steps": 3}})")),
               ConfigError);
  EXPECT_THROW(from_json(Json::parse(R"({"sweep": {"from": 0, "to": 2, "steps": 3}})")), ConfigError);
  EXPECT_NO_THROW(from_json(Json::parse(R"({"sweep": {"from": 0, "to": 2, "steps": 3, "spacing": "linear"}})")));
}

TEST(Config, ResolvedRoundTrip) {
  const auto c = from_json(Json::parse(
      R"({"detector": {"sigma": 0.4, "gap": 5}, "sweep": {"from": 0.1, "to": 10, "steps": 7}, "N": 100,
          "treatment": "distant", "quadrature": {"k_max": 40}, "output": {"format": "json"}})"));
  const Json j = to_json(c);
  const auto back = from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(back.sweep.resolved(), c.sweep.resolved());
  EXPECT_EQ(back.treatment, FieldTreatment::Distant);
  EXPECT_EQ(*back.quadrature.k_max, 40.0);
}

TEST(Sweep, ZeroCouplingGivesTwinFockValues) {
  for (int n : {2, 100}) {
    auto c = small_sweep(n);
    c.detector.coupling = 0.0;
    const auto r = run_sweep(c);
    ASSERT_EQ(r.rows.size(), 3u);
    const double j = n / 2.0;
    for (const auto& row : r.rows) {
      EXPECT_EQ(*row.xi_e_sq, 0.0);
      EXPECT_NEAR(*row.dtheta_sq_eq24, 1 / (2 * j * (j + 1)), 1e-15);
      EXPECT_NEAR(*row.dtheta_sq_eq20, 1 / (2 * j * (j + 1)), 1e-15);
      EXPECT_TRUE(*row.witness_violated);
      EXPECT_EQ(row.concurrence.has_value(), n == 2);
    }
  }
}

TEST(Sweep, CsvLayout) {
  auto c = small_sweep(100);
  c.detector.coupling = 0.0;
  const std::string csv = csv_of(c);
  const auto header_end = csv.find('\n');
  EXPECT_EQ(csv.substr(0, header_end),
            "sweep_value,eta0_sq,eta1_sq,concurrence,xi_e_sq,witness_violated,dtheta_sq_eq20,dtheta_sq_eq24,quad_err");
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  // N = 100: concurrence is null and written as an empty field.
  EXPECT_EQ(csv.substr(header_end + 1, 8), "1,0,0,,0");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Sweep, RoundTripPrecision) {
  ResultRow r;
  r.sweep_value = 0.1;
  r.eta0_sq = 1.0 / 3.0;
  std::ostringstream os;
  write_csv(os, {r});
  const std::string line = os.str().substr(os.str().find('\n') + 1);
  EXPECT_EQ(std::stod(line.substr(0, line.find(','))), 0.1);
  const auto second = line.substr(line.find(',') + 1);
  EXPECT_EQ(std::stod(second.substr(0, second.find(','))), 1.0 / 3.0);
}

TEST(Sweep, IndependentOfWorkerCountAndRepeatable) {
  auto c = small_sweep(100);
  c.detector.gap = 5.0;
  const std::string one = csv_of(c);
  c.workers = 3;
  EXPECT_EQ(csv_of(c), one);
  EXPECT_EQ(csv_of(c), one);
}

TEST(Sweep, AmplitudesDoNotDependOnAtomNumber) {
  const auto two = run_sweep(small_sweep(2)).rows;
  const auto hundred = run_sweep(small_sweep(100)).rows;
  for (std::size_t i = 0; i < two.size(); ++i) {
    EXPECT_EQ(two[i].eta0_sq, hundred[i].eta0_sq);
    EXPECT_EQ(two[i].eta1_sq, hundred[i].eta1_sq);
  }
}

TEST(Sweep, AtomNumberSweepSharesAmplitudes) {
  RunConfig c;
  c.detector.accel = 10.0;
  c.sweep.parameter = SweepParameter::Atoms;
  c.sweep.values = {2, 4, 6};
  const auto rows = run_sweep(c).rows;
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].eta0_sq, rows[2].eta0_sq);
  EXPECT_TRUE(rows[0].concurrence.has_value());
  EXPECT_FALSE(rows[1].concurrence.has_value());
}

TEST(Sweep, ConvergenceFailureNamesSweepValue) {
  // With a fixed momentum cutoff the rapidity integral of a long, slowly
  // accelerated switching needs far more than one subdivision.
  auto c = small_sweep();
  c.detector.sigma = 5.0;
  c.sweep.values = {0.02};
  c.quadrature.rel_tol = 1e-12;
  c.quadrature.k_max = 1e3;
  c.quadrature.max_subdivisions = 1;
  try {
    run_sweep(c);
    FAIL() << "expected ConvergenceFailure";
  } catch (const ConvergenceFailure& e) {
    EXPECT_EQ(std::string(e.what()).rfind("sweep value 0.02:", 0), 0u) << e.what();
  }
}

TEST(Sweep, InvalidConfigThrows) {
  auto c = small_sweep();
  c.atoms = 3;
  EXPECT_THROW(run_sweep(c), ConfigError);
}

TEST(Sweep, JsonAndManifestOutput) {
  const auto dir = scratch_dir("json");
  auto c = small_sweep();
  c.detector.coupling = 0.0;
  c.output = {(dir / "out.json").string(), "json"};
  std::ostringstream unused;
  write_outputs(c, run_sweep(c), unused);
  std::ifstream f(c.output.path);
  const Json doc = Json::parse(f);
  EXPECT_EQ(doc["rows"].size(), 3u);
  EXPECT_TRUE(doc["rows"][0]["concurrence"].is_number());
  EXPECT_EQ(doc["manifest"]["version"], kVersion);
  std::ifstream mf(c.output.path + ".manifest.json");
  const Json manifest = Json::parse(mf);
  EXPECT_TRUE(manifest.contains("wall_time_s"));
  // The manifest alone reproduces the run configuration.
  EXPECT_EQ(to_json(from_json(manifest["config"])).dump(), to_json(c).dump());
  fs::remove_all(dir);
}

TEST(Figures, PresetShapes) {
  RunConfig base;
  const auto f1 = figure_branches(1, base);
  ASSERT_EQ(f1.size(), 2u);
  EXPECT_EQ(f1[0].config.detector.gap, 0.5);
  EXPECT_EQ(f1[1].config.detector.gap, 5.0);
  EXPECT_EQ(f1[0].config.atoms, 2);
  EXPECT_EQ(f1[0].config.sweep.resolved().size(), 101u);
  EXPECT_EQ(figure_branches(2, base)[0].config.atoms, 100);
  const auto f5 = figure_branches(5, base);
  ASSERT_EQ(f5.size(), 1u);
  EXPECT_EQ(f5[0].config.detector.sigma, 30.0);
  EXPECT_EQ(f5[0].config.atoms, 10000);
  EXPECT_THROW(figure_branches(6, base), ConfigError);
  for (int id = 1; id <= 5; ++id) {
    for (const auto& b : figure_branches(id, base)) EXPECT_TRUE(violations(b.config).empty()) << b.stem;
  }
}

TEST(Figures, Figure3HasTwentyRowsPerBranch) {
  const auto dir = scratch_dir("fig3");
  const auto out = run_figure(3, RunConfig{}, dir);
  ASSERT_EQ(out.size(), 2u);
  for (const auto& o : out) {
    EXPECT_EQ(o.result.rows.size(), 20u);
    EXPECT_TRUE(fs::exists(o.data));
    EXPECT_TRUE(fs::exists(o.data.string() + ".manifest.json"));
    EXPECT_EQ(o.result.rows.front().sweep_value, 2.0);
    EXPECT_EQ(o.result.rows.back().sweep_value, 40.0);
  }
  fs::remove_all(dir);
}

TEST(Figures, ScaleReport) {
  std::vector<ResultRow> rows(3);
  rows[0].dtheta_sq_eq24 = 3e-6;
  rows[1].dtheta_sq_eq24 = 0.5;
  const auto r = scale_report(rows, 10000);
  EXPECT_EQ(r.min_series, 3e-6);
  EXPECT_TRUE(r.order_1e6_present);
  EXPECT_TRUE(r.above_heisenberg);
  EXPECT_NEAR(r.heisenberg_term, 1.0 / (2 * 5000.0 * 5001.0), 1e-24);
}

TEST(Executable, ExitCodes) {
  if (!std::getenv("TFACCEL_CLI")) GTEST_SKIP() << "TFACCEL_CLI not set";
  const auto dir = scratch_dir("exe");
  EXPECT_EQ(run_cli("validate --N 7"), 2);
  EXPECT_EQ(run_cli("validate --sigma -1"), 2);
  EXPECT_EQ(run_cli("validate --N 100"), 0);
  EXPECT_EQ(run_cli("nonsense"), 2);
  EXPECT_EQ(run_cli("amplitudes --accel 1 --lambda 1"), 0);
  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"detector": {"sigma": 5}, "quadrature": {"max_subdivisions": 1, "rel_tol": 1e-12, "k_max": 1000}, "sweep": {"values": [0.02]}})";
  }
  EXPECT_EQ(run_cli("sweep --config " + (dir / "bad.json").string()), 3);
  const auto out = (dir / "s.csv").string();
  EXPECT_EQ(run_cli("sweep --lambda 0 --values 1,2 --N 4 --out " + out), 0);
  EXPECT_TRUE(fs::exists(out));
  EXPECT_TRUE(fs::exists(out + ".manifest.json"));
  fs::remove_all(dir);
}
