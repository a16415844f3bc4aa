#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "adepth/experiment.hpp"
#include "support.hpp"

namespace adepth {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::string> first_column(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line.substr(0, line.find(',')));
  return out;
}

fs::path write_cfg(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.cfg";
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ADEPTH_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ComputeMetrics, SyntheticLog) {
  SimLog log;
  for (int k = 0; k <= 10; ++k) {
    SimLogRow r;
    r.t = k;
    r.chi = 1.0 / (1.0 + 0.01 * k);
    r.chi_tilde = 0.9 * std::pow(0.5, k);
    r.e_norm = k < 4 ? 0.1 : (k == 6 ? 0.02 : 0.005);
    r.V = 1.0 - 0.05 * k;
    r.V_dot = -0.05;
    log.rows.push_back(r);
  }
  const RunMetrics m = compute_metrics(log);
  EXPECT_EQ(m.initial_chi_tilde, 0.9);
  ASSERT_TRUE(m.convergence_time);
  EXPECT_EQ(*m.convergence_time, 5.0);  // 0.9 / 32 < 0.045 first at k = 5
  ASSERT_TRUE(m.tracking_time);
  EXPECT_EQ(*m.tracking_time, 4.0);
  ASSERT_TRUE(m.tracking_settled_time);
  EXPECT_EQ(*m.tracking_settled_time, 7.0);
  EXPECT_NEAR(m.max_depth_change, 0.1, 1e-12);
  EXPECT_EQ(m.min_V_dot_margin, 0.05);
  EXPECT_EQ(m.max_V_increase, 0.0);
  EXPECT_EQ(m.final_time, 10.0);
}

TEST(ComputeMetrics, NeverConverged) {
  SimLog log;
  log.rows.resize(3);
  for (auto& r : log.rows) {
    r.chi = 1.0;
    r.chi_tilde = 0.9;
    r.e_norm = 0.2;
  }
  const RunMetrics m = compute_metrics(log);
  EXPECT_FALSE(m.convergence_time);
  EXPECT_FALSE(m.tracking_time);
  EXPECT_FALSE(m.tracking_settled_time);
}

TEST(ResolveConfig, BuiltinAndFile) {
  EXPECT_EQ(resolve_config("fig1").name, "fig1");
  test::TempDir dir;
  const fs::path p = write_cfg(dir.path(), "[scenario]\nname = custom\n");
  EXPECT_EQ(resolve_config(p.string()).name, "custom");
  EXPECT_THROW(resolve_config((dir.path() / "missing.cfg").string()), ConfigError);
}

TEST(CmdRun, WritesLogAndSummary) {
  test::TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path() / "out";
  opts.horizon = 5.0;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run("fig2", opts, out, err), kExitOk) << err.str();
  const json s = read_json(opts.out_dir / "summary.json");
  for (const char* key : {"final_chi_tilde", "final_e_norm", "min_V_dot_margin", "constraint_violations",
                          "early_termination", "status", "convergence_time"}) {
    EXPECT_TRUE(s.contains(key)) << key;
  }
  EXPECT_EQ(s["constraint_violations"], 0);
  EXPECT_EQ(s["early_termination"], false);
  EXPECT_EQ(s["rows"], 1001);
  EXPECT_EQ(first_column(opts.out_dir / "run.csv").size(), 1002u);
  EXPECT_FALSE(s.contains("strategies"));
}

TEST(CmdRun, ComparisonScenarioWritesOneLogPerStrategy) {
  test::TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path();
  opts.horizon = 2.0;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run("fig1", opts, out, err), kExitOk) << err.str();
  const auto grid = first_column(dir.path() / "case_a.csv");
  EXPECT_EQ(grid.size(), 402u);
  EXPECT_EQ(first_column(dir.path() / "case_b.csv"), grid);
  EXPECT_EQ(first_column(dir.path() / "baseline_origin.csv"), grid);
  EXPECT_EQ(slurp(dir.path() / "run.csv"), slurp(dir.path() / "case_a.csv"));
  EXPECT_EQ(read_json(dir.path() / "summary.json")["strategies"].size(), 3u);
}

TEST(CmdRun, CircularScenarioTracesCircle) {
  test::TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path();
  opts.horizon = 10.0;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run("fig3", opts, out, err), kExitOk) << err.str();
  std::istringstream in(slurp(dir.path() / "run.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string f;
    std::vector<double> v;
    while (std::getline(fields, f, ',')) v.push_back(std::stod(f));
    ASSERT_NEAR(std::hypot(v[3], v[4]), 0.1, 1e-10);
    ++rows;
  }
  EXPECT_EQ(rows, 2001);
}

TEST(CmdRun, ConfigErrors) {
  test::TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path();
  std::ostringstream out, err;
  const std::string missing = (dir.path() / "nope.cfg").string();
  EXPECT_EQ(cmd_run(missing, opts, out, err), kExitConfigError);
  EXPECT_NE(err.str().find(missing), std::string::npos);

  const fs::path bad = write_cfg(dir.path(), "[scenario]\ndt = banana\n");
  EXPECT_EQ(cmd_run(bad.string(), opts, out, err), kExitConfigError);

  opts.dt = -0.1;
  EXPECT_EQ(cmd_run("fig1", opts, out, err), kExitConfigError);
}

TEST(CmdRun, RuntimeErrorExitCode) {
  test::TempDir dir;
  // An observer gain far beyond the RK4 stability limit for this step.
  const fs::path cfg = write_cfg(dir.path(), "[scenario]\ndt = 0.5\nhorizon = 200\n[gains]\nk_s = 1000\n");
  RunOptions opts;
  opts.out_dir = dir.path() / "out";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(cfg.string(), opts, out, err), kExitRuntimeError);
  EXPECT_NE(err.str().find("runtime error"), std::string::npos);
}

TEST(CmdCompare, WritesComparisonReport) {
  test::TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path();
  opts.horizon = 6.0;
  std::ostringstream out, err;
  ASSERT_EQ(cmd_compare("fig1", opts, out, err), kExitOk) << err.str();
  const json c = read_json(dir.path() / "comparison.json");
  ASSERT_EQ(c["strategies"].size(), 3u);
  for (const json& s : c["strategies"]) {
    EXPECT_TRUE(s["convergence_time"].is_number()) << s.dump();
    EXPECT_TRUE(fs::exists(dir.path() / s["csv"].get<std::string>()));
  }
  EXPECT_LE(c["convergence_time_ratio"].get<double>(), 1.5);
}

TEST(CmdCompare, EmptyStrategyList) {
  test::TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compare("fig2", opts, out, err), kExitConfigError);
  const fs::path cfg = write_cfg(dir.path(), "[compare]\nstrategies = ,\n");
  EXPECT_EQ(cmd_compare(cfg.string(), opts, out, err), kExitConfigError);
}

TEST(CmdCompare, ErrorsAreReportedPerStrategy) {
  test::TempDir dir;
  // Both engines diverge; each failure is reported on its own entry.
  const fs::path cfg = write_cfg(dir.path(),
                                 "[scenario]\ndt = 0.5\nhorizon = 200\n"
                                 "[compare]\nstrategies = case_a, case_b\n"
                                 "[gains]\nk_s = 1000\n");
  RunOptions opts;
  opts.out_dir = dir.path() / "out";
  std::ostringstream out, err;
  EXPECT_EQ(cmd_compare(cfg.string(), opts, out, err), kExitRuntimeError);
  const json c = read_json(opts.out_dir / "comparison.json");
  ASSERT_EQ(c["strategies"].size(), 2u);
  for (const json& s : c["strategies"]) EXPECT_TRUE(s.contains("error")) << s.dump();
}

TEST(CmdSelftest, PassesAndDetectsFault) {
  std::ostringstream out;
  EXPECT_EQ(cmd_selftest({}, out), kExitOk);
  EXPECT_NE(out.str().find("4/4 suites passed"), std::string::npos) << out.str();
  SelftestOptions broken;
  broken.solver_bias = 0.05;
  std::ostringstream bad;
  EXPECT_EQ(cmd_selftest(broken, bad), kExitSelftestFailed);
  EXPECT_NE(bad.str().find("[FAIL]"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  test::TempDir dir;
  const std::string out = " --out " + dir.path().string();
  EXPECT_EQ(run_cli("selftest"), 0);
  EXPECT_EQ(run_cli("selftest --perturb-solver 0.05"), 1);
  EXPECT_EQ(run_cli("run fig2 --horizon 1" + out), 0);
  EXPECT_EQ(run_cli("run " + (dir.path() / "missing.cfg").string() + out), 2);
  EXPECT_EQ(run_cli("run fig2 --dt 0" + out), 2);
  EXPECT_EQ(run_cli("run fig2 --dt abc" + out), 2);
  EXPECT_EQ(run_cli("compare fig2" + out), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(std::system(("ADEPTH_LOG_LEVEL=debug " + std::string(ADEPTH_CLI) + " run fig2 --horizon 0.1" + out +
                         " > /dev/null 2>&1").c_str()),
            0);
}

}  // namespace
}  // namespace adepth
