#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "adepth/experiment.hpp"

namespace {

// ADEPTH_LOG_LEVEL: error | warn | info | debug (default warn).
void configure_logging() {
  auto logger = spdlog::stderr_color_mt("adepth");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  const char* env = std::getenv("ADEPTH_LOG_LEVEL");
  if (env == nullptr || *env == '\0') return;
  const std::string level(env);
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::warn("ignoring ADEPTH_LOG_LEVEL='{}' (expected error, warn, info or debug)", level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Active depth estimation simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir = ".";
  std::optional<double> dt;
  std::optional<double> horizon;

  auto* run = app.add_subcommand("run", "Simulate one scenario; writes run.csv and summary.json");
  run->add_option("config", config, "Config file or built-in scenario (fig1, fig2, fig3)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--dt", dt, "Override the integration step (s)");
  run->add_option("--horizon", horizon, "Override the simulated horizon (s)");

  auto* compare = app.add_subcommand("compare", "Run every listed strategy; writes comparison.json");
  compare->add_option("config", config, "Config file or built-in scenario")->required();
  compare->add_option("--out", out_dir, "Output directory");

  adepth::SelftestOptions st;
  auto* selftest = app.add_subcommand("selftest", "Run the built-in oracle suites");
  selftest->add_option("--perturb-solver", st.solver_bias, "Bias added to the solver output (fault injection)")
      ->group("");
  selftest->add_option("--seed", st.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? adepth::kExitOk : adepth::kExitConfigError;
  }

  adepth::RunOptions opts;
  opts.out_dir = out_dir;
  opts.dt = dt;
  opts.horizon = horizon;

  try {
    if (run->parsed()) return adepth::cmd_run(config, opts, std::cout, std::cerr);
    if (compare->parsed()) return adepth::cmd_compare(config, opts, std::cout, std::cerr);
    return adepth::cmd_selftest(st, std::cout);
  } catch (const std::exception& e) {
    fmt::print(stderr, "runtime error: {}\n", e.what());
    return adepth::kExitRuntimeError;
  }
}
