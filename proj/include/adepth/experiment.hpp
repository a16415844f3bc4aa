#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "adepth/config.hpp"
#include "adepth/selftest.hpp"
#include "adepth/simulation.hpp"

namespace adepth {

enum ExitCode : int {
  kExitOk = 0,
  kExitSelftestFailed = 1,
  kExitConfigError = 2,
  kExitRuntimeError = 3,
};

/// Fraction of |chi_tilde(0)| below which the depth estimate counts as converged.
inline constexpr double kConvergenceFraction = 0.05;
/// Image-plane error below which the feature counts as on the reference.
inline constexpr double kTrackingThreshold = 0.01;

struct RunMetrics {
  double initial_chi_tilde = 0.0;
  double final_time = 0.0;
  double final_chi_tilde = 0.0;
  double final_e_norm = 0.0;
  /// First t with |chi_tilde| < 0.05 |chi_tilde(0)|.
  std::optional<double> convergence_time;
  /// First t with |e| < 0.01.
  std::optional<double> tracking_time;
  /// Earliest t from which |e| < 0.01 holds until the end of the log.
  std::optional<double> tracking_settled_time;
  double max_V_dot = 0.0;
  /// min over the log of -V_dot; non-negative when V never increases.
  double min_V_dot_margin = 0.0;
  /// Largest single-step increase of the logged V.
  double max_V_increase = 0.0;
  /// max |Z(t) - Z(0)| of the true depth.
  double max_depth_change = 0.0;
};

RunMetrics compute_metrics(const SimLog& log);

/// Accepts a path to a config file or, when no such file exists, the name of
/// a built-in scenario. Throws ConfigError otherwise.
ScenarioConfig resolve_config(const std::string& ref);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<double> dt;
  std::optional<double> horizon;
};

/// `adepth run`: simulates `cfg.strategy` into run.csv and summary.json. When
/// the config lists comparison strategies each of them is also written to
/// `<strategy>.csv` on the same time grid.
int cmd_run(const std::string& config_ref, const RunOptions& opts, std::ostream& out,
            std::ostream& err);

/// `adepth compare`: every listed strategy from the same initial state, run in
/// parallel; per-strategy CSVs plus comparison.json.
int cmd_compare(const std::string& config_ref, const RunOptions& opts, std::ostream& out,
                std::ostream& err);

int cmd_selftest(const SelftestOptions& opts, std::ostream& out);

}  // namespace adepth
