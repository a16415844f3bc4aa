#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adepth/controllers.hpp"
#include "adepth/observer.hpp"

namespace adepth {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ReferenceKind { kConstant, kCircular, kOrigin };

std::string_view to_string(ReferenceKind k);
ReferenceKind reference_from_string(std::string_view name);

/// What the engine does when the controller reports a singularity.
enum class SingularityPolicy {
  kTerminate,  // stop the run and record the status
  kHold,       // apply `hold_output` for that step and keep going
};

std::string_view to_string(SingularityPolicy p);
SingularityPolicy singularity_policy_from_string(std::string_view name);

/// How the twist is applied between logged samples.
enum class ControlUpdate {
  kContinuous,     // law re-evaluated at every integrator stage
  kZeroOrderHold,  // twist frozen over the whole step
};

std::string_view to_string(ControlUpdate c);
ControlUpdate control_update_from_string(std::string_view name);

struct ReferenceSpec {
  ReferenceKind kind = ReferenceKind::kConstant;
  Vec2 s_des = Vec2::Zero();

  bool operator==(const ReferenceSpec&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";
  Strategy strategy = Strategy::kCaseA;
  std::vector<Strategy> compare_strategies;

  Vec2 s0 = Vec2(0.2, 0.0);
  double chi0 = 1.0;
  double chi_hat0 = kDefaultChiHat0;

  ObserverGains gains;
  double k_p = 0.5;
  CameraLimits limits;

  double dt = 0.005;
  double horizon = 60.0;
  ControlUpdate control_update = ControlUpdate::kContinuous;

  ReferenceSpec reference;
  ControllerGuards guards;
  SingularityPolicy on_singularity = SingularityPolicy::kTerminate;
  double constraint_tol = 1e-9;

  double noise_std = 0.0;
  std::uint64_t noise_seed = 1;

  std::string log_path = "run.csv";

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
  /// Steps after t = 0; the log holds one more row than this.
  std::int64_t step_count() const;

  bool operator==(const ScenarioConfig& o) const;
};

/// INI-style text: `[section]` headers and `key = value` lines.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ScenarioConfig& cfg);

/// Shipped scenarios (`fig1`, `fig2`, `fig3`) as config text.
std::string builtin_config_text(std::string_view name);
bool is_builtin_config(std::string_view name);

}  // namespace adepth
