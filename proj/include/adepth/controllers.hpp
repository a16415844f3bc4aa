#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "adepth/allocation.hpp"
#include "adepth/geometry.hpp"

namespace adepth {

/// Raised when the feature is too close to the image origin, where the
/// control directions s/|s| and s_perp/|s_perp| are undefined.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Strategy { kCaseA, kCaseB, kBaselineOrigin };

std::string_view to_string(Strategy s);
/// Accepts `case_a`, `case_b`, `baseline_origin`. Throws std::invalid_argument.
Strategy strategy_from_string(std::string_view name);

struct CameraLimits {
  double v_max = 0.1;
  double w_max = 0.15;
};

struct ControllerGuards {
  double s_min_norm = 1e-3;
  double chi_floor = 1e-3;
};

enum class Branch {
  kAligned,   // rotation contribution parallel to pi
  kFallback,  // rotation about the axis through s (no depth change)
  kHold,      // pi == 0 or allocation infeasible
};

std::string_view to_string(Branch b);

struct ControlOutput {
  CameraTwist twist;
  double lambda_pi = 0.0;
  double lambda_w = 0.0;
  /// Slack components (lambda_s_perp, lambda_s); only meaningful for Case A.
  Vec2 lambda_s = Vec2::Zero();
  Branch branch = Branch::kHold;
  /// |lambda1 v1 + lambda2 v2 - r v_r| reported by the allocation solver.
  double allocation_residual = 0.0;
};

/// pi = -k_p (s - s_des)
Vec2 proportional_reference(const Vec2& s, const Vec2& s_des, double k_p);

/// Circular image-plane reference 0.1 [cos(2 pi t / 10), sin(2 pi t / 10)].
Vec2 reference_circular(double t);
Vec2 reference_circular_rate(double t);

/// Constant-depth-relaxed law: Jq v = 0, Jl w <= 0.
ControlOutput control_case_A(const Vec2& s, double chi_hat, const Vec2& pi,
                             const CameraLimits& limits, const ControllerGuards& guards = {});

/// Constant-depth law: Jq v = 0, Jl w = 0, so chi_dot = 0.
ControlOutput control_case_B(const Vec2& s, double chi_hat, const Vec2& pi,
                             const CameraLimits& limits, const ControllerGuards& guards = {});

/// Reference strategy: Case B driving the feature to the image origin.
ControlOutput control_baseline_spica(const Vec2& s, double chi_hat, const CameraLimits& limits,
                                     double k_p, const ControllerGuards& guards = {});

/// Twist applied when the tracking law cannot act: full-speed translation
/// tangent to s (or along +y at the origin), no rotation. Keeps Jq v = 0,
/// Jl w = 0 and sigma^2 = v_max^2.
ControlOutput hold_output(const Vec2& s, const CameraLimits& limits);

/// Dispatch by strategy with an already computed tracking command `pi`.
ControlOutput control(Strategy strategy, const Vec2& s, double chi_hat, const Vec2& pi,
                      const CameraLimits& limits, const ControllerGuards& guards = {});

}  // namespace adepth
