#include "adepth/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace adepth {
namespace {

constexpr double kPeriod = 10.0;
constexpr double kRadius = 0.1;

struct Frame {
  double norm;   // |s|
  Vec2 radial;   // s / |s|
  Vec2 tangent;  // s_perp / |s_perp|
  double r;      // chi_hat v_max
  double b;      // w_max
};

Frame make_frame(const Vec2& s, double chi_hat, const CameraLimits& limits,
                 const ControllerGuards& guards) {
  const double n = s.norm();
  if (!(n >= guards.s_min_norm)) {
    throw SingularityError(
        fmt::format("feature at |s| = {:.3e} is inside the origin guard {:.3e}", n, guards.s_min_norm));
  }
  const double chi = std::max(chi_hat, guards.chi_floor);
  return {n, s / n, perp(s) / n, chi * limits.v_max, limits.w_max};
}

// Twist used when there is nothing to track or the allocation is infeasible:
// translate tangentially at full speed so sigma^2 stays at v_max^2.
ControlOutput hold(const Frame& f, const CameraLimits& limits) {
  ControlOutput out;
  out.twist.v << limits.v_max * f.tangent, 0.0;
  out.twist.w.setZero();
  out.branch = Branch::kHold;
  return out;
}

ControlOutput assemble(const AllocationProblem& prob, const AllocationSolution& sol,
                       const CameraLimits& limits) {
  ControlOutput out;
  out.twist.v << limits.v_max * sol.v_r(0), limits.v_max * sol.v_r(1), 0.0;
  out.lambda_pi = sol.lambda1;
  out.lambda_w = sol.lambda2;
  out.allocation_residual = constraint_residual(prob, sol);
  return out;
}

// Rotation about the axis through the feature: w = lambda_w [s/|s|; 0].
ControlOutput rotate_about_feature(const Frame& f, const Vec2& pi, const CameraLimits& limits) {
  AllocationProblem prob{-pi, f.tangent, f.r, f.b};
  const AllocationSolution sol = solve_analytic(prob);
  if (!sol.feasible) return hold(f, limits);
  ControlOutput out = assemble(prob, sol, limits);
  out.twist.w << sol.lambda2 * f.radial, 0.0;
  out.lambda_s << 0.0, sol.lambda2 * f.norm;
  out.branch = Branch::kFallback;
  return out;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kCaseA: return "case_a";
    case Strategy::kCaseB: return "case_b";
    case Strategy::kBaselineOrigin: return "baseline_origin";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view name) {
  if (name == "case_a") return Strategy::kCaseA;
  if (name == "case_b") return Strategy::kCaseB;
  if (name == "baseline_origin") return Strategy::kBaselineOrigin;
  throw std::invalid_argument(fmt::format("unknown strategy '{}'", name));
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::kAligned: return "aligned";
    case Branch::kFallback: return "fallback";
    case Branch::kHold: return "hold";
  }
  return "unknown";
}

Vec2 proportional_reference(const Vec2& s, const Vec2& s_des, double k_p) {
  return -k_p * (s - s_des);
}

Vec2 reference_circular(double t) {
  const double phase = 2.0 * std::numbers::pi / kPeriod * t;
  return kRadius * Vec2(std::cos(phase), std::sin(phase));
}

Vec2 reference_circular_rate(double t) {
  const double omega = 2.0 * std::numbers::pi / kPeriod;
  const double phase = omega * t;
  return kRadius * omega * Vec2(-std::sin(phase), std::cos(phase));
}

ControlOutput hold_output(const Vec2& s, const CameraLimits& limits) {
  const double n = s.norm();
  Frame f{n, Vec2(1.0, 0.0), Vec2(0.0, 1.0), 0.0, limits.w_max};
  if (n > 0.0) {
    f.radial = s / n;
    f.tangent = perp(s) / n;
  }
  return hold(f, limits);
}

ControlOutput control_case_A(const Vec2& s, double chi_hat, const Vec2& pi,
                             const CameraLimits& limits, const ControllerGuards& guards) {
  const Frame f = make_frame(s, chi_hat, limits, guards);
  const double pi_norm = pi.norm();
  if (pi_norm == 0.0) return hold(f, limits);

  // Sign of the slack lambda_s_perp that the pi-aligned allocation would
  // produce. The aligned branch is only admissible when it is non-positive;
  // the boundary |pi| == r goes to the fallback branch.
  const double s_dot_pi = s.dot(pi);
  const double slack_sign = pi_norm > f.r ? s_dot_pi : -s_dot_pi;
  if (pi_norm != f.r && slack_sign <= 0.0) {
    const Vec2 pi_dir = pi / pi_norm;
    AllocationProblem prob{-pi, pi_dir, f.r, f.b};
    const AllocationSolution sol = solve_analytic(prob);
    if (sol.feasible) {
      Eigen::Matrix2d S;
      S.col(0) = -f.tangent;
      S.col(1) = f.radial;
      const Eigen::Matrix2d JS = jw_bar(s) * S;
      const Vec2 lambda_s = sol.lambda2 * f.norm * JS.inverse() * pi_dir;
      if (lambda_s(0) <= 0.0) {
        ControlOutput out = assemble(prob, sol, limits);
        out.twist.w << S * lambda_s / f.norm, 0.0;
        out.lambda_s = lambda_s;
        out.branch = Branch::kAligned;
        return out;
      }
    }
  }
  return rotate_about_feature(f, pi, limits);
}

ControlOutput control_case_B(const Vec2& s, double chi_hat, const Vec2& pi,
                             const CameraLimits& limits, const ControllerGuards& guards) {
  const Frame f = make_frame(s, chi_hat, limits, guards);
  if (pi.norm() == 0.0) return hold(f, limits);
  return rotate_about_feature(f, pi, limits);
}

ControlOutput control_baseline_spica(const Vec2& s, double chi_hat, const CameraLimits& limits,
                                     double k_p, const ControllerGuards& guards) {
  return control_case_B(s, chi_hat, proportional_reference(s, Vec2::Zero(), k_p), limits, guards);
}

ControlOutput control(Strategy strategy, const Vec2& s, double chi_hat, const Vec2& pi,
                      const CameraLimits& limits, const ControllerGuards& guards) {
  switch (strategy) {
    case Strategy::kCaseA: return control_case_A(s, chi_hat, pi, limits, guards);
    case Strategy::kCaseB:
    case Strategy::kBaselineOrigin: return control_case_B(s, chi_hat, pi, limits, guards);
  }
  throw std::invalid_argument("unknown strategy");
}

}  // namespace adepth
