#pragma once

#include "adepth/observer.hpp"

namespace adepth {

/// Default tolerance used when checking the convergence constraints. The
/// controllers satisfy them analytically; this only absorbs rounding.
inline constexpr double kConstraintTol = 1e-9;

struct StabilityReport {
  double V = 0.0;
  double V_dot = 0.0;
  double sigma_sq = 0.0;
  double c1_Jl_w = 0.0;
  double c2_Jq_v = 0.0;
  bool c1_ok = false;
  bool c2_ok = false;
  bool c3_ok = false;

  bool all_ok() const { return c1_ok && c2_ok && c3_ok; }
};

/// V = 1/2 |s_tilde|^2 + chi_tilde^2 / (2 k_chi)
double lyapunov_value(const ErrorState& err, double k_chi);

/// Closed-form dV/dt along the error dynamics:
///   -k_s |s_tilde|^2 + chi_tilde^2 (Jq v (chi + chi_hat) + Jl w) / k_chi
double lyapunov_rate(const Vec2& s, double chi, const EstimatorState& est,
                     const CameraTwist& u, const ObserverGains& g);

/// Persistency-of-excitation measure |Jv v|^2 = (x vz - vx)^2 + (y vz - vy)^2.
double pe_sigma_squared(const Vec2& s, const Vec3& v);

/// Evaluates the three input constraints that make the estimation error
/// converge:
///   (1) Jl w <= 0
///   (2) Jq v <= 0 when chi_hat > 0, Jq v == 0 otherwise
///   (3) sigma^2 > 0
/// V and V_dot are only filled by `monitor`, which also knows the true state.
StabilityReport check_theorem1(const Vec2& s, const EstimatorState& est, const CameraTwist& u,
                               double tol = kConstraintTol);

/// check_theorem1 plus the Lyapunov value and rate.
StabilityReport monitor(const Vec2& s, double chi, const EstimatorState& est,
                        const CameraTwist& u, const ObserverGains& g,
                        double tol = kConstraintTol);

}  // namespace adepth
