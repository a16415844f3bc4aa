#include "adepth/stability.hpp"

#include <cmath>

namespace adepth {

double lyapunov_value(const ErrorState& err, double k_chi) {
  return 0.5 * err.s_tilde.squaredNorm() + err.chi_tilde * err.chi_tilde / (2.0 * k_chi);
}

double lyapunov_rate(const Vec2& s, double chi, const EstimatorState& est,
                     const CameraTwist& u, const ObserverGains& g) {
  const InteractionJacobians j = jacobians(s);
  const ErrorState e = estimation_error(s, chi, est);
  const double chi_t2 = e.chi_tilde * e.chi_tilde;
  return -g.k_s * e.s_tilde.squaredNorm() +
         chi_t2 * j.jq.dot(u.v) * (chi + est.chi_hat) / g.k_chi +
         chi_t2 * j.jl.dot(u.w) / g.k_chi;
}

double pe_sigma_squared(const Vec2& s, const Vec3& v) {
  const double a = s.x() * v.z() - v.x();
  const double b = s.y() * v.z() - v.y();
  return a * a + b * b;
}

StabilityReport check_theorem1(const Vec2& s, const EstimatorState& est, const CameraTwist& u,
                               double tol) {
  const InteractionJacobians j = jacobians(s);
  StabilityReport r;
  r.c1_Jl_w = j.jl.dot(u.w);
  r.c2_Jq_v = j.jq.dot(u.v);
  r.sigma_sq = pe_sigma_squared(s, u.v);
  r.c1_ok = r.c1_Jl_w <= tol;
  r.c2_ok = est.chi_hat > 0.0 ? r.c2_Jq_v <= tol : std::abs(r.c2_Jq_v) <= tol;
  r.c3_ok = r.sigma_sq > tol;
  return r;
}

StabilityReport monitor(const Vec2& s, double chi, const EstimatorState& est,
                        const CameraTwist& u, const ObserverGains& g, double tol) {
  StabilityReport r = check_theorem1(s, est, u, tol);
  r.V = lyapunov_value(estimation_error(s, chi, est), g.k_chi);
  r.V_dot = lyapunov_rate(s, chi, est, u, g);
  return r;
}

}  // namespace adepth
