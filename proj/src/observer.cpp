#include "adepth/observer.hpp"

#include <cmath>

#include <fmt/format.h>

namespace adepth {
namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

template <typename Vec, typename Rhs>
Vec rk4(const Vec& x, double dt, Rhs&& f) {
  const Vec k1 = f(x, 0.0);
  const Vec k2 = f(x + 0.5 * dt * k1, 0.5 * dt);
  const Vec k3 = f(x + 0.5 * dt * k2, 0.5 * dt);
  const Vec k4 = f(x + dt * k3, dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec6 pack(const CoupledState& x) {
  Vec6 z;
  z << x.point, x.est.s_hat, x.est.chi_hat;
  return z;
}

CoupledState unpack_coupled(const Vec6& z) {
  CoupledState x;
  x.point = z.head<3>();
  x.est.s_hat = z.segment<2>(3);
  x.est.chi_hat = z(5);
  return x;
}

Vec6 pack(const ImageCoupledState& x) {
  Vec6 z;
  z << x.s, x.chi, x.est.s_hat, x.est.chi_hat;
  return z;
}

ImageCoupledState unpack_image(const Vec6& z) {
  ImageCoupledState x;
  x.s = z.head<2>();
  x.chi = z(2);
  x.est.s_hat = z.segment<2>(3);
  x.est.chi_hat = z(5);
  return x;
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw IntegrationError(fmt::format("step size must be positive and finite (dt = {})", dt));
  }
}

template <typename State>
StepResult<State> finish(const Vec6& z, State (*unpack)(const Vec6&)) {
  if (!z.allFinite()) {
    throw IntegrationError("non-finite state after integration step");
  }
  StepResult<State> r{unpack(z), false};
  if (r.next.est.chi_hat < 0.0) {
    r.next.est.chi_hat = 0.0;
    r.chi_hat_clamped = true;
  }
  return r;
}

}  // namespace

ErrorState estimation_error(const Vec2& s, double chi, const EstimatorState& est) {
  return {s - est.s_hat, chi - est.chi_hat};
}

FeatureRates observer_rhs(const Vec2& meas_s, const EstimatorState& est,
                          const CameraTwist& u, const ObserverGains& g) {
  const InteractionJacobians j = jacobians(meas_s);
  const Vec2 s_tilde = meas_s - est.s_hat;
  const Vec2 jv_v = j.jv * u.v;
  FeatureRates r;
  r.s_dot = jv_v * est.chi_hat + j.jw * u.w + g.k_s * s_tilde;
  r.chi_dot = j.jq.dot(u.v) * est.chi_hat * est.chi_hat + j.jl.dot(u.w) * est.chi_hat +
              g.k_chi * jv_v.dot(s_tilde);
  return r;
}

FeatureRates error_rhs(const Vec2& s, double chi, const EstimatorState& est,
                       const CameraTwist& u, const ObserverGains& g) {
  const InteractionJacobians j = jacobians(s);
  const ErrorState e = estimation_error(s, chi, est);
  const Vec2 jv_v = j.jv * u.v;
  FeatureRates r;
  r.s_dot = jv_v * e.chi_tilde - g.k_s * e.s_tilde;
  r.chi_dot = e.chi_tilde * (j.jq.dot(u.v) * (chi + est.chi_hat) + j.jl.dot(u.w)) -
              g.k_chi * jv_v.dot(e.s_tilde);
  return r;
}

StepResult<CoupledState> integrate_step(const CoupledState& x, const TwistPolicy& policy,
                                        const ObserverGains& g, double dt,
                                        const MeasurementOffset& noise) {
  check_dt(dt);
  auto rhs = [&](const Vec6& z, double tau) {
    const CoupledState stage = unpack_coupled(z);
    const CameraTwist u = policy(stage, tau);
    const Vec2 meas = project(stage.point).s + noise.value;
    const FeatureRates obs = observer_rhs(meas, stage.est, u, g);
    Vec6 dz;
    dz << point_dynamics_world(stage.point, u), obs.s_dot, obs.chi_dot;
    return dz;
  };
  return finish<CoupledState>(rk4(pack(x), dt, rhs), &unpack_coupled);
}

StepResult<CoupledState> integrate_step(const CoupledState& x, const CameraTwist& u,
                                        const ObserverGains& g, double dt,
                                        const MeasurementOffset& noise) {
  return integrate_step(
      x, [&u](const CoupledState&, double) { return u; }, g, dt, noise);
}

StepResult<ImageCoupledState> integrate_step(const ImageCoupledState& x, const CameraTwist& u,
                                             const ObserverGains& g, double dt) {
  check_dt(dt);
  auto rhs = [&](const Vec6& z, double) {
    const ImageCoupledState stage = unpack_image(z);
    const FeatureRates truth = feature_dynamics(stage.s, stage.chi, u);
    const FeatureRates obs = observer_rhs(stage.s, stage.est, u, g);
    Vec6 dz;
    dz << truth.s_dot, truth.chi_dot, obs.s_dot, obs.chi_dot;
    return dz;
  };
  return finish<ImageCoupledState>(rk4(pack(x), dt, rhs), &unpack_image);
}

}  // namespace adepth
