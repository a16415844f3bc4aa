#pragma once

#include <functional>
#include <stdexcept>

#include "adepth/geometry.hpp"

namespace adepth {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default initial inverse-depth estimate (1/m).
inline constexpr double kDefaultChiHat0 = 0.1;

struct EstimatorState {
  Vec2 s_hat = Vec2::Zero();
  double chi_hat = kDefaultChiHat0;
};

struct ObserverGains {
  double k_s = 10.0;
  double k_chi = 2500.0;
};

struct ErrorState {
  Vec2 s_tilde = Vec2::Zero();
  double chi_tilde = 0.0;
};

ErrorState estimation_error(const Vec2& s, double chi, const EstimatorState& est);

/// Observer right-hand side. The interaction matrices are evaluated at the
/// measured feature `meas_s`, not at the estimate.
FeatureRates observer_rhs(const Vec2& meas_s, const EstimatorState& est,
                          const CameraTwist& u, const ObserverGains& g);

/// Closed-form estimation-error dynamics (s_tilde_dot, chi_tilde_dot).
FeatureRates error_rhs(const Vec2& s, double chi, const EstimatorState& est,
                       const CameraTwist& u, const ObserverGains& g);

/// True camera-frame point plus observer state.
struct CoupledState {
  Vec3 point = Vec3(0.0, 0.0, 1.0);
  EstimatorState est;
};

/// True image-space state plus observer state. Used to cross-check the
/// camera-frame propagation against direct integration of the image dynamics.
struct ImageCoupledState {
  Vec2 s = Vec2::Zero();
  double chi = 1.0;
  EstimatorState est;
};

template <typename State>
struct StepResult {
  State next;
  bool chi_hat_clamped = false;
};

/// Twist as a function of the stage state and the time offset inside the step.
using TwistPolicy = std::function<CameraTwist(const CoupledState&, double)>;

/// Additive offset applied to the measured feature before it reaches the
/// observer. Zero in the noiseless setting.
struct MeasurementOffset {
  Vec2 value = Vec2::Zero();
};

/// One classical RK4 step of the point and observer with `u` held constant.
/// chi_hat is projected back onto [0, inf) after the step.
StepResult<CoupledState> integrate_step(const CoupledState& x, const CameraTwist& u,
                                        const ObserverGains& g, double dt,
                                        const MeasurementOffset& noise = {});

/// RK4 step where the twist is re-evaluated at every stage.
StepResult<CoupledState> integrate_step(const CoupledState& x, const TwistPolicy& policy,
                                        const ObserverGains& g, double dt,
                                        const MeasurementOffset& noise = {});

StepResult<ImageCoupledState> integrate_step(const ImageCoupledState& x, const CameraTwist& u,
                                             const ObserverGains& g, double dt);

}  // namespace adepth
