#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace adepth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using Row3 = Eigen::RowVector3d;

/// Raised when a point leaves the half-space in front of the camera.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Camera linear velocity `v` (m/s) and angular velocity `w` (rad/s), both
/// expressed in the camera frame.
struct CameraTwist {
  Vec3 v = Vec3::Zero();
  Vec3 w = Vec3::Zero();
};

/// Normalized image coordinates together with the inverse depth chi = 1/Z.
struct Projection {
  Vec2 s;
  double chi;
};

/// Interaction matrices mapping the camera twist to feature and inverse-depth
/// rates. All four are functions of the image coordinates only.
struct InteractionJacobians {
  Mat23 jv;
  Mat23 jw;
  Row3 jq;
  Row3 jl;
};

struct FeatureRates {
  Vec2 s_dot;
  double chi_dot;
};

/// Perspective projection onto the normalized image plane.
/// Throws DomainError when `p.z() <= 0`.
Projection project(const Vec3& p);

/// Inverse of `project`: p = [s; 1] / chi. Requires chi > 0.
Vec3 back_project(const Vec2& s, double chi);

InteractionJacobians jacobians(const Vec2& s);

/// Image-space dynamics of a static point seen by a moving camera:
///   s_dot   = Jv v chi + Jw w
///   chi_dot = Jq v chi^2 + Jl w chi
FeatureRates feature_dynamics(const Vec2& s, double chi, const CameraTwist& u);

/// The same dynamics written as a single 3x6 matrix acting on [v; w].
/// Kept separate from `feature_dynamics` so the two forms can be checked
/// against each other.
Mat36 interaction_matrix(const Vec2& s, double chi);

/// Camera-frame velocity of a static point: p_dot = -v - w x p.
Vec3 point_dynamics_world(const Vec3& p, const CameraTwist& u);

/// Left 2x2 block of Jw. Its determinant is 1 + x^2 + y^2.
Eigen::Matrix2d jw_bar(const Vec2& s);

/// s_perp = [-y, x], the image vector orthogonal to s.
inline Vec2 perp(const Vec2& s) { return {-s.y(), s.x()}; }

}  // namespace adepth
