#include "adepth/pose.hpp"

#include <cmath>

namespace adepth {
namespace {

Eigen::Matrix3d skew(const Vec3& a) {
  Eigen::Matrix3d m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

// Left Jacobian of SO(3); maps the body-frame translation over the step.
Eigen::Matrix3d so3_left_jacobian(const Vec3& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d k = skew(phi);
  if (theta < 1e-6) {
    return Eigen::Matrix3d::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
  }
  const double t2 = theta * theta;
  return Eigen::Matrix3d::Identity() + (1.0 - std::cos(theta)) / t2 * k +
         (theta - std::sin(theta)) / (t2 * theta) * k * k;
}

}  // namespace

CameraPose camera_pose_update(const CameraPose& pose, const CameraTwist& u, double dt) {
  const Vec3 phi = u.w * dt;
  const double angle = phi.norm();
  const Eigen::Quaterniond dq =
      angle > 0.0 ? Eigen::Quaterniond(Eigen::AngleAxisd(angle, phi / angle))
                  : Eigen::Quaterniond::Identity();
  CameraPose next;
  next.position = pose.position + pose.orientation * (so3_left_jacobian(phi) * u.v * dt);
  next.orientation = (pose.orientation * dq).normalized();
  return next;
}

Vec3 to_camera(const CameraPose& pose, const Vec3& p_world) {
  return pose.orientation.conjugate() * (p_world - pose.position);
}

}  // namespace adepth
