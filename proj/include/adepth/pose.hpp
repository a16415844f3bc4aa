#pragma once

#include <Eigen/Geometry>

#include "adepth/geometry.hpp"

namespace adepth {

/// Camera pose in the world frame: x_world = orientation * x_camera + position.
struct CameraPose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

/// Advances the pose by a body-frame twist held constant over `dt`, using the
/// SE(3) exponential. The orientation is renormalized afterwards.
CameraPose camera_pose_update(const CameraPose& pose, const CameraTwist& u, double dt);

/// Camera-frame coordinates of a world point.
Vec3 to_camera(const CameraPose& pose, const Vec3& p_world);

}  // namespace adepth
