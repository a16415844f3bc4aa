#include "adepth/geometry.hpp"

#include <cmath>

#include <fmt/format.h>

namespace adepth {

Projection project(const Vec3& p) {
  if (!(p.z() > 0.0)) {
    throw DomainError(fmt::format("point behind camera (Z = {})", p.z()));
  }
  const double chi = 1.0 / p.z();
  return {Vec2(p.x() * chi, p.y() * chi), chi};
}

Vec3 back_project(const Vec2& s, double chi) {
  if (!(chi > 0.0)) {
    throw DomainError(fmt::format("inverse depth must be positive (chi = {})", chi));
  }
  return Vec3(s.x(), s.y(), 1.0) / chi;
}

InteractionJacobians jacobians(const Vec2& s) {
  const double x = s.x();
  const double y = s.y();
  InteractionJacobians j;
  j.jv << -1.0, 0.0, x,
           0.0, -1.0, y;
  j.jw << x * y, -(1.0 + x * x), y,
          1.0 + y * y, -x * y, -x;
  j.jq << 0.0, 0.0, 1.0;
  j.jl << y, -x, 0.0;
  return j;
}

FeatureRates feature_dynamics(const Vec2& s, double chi, const CameraTwist& u) {
  const InteractionJacobians j = jacobians(s);
  FeatureRates r;
  r.s_dot = j.jv * u.v * chi + j.jw * u.w;
  r.chi_dot = j.jq.dot(u.v) * chi * chi + j.jl.dot(u.w) * chi;
  return r;
}

Mat36 interaction_matrix(const Vec2& s, double chi) {
  const double x = s.x();
  const double y = s.y();
  Mat36 l;
  l << -chi, 0.0, x * chi, x * y, -(1.0 + x * x), y,
       0.0, -chi, y * chi, 1.0 + y * y, -x * y, -x,
       0.0, 0.0, chi * chi, y * chi, -x * chi, 0.0;
  return l;
}

Vec3 point_dynamics_world(const Vec3& p, const CameraTwist& u) {
  return -u.v - u.w.cross(p);
}

Eigen::Matrix2d jw_bar(const Vec2& s) {
  const double x = s.x();
  const double y = s.y();
  Eigen::Matrix2d m;
  m << x * y, -(1.0 + x * x),
       1.0 + y * y, -x * y;
  return m;
}

}  // namespace adepth
