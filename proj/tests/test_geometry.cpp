#include <cmath>
#include <random>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "adepth/geometry.hpp"
#include "adepth/observer.hpp"
#include "adepth/selftest.hpp"
#include "support.hpp"

namespace adepth {
namespace {

using test::uniform;

TEST(Project, OpticalAxisPoint) {
  const Projection p = project(Vec3(0, 0, 1));
  EXPECT_EQ(p.s, Vec2(0, 0));
  EXPECT_EQ(p.chi, 1.0);
}

TEST(Project, HandSubstitution) {
  const Projection p = project(Vec3(1, 2, 2));
  EXPECT_DOUBLE_EQ(p.s.x(), 0.5);
  EXPECT_DOUBLE_EQ(p.s.y(), 1.0);
  EXPECT_DOUBLE_EQ(p.chi, 0.5);
}

TEST(Project, BehindCameraThrows) {
  EXPECT_THROW(project(Vec3(0, 0, -1)), DomainError);
  EXPECT_THROW(project(Vec3(1, 1, 0)), DomainError);
  EXPECT_THROW(project(Vec3(0, 0, std::nan(""))), DomainError);
}

TEST(Project, BackProjectRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, 0.1, 5));
    const Projection pr = project(p);
    EXPECT_LE((back_project(pr.s, pr.chi) - p).norm(), 1e-12 * p.norm());
  }
  EXPECT_THROW(back_project(Vec2(0, 0), 0.0), DomainError);
}

TEST(Jacobians, ImageOrigin) {
  const InteractionJacobians j = jacobians(Vec2(0, 0));
  Mat23 jv, jw;
  jv << -1, 0, 0, 0, -1, 0;
  jw << 0, -1, 0, 1, 0, 0;
  EXPECT_EQ(j.jv, jv);
  EXPECT_EQ(j.jw, jw);
  EXPECT_EQ(j.jq, Row3(0, 0, 1));
  EXPECT_EQ(j.jl, Row3(0, 0, 0));
}

TEST(Jacobians, HandSubstitution) {
  const InteractionJacobians j = jacobians(Vec2(1, 2));
  Mat23 jv, jw;
  jv << -1, 0, 1, 0, -1, 2;
  jw << 2, -2, 2, 5, -2, -1;
  EXPECT_EQ(j.jv, jv);
  EXPECT_EQ(j.jw, jw);
  EXPECT_EQ(j.jl, Row3(2, -1, 0));
}

TEST(Jacobians, JqIsConstant) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(jacobians(random_feature(rng, 10.0)).jq, Row3(0, 0, 1));
  }
}

TEST(Jacobians, JlAnnihilatesRadialRotation) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 s = random_feature(rng, 2.0);
    const double lambda = uniform(rng, -5, 5);
    const Vec3 w = lambda * Vec3(s.x(), s.y(), 0.0);
    EXPECT_LE(std::abs(jacobians(s).jl.dot(w)), 1e-14);
  }
}

TEST(Jacobians, RotationBlockDeterminant) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 10000; ++i) {
    const Vec2 s = random_feature(rng, 3.0);
    const double expected = 1.0 + s.squaredNorm();
    EXPECT_NEAR(jw_bar(s).determinant(), expected, 1e-12 * expected * expected);
  }
}

TEST(Jacobians, RotationBlockMapsFeatureToPerpendicular) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 s = random_feature(rng, 2.0);
    EXPECT_LE((jw_bar(s) * s - perp(s)).norm(), 1e-14);
  }
}

TEST(FeatureDynamics, PureApproachOnAxis) {
  CameraTwist u;
  u.v = Vec3(0, 0, 1);
  const FeatureRates r = feature_dynamics(Vec2(0, 0), 1.0, u);
  EXPECT_EQ(r.s_dot, Vec2(0, 0));
  EXPECT_EQ(r.chi_dot, 1.0);
}

TEST(FeatureDynamics, OpticalAxisRotationKeepsDepth) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 s = random_feature(rng);
    const double wz = uniform(rng, -1, 1);
    CameraTwist u;
    u.w = Vec3(0, 0, wz);
    const FeatureRates r = feature_dynamics(s, uniform(rng, 0.1, 3), u);
    EXPECT_NEAR(r.s_dot.x(), s.y() * wz, 1e-15);
    EXPECT_NEAR(r.s_dot.y(), -s.x() * wz, 1e-15);
    EXPECT_EQ(r.chi_dot, 0.0);
  }
}

TEST(FeatureDynamics, ZeroInverseDepthIsInvariant) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(feature_dynamics(Vec2(0, 0), 0.0, random_twist(rng)).chi_dot, 0.0);
  }
}

TEST(FeatureDynamics, StackedMatrixMatchesBlockForm) {
  std::mt19937_64 rng(18);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec2 s = random_feature(rng);
    const double chi = uniform(rng, 0.0, 5.0);
    const CameraTwist u = random_twist(rng);
    Eigen::Matrix<double, 6, 1> uu;
    uu << u.v, u.w;
    const Vec3 stacked = interaction_matrix(s, chi) * uu;
    const FeatureRates r = feature_dynamics(s, chi, u);
    worst = std::max({worst, (stacked.head<2>() - r.s_dot).cwiseAbs().maxCoeff(),
                      std::abs(stacked(2) - r.chi_dot)});
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(PointDynamicsWorld, PureApproach) {
  CameraTwist u;
  u.v = Vec3(0, 0, 1);
  EXPECT_EQ(point_dynamics_world(Vec3(0, 0, 1), u), Vec3(0, 0, -1));
}

TEST(PointDynamicsWorld, RotationAboutTheRay) {
  CameraTwist u;
  u.w = Vec3(0, 0, 1);
  EXPECT_EQ(point_dynamics_world(Vec3(0, 0, 1), u), Vec3(0, 0, 0));
}

// Oracle: the camera rotates by R(t) = exp(t [w]x), so a static point seen in
// the camera frame is R(t)^T p. Central difference at t = 0.
TEST(PointDynamicsWorld, MatchesRotatingFrameFiniteDifference) {
  auto camera_frame = [](const Vec3& p, const Vec3& w, double t) {
    if (w.norm() == 0.0) return p;
    const Eigen::Matrix3d r = Eigen::AngleAxisd(w.norm() * t, w.normalized()).toRotationMatrix();
    return Vec3(r.transpose() * p);
  };
  CameraTwist u;
  u.w = Vec3(0, 0, 1);
  const Vec3 p(1, 0, 1);
  const double h = 1e-6;
  const Vec3 fd = (camera_frame(p, u.w, h) - camera_frame(p, u.w, -h)) / (2 * h);
  const Vec3 analytic = point_dynamics_world(p, u);
  EXPECT_LE((fd - analytic).norm(), 1e-8);
  EXPECT_LE((analytic - Vec3(0, -1, 0)).norm(), 1e-15);

  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    CameraTwist r;
    r.w = random_twist(rng).w;
    const Vec3 q(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, 0.5, 3));
    const Vec3 d = (camera_frame(q, r.w, h) - camera_frame(q, r.w, -h)) / (2 * h);
    EXPECT_LE((d - point_dynamics_world(q, r)).norm(), 1e-8);
  }
}

// Both propagations of the same trajectory; their difference is pure
// integrator error and must shrink under step refinement.
TEST(PointDynamicsWorld, ProjectionMatchesImageSpaceIntegration) {
  std::mt19937_64 rng(20);
  const ObserverGains g;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 p(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5), uniform(rng, 1.0, 2.0));
    const CameraTwist u = random_twist(rng, 0.1, 0.2);
    const double horizon = 2.0;
    auto gap = [&](int n) {
      const double h = horizon / n;
      CoupledState world;
      world.point = p;
      ImageCoupledState image;
      image.s = project(p).s;
      image.chi = project(p).chi;
      for (int k = 0; k < n; ++k) {
        world = integrate_step(world, u, g, h).next;
        image = integrate_step(image, u, g, h).next;
      }
      const Projection pr = project(world.point);
      return std::max((pr.s - image.s).norm(), std::abs(pr.chi - image.chi));
    };
    const double coarse = gap(10);
    const double fine = gap(20);
    EXPECT_LE(coarse, 1e-5);
    EXPECT_LT(fine, coarse);
  }
}

}  // namespace
}  // namespace adepth
