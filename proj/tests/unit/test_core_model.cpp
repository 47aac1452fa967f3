#include "polyterrain/config.hpp"
#include "polyterrain/error.hpp"
#include "polyterrain/plane_frame.hpp"
#include "polyterrain/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace polyterrain;

namespace {

CameraPose random_pose(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CameraPose p;
  p.rotation = Eigen::Quaterniond(g(rng), g(rng), g(rng), g(rng)).normalized();
  p.translation = Vec3(g(rng), g(rng), g(rng));
  return p;
}

}  // namespace

TEST(CameraPose, IdentityLeavesPointsAlone) {
  const Vec3 p(1.0, -2.0, 3.5);
  EXPECT_EQ(transform_point(CameraPose{}, p), p);
}

TEST(CameraPose, TranslationOnly) {
  CameraPose pose;
  pose.translation = Vec3(0.5, 0.0, -1.0);
  EXPECT_TRUE(transform_point(pose, Vec3(1, 1, 1)).isApprox(Vec3(1.5, 1.0, 0.0)));
}

TEST(CameraPose, QuarterTurnAboutZ) {
  CameraPose pose;
  pose.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()));
  EXPECT_LT((transform_point(pose, Vec3::UnitX()) - Vec3::UnitY()).norm(), 1e-15);
  EXPECT_LT((transform_direction(pose, Vec3::UnitY()) + Vec3::UnitX()).norm(), 1e-15);
}

TEST(CameraPose, InverseComposesToIdentity) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const CameraPose pose = random_pose(rng);
    const Vec3 p(i * 0.1, -0.3, 2.0);
    EXPECT_LT((transform_point(pose.inverse(), transform_point(pose, p)) - p).norm(), 1e-12);
  }
}

TEST(CameraPose, ValidateRejectsNonUnitQuaternion) {
  CameraPose pose;
  pose.rotation = Eigen::Quaterniond(1.0, 0.1, 0.0, 0.0);
  EXPECT_THROW(pose.validate(), ContractViolation);
  pose.rotation.normalize();
  EXPECT_NO_THROW(pose.validate());
  pose.translation.x() = std::nan("");
  EXPECT_THROW(pose.validate(), ContractViolation);
}

TEST(CameraIntrinsics, DefaultsAreValid) { EXPECT_NO_THROW(CameraIntrinsics{}.validate()); }

TEST(CameraIntrinsics, RejectsBadValues) {
  CameraIntrinsics a;
  a.f = 0.0;
  EXPECT_THROW(a.validate(), ContractViolation);
  CameraIntrinsics b;
  b.cx = 640.0;
  EXPECT_THROW(b.validate(), ContractViolation);
  CameraIntrinsics c;
  c.cy = -1.0;
  EXPECT_THROW(c.validate(), ContractViolation);
  CameraIntrinsics d;
  d.width = 0;
  EXPECT_THROW(d.validate(), ContractViolation);
}

TEST(PlaneBias, MatchesDotProduct) {
  EXPECT_DOUBLE_EQ(plane_bias(Vec3::UnitZ(), Vec3(4, 5, 2)), 2.0);
  EXPECT_DOUBLE_EQ(plane_bias(-Vec3::UnitZ(), Vec3(4, 5, 2)), -2.0);
}

TEST(PlaneBias, InvariantToInPlaneShift) {
  const Vec3 n = Vec3(1, 2, 2).normalized();
  const Vec3 c(0.3, -0.2, 1.1);
  const Vec3 t = n.unitOrthogonal();
  EXPECT_NEAR(plane_bias(n, c), plane_bias(n, c + 7.0 * t), 1e-12);
}

TEST(DepthImage, ValidateChecksShapeAndRange) {
  DepthImage d(4, 3);
  EXPECT_NO_THROW(d.validate());
  d.at(1, 1) = 65535.0;
  EXPECT_NO_THROW(d.validate());
  d.at(1, 1) = 65536.0;
  EXPECT_THROW(d.validate(), ContractViolation);
  d.at(1, 1) = -1.0;
  EXPECT_THROW(d.validate(), ContractViolation);
  DepthImage bad(4, 3);
  bad.data.pop_back();
  EXPECT_THROW(bad.validate(), ContractViolation);
}

TEST(DepthImage, ZeroMarksInvalid) {
  DepthImage d(2, 1);
  d.at(1, 0) = 1500.0;
  EXPECT_FALSE(d.valid(0, 0));
  EXPECT_TRUE(d.valid(1, 0));
}

TEST(PipelineConfig, DefaultsAreValid) { EXPECT_NO_THROW(PipelineConfig{}.validate()); }

TEST(PipelineConfig, EveryFieldMustBePositive) {
  const auto mutations = {
      +[](PipelineConfig& c) { c.cell_size = 0; },
      +[](PipelineConfig& c) { c.seed_mse_max = 0.0; },
      +[](PipelineConfig& c) { c.discontinuity_max = -1.0; },
      +[](PipelineConfig& c) { c.tau_theta = 0.0; },
      +[](PipelineConfig& c) { c.tau_b = 0.0; },
      +[](PipelineConfig& c) { c.raster_resolution = 0.0; },
      +[](PipelineConfig& c) { c.epsilon = -9e-4; },
      +[](PipelineConfig& c) { c.foot_diameter = 0.0; },
      +[](PipelineConfig& c) { c.refine_dist_max = 0.0; },
      +[](PipelineConfig& c) { c.min_region_cells = 0; },
  };
  for (auto mutate : mutations) {
    PipelineConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ContractViolation);
  }
}

TEST(PipelineConfig, MseBoundGrowsBeyondOneMeter) {
  const PipelineConfig c;
  EXPECT_DOUBLE_EQ(c.cell_mse_bound(0.5), c.seed_mse_max);
  EXPECT_DOUBLE_EQ(c.cell_mse_bound(1.0), c.seed_mse_max);
  EXPECT_DOUBLE_EQ(c.cell_mse_bound(2.0), 16.0 * c.seed_mse_max);
}

TEST(PlanarRegion, TransformKeepsBiasConsistent) {
  std::mt19937_64 rng(11);
  PlanarRegion r;
  r.normal = Vec3(0, 0, -1);
  r.centroid = Vec3(0.1, 0.2, 2.0);
  r.contour = {{0, 0, 2}, {1, 0, 2}, {1, 1, 2}};
  r.holes = {{{0.2, 0.2, 2}, {0.3, 0.2, 2}, {0.3, 0.3, 2}}};
  r.n_points = 77;
  r.mse = 1e-5;
  for (int i = 0; i < 20; ++i) {
    const CameraPose pose = random_pose(rng);
    const PlanarRegion w = transform_region(pose, r);
    EXPECT_NEAR(w.normal.norm(), 1.0, 1e-12);
    EXPECT_EQ(w.n_points, 77);
    EXPECT_EQ(w.mse, 1e-5);
    ASSERT_EQ(w.holes.size(), 1u);
    for (const Vec3& v : w.contour) EXPECT_NEAR(w.normal.dot(v), w.bias(), 1e-12);
    for (const Vec3& v : w.holes[0]) EXPECT_NEAR(w.normal.dot(v), w.bias(), 1e-12);
  }
}

TEST(PlaneFrame2D, AxesAreOrthonormalAndRightHanded) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
    const PlaneFrame2D f = PlaneFrame2D::make(Vec3(1, 2, 3), n, 0.01);
    EXPECT_NEAR(f.axis_x.dot(f.axis_y), 0.0, 1e-12);
    EXPECT_NEAR(f.axis_x.norm(), 1.0, 1e-12);
    EXPECT_LT((f.axis_x.cross(f.axis_y) - f.normal).norm(), 1e-12);
    const Vec3 p = f.lift(Vec2(0.4, -0.7));
    EXPECT_LT((f.project(p) - Vec2(0.4, -0.7)).norm(), 1e-12);
  }
}

TEST(PlaneFrame2D, XAxisFollowsWorldX) {
  const PlaneFrame2D f = PlaneFrame2D::make(Vec3::Zero(), Vec3::UnitZ(), 0.01);
  EXPECT_LT((f.axis_x - Vec3::UnitX()).norm(), 1e-15);
  const PlaneFrame2D g = PlaneFrame2D::make(Vec3::Zero(), Vec3::UnitX(), 0.01);
  EXPECT_LT((g.axis_x - Vec3::UnitY()).norm(), 1e-15);
}
