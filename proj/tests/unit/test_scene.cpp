#include "fixtures.hpp"

#include "polyterrain/scene.hpp"
#include "polyterrain/segmentation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace polyterrain;
using namespace polyterrain::scene;

namespace {
const CameraIntrinsics kIntr{};
}

TEST(RenderDepth, FrontoParallelPlane) {
  const Scene sc{{testkit::fronto_plane(0, 2.0)}};
  const DepthImage d = render_depth(sc, kIntr, CameraPose{}, NoiseModel::none());
  ASSERT_EQ(d.width, 640);
  ASSERT_EQ(d.height, 480);
  for (double z : d.data) EXPECT_DOUBLE_EQ(z, 2000.0);
}

TEST(RenderDepth, StoresZDepthNotRange) {
  CameraIntrinsics intr;
  intr.f = 100.0;
  intr.cx = 200.0;
  intr.cy = 100.0;
  intr.width = 400;
  intr.height = 200;
  const Scene sc{{testkit::fronto_plane(0, 2.0)}};
  const DepthImage d = render_depth(sc, intr, CameraPose{}, NoiseModel::none());
  EXPECT_NEAR(d.at(300, 100), 2000.0, 1e-9);  // ray (1, 0, 1)
}

TEST(RenderDepth, MissIsZero) {
  const Scene sc{{make_rectangle(0, Vec3(-0.1, -0.1, 2.0), Vec3(0, 0.2, 0), Vec3(0.2, 0, 0))}};
  const DepthImage d = render_depth(sc, kIntr, CameraPose{}, NoiseModel::none());
  EXPECT_EQ(d.at(0, 0), 0.0);
  EXPECT_GT(d.at(320, 240), 0.0);
  EXPECT_NO_THROW(d.validate());
}

TEST(RenderDepth, NearestSurfaceWins) {
  const Scene sc{{testkit::fronto_plane(0, 3.0), make_rectangle(1, Vec3(-0.2, -0.2, 1.0), Vec3(0, 0.4, 0), Vec3(0.4, 0, 0))}};
  const DepthImage d = render_depth(sc, kIntr, CameraPose{}, NoiseModel::none());
  EXPECT_DOUBLE_EQ(d.at(320, 240), 1000.0);
  EXPECT_DOUBLE_EQ(d.at(5, 5), 3000.0);
  const std::vector<int> labels = render_labels(sc, kIntr, CameraPose{});
  EXPECT_EQ(labels[240 * 640 + 320], 1);
  EXPECT_EQ(labels[5 * 640 + 5], 0);
}

TEST(RenderDepth, NoiselessStaircaseMatchesPlaneEquations) {
  const Scene sc = testkit::five_steps();
  const CameraPose pose = testkit::five_steps_pose();
  const DepthImage d = render_depth(sc, kIntr, pose, NoiseModel::none());
  const std::vector<int> labels = render_labels(sc, kIntr, pose);
  const OrganizedCloud cloud = segmentation::build_organized_cloud(d, kIntr);
  std::vector<double> sse(sc.planes.size(), 0.0);
  std::vector<int> count(sc.planes.size(), 0);
  for (int v = 0; v < d.height; ++v)
    for (int u = 0; u < d.width; ++u) {
      const int l = labels[static_cast<std::size_t>(v) * d.width + u];
      if (l < 0) continue;
      ASSERT_TRUE(cloud.is_valid(u, v));
      const GroundTruthPlane& p = sc.planes[l];
      const double r = p.normal.dot(transform_point(pose, cloud.at(u, v))) - p.bias();
      EXPECT_LT(std::abs(r), 1e-9);
      sse[l] += r * r;
      ++count[l];
    }
  for (std::size_t i = 0; i < sc.planes.size(); ++i) {
    ASSERT_GT(count[i], 0) << "plane " << i;
    EXPECT_LT(sse[i] / count[i], 1e-10);
  }
}

TEST(RenderDepth, NoiseIsSeededAndScalesWithRange) {
  const CameraPose pose;
  NoiseModel noise{0.008, 0.0};
  auto stdev = [&](double z, std::uint64_t seed) {
    const Scene sc{{testkit::fronto_plane(0, z)}};
    const DepthImage d = render_depth(sc, kIntr, pose, noise, seed);
    double s = 0.0;
    for (double x : d.data) s += (x - z * 1000.0) * (x - z * 1000.0);
    return std::sqrt(s / static_cast<double>(d.data.size()));
  };
  EXPECT_NEAR(stdev(2.0, 1), 8.0, 0.1);
  EXPECT_NEAR(stdev(4.0, 1), 32.0, 0.4);
  const Scene sc{{testkit::fronto_plane(0, 2.0)}};
  EXPECT_EQ(render_depth(sc, kIntr, pose, noise, 7).data, render_depth(sc, kIntr, pose, noise, 7).data);
  EXPECT_NE(render_depth(sc, kIntr, pose, noise, 7).data, render_depth(sc, kIntr, pose, noise, 8).data);
}

TEST(RenderDepth, QuantizationRoundsToMillimeters) {
  const Scene sc{{testkit::fronto_plane(0, 2.0)}};
  const DepthImage d = render_depth(sc, kIntr, CameraPose{}, NoiseModel::sensor(), 2);
  for (double x : d.data) EXPECT_EQ(x, std::round(x));
}

TEST(MakeStaircase, PlaneCountsAndNormals) {
  EXPECT_EQ(make_staircase(1, 0.17, 0.3, 1.0).planes.size(), 2u);
  const Scene sc = make_staircase(5, 0.17, 0.3, 1.0);
  ASSERT_EQ(sc.planes.size(), 10u);
  double tread_area = 0.0;
  for (const GroundTruthPlane& p : sc.planes) {
    const bool tread = p.id % 2 == 1;
    if (tread) {
      EXPECT_LT((p.normal - Vec3::UnitZ()).norm(), 1e-12);
      const Vec3 e1 = p.boundary[1] - p.boundary[0], e2 = p.boundary[2] - p.boundary[1];
      tread_area += e1.cross(e2).norm();
    } else {
      EXPECT_NEAR(p.normal.z(), 0.0, 1e-12);
    }
    for (const Vec3& v : p.boundary) EXPECT_NEAR(p.normal.dot(v), p.bias(), 1e-9);
  }
  EXPECT_NEAR(tread_area, 5 * 0.3 * 1.0, 1e-12);
}

TEST(MakeTileWall, TilesAlternateInDepth) {
  const Scene sc = make_tile_wall(2, 3, 0.3, 0.2, 1.0, 0.03);
  ASSERT_EQ(sc.planes.size(), 6u);
  for (const GroundTruthPlane& p : sc.planes) EXPECT_LT((p.normal + Vec3::UnitY()).norm(), 1e-12);
  // Checkerboard offset plus a 0.3 * depth_step stagger per column modulo 3.
  EXPECT_NEAR(std::abs(sc.planes[0].bias() - sc.planes[1].bias()), 0.03 + 0.3 * 0.03, 1e-12);
}

TEST(LookAt, PointsOpticalAxisAtTarget) {
  const Vec3 eye(1, -2, 1.5), target(0.2, 0.4, 0.1);
  const CameraPose pose = look_at(eye, target);
  EXPECT_NO_THROW(pose.validate());
  EXPECT_LT((pose.translation - eye).norm(), 1e-15);
  const Vec3 forward = transform_direction(pose, Vec3::UnitZ());
  EXPECT_LT((forward - (target - eye).normalized()).norm(), 1e-12);
  // Image "down" points toward world -z.
  EXPECT_LT(transform_direction(pose, Vec3::UnitY()).z(), 0.0);
}
