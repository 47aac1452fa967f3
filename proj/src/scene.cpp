#include "polyterrain/scene.hpp"

#include "polyterrain/error.hpp"
#include "polyterrain/geometry2d.hpp"
#include "polyterrain/plane_frame.hpp"

#include <cmath>
#include <random>

namespace polyterrain::scene {

namespace {

struct PreparedPlane {
  Vec3 normal;
  Vec3 point;
  PlaneFrame2D frame;
  std::vector<Loop2> loops;
  Bounds2 bounds;
};

std::vector<PreparedPlane> prepare(const Scene& scene) {
  std::vector<PreparedPlane> out;
  out.reserve(scene.planes.size());
  for (const GroundTruthPlane& gt : scene.planes) {
    if (gt.boundary.size() < 3) throw ContractViolation("scene: plane boundary needs 3 vertices");
    PreparedPlane p;
    p.normal = gt.normal.normalized();
    p.point = gt.boundary.front();
    p.frame = PlaneFrame2D::make(p.point, p.normal, 1.0);
    p.loops.push_back(p.frame.project(gt.boundary));
    p.bounds = bounds_of(p.loops);
    out.push_back(std::move(p));
  }
  return out;
}

// Nearest hit along the camera ray through pixel (u, v); returns the plane
// index and the camera-frame z of the hit.
int cast(const std::vector<PreparedPlane>& planes, const Vec3& origin, const Vec3& dir, double& z) {
  int best = -1;
  double best_s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const PreparedPlane& p = planes[i];
    const double denom = p.normal.dot(dir);
    if (std::abs(denom) < 1e-12) continue;
    const double s = p.normal.dot(p.point - origin) / denom;
    if (!(s > 0.0) || s >= best_s) continue;
    const Vec2 q = p.frame.project(origin + s * dir);
    if (q.x() < p.bounds.lo.x() || q.x() > p.bounds.hi.x() || q.y() < p.bounds.lo.y() ||
        q.y() > p.bounds.hi.y())
      continue;
    if (!point_in_loops(q, p.loops)) continue;
    best = static_cast<int>(i);
    best_s = s;
  }
  z = best_s;
  return best;
}

}  // namespace

DepthImage render_depth(const Scene& scene, const CameraIntrinsics& intr, const CameraPose& pose,
                        const NoiseModel& noise, std::uint64_t seed) {
  if (scene.planes.empty()) throw ContractViolation("render_depth: empty scene");
  intr.validate();
  pose.validate();
  const auto planes = prepare(scene);
  DepthImage depth(intr.width, intr.height);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Matrix3d rot = pose.rotation.toRotationMatrix();
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Vec3 ray_cam((u - intr.cx) / intr.f, (v - intr.cy) / intr.f, 1.0);
      double z = 0.0;
      if (cast(planes, pose.translation, rot * ray_cam, z) < 0) continue;
      if (noise.sigma_at_2m > 0.0) {
        const double sigma = noise.sigma_at_2m * (z / 2.0) * (z / 2.0);
        z += sigma * gauss(rng);
      }
      double mm = z * 1000.0;
      if (noise.quantization > 0.0) mm = std::round(mm / noise.quantization) * noise.quantization;
      if (mm <= 0.0 || mm > 65535.0) continue;
      depth.at(u, v) = mm;
    }
  }
  return depth;
}

std::vector<int> render_labels(const Scene& scene, const CameraIntrinsics& intr, const CameraPose& pose) {
  const auto planes = prepare(scene);
  std::vector<int> labels(static_cast<std::size_t>(intr.width) * intr.height, -1);
  const Eigen::Matrix3d rot = pose.rotation.toRotationMatrix();
  for (int v = 0; v < intr.height; ++v)
    for (int u = 0; u < intr.width; ++u) {
      const Vec3 ray_cam((u - intr.cx) / intr.f, (v - intr.cy) / intr.f, 1.0);
      double z = 0.0;
      labels[static_cast<std::size_t>(v) * intr.width + u] = cast(planes, pose.translation, rot * ray_cam, z);
    }
  return labels;
}

GroundTruthPlane make_rectangle(int id, const Vec3& corner, const Vec3& a, const Vec3& b) {
  GroundTruthPlane p;
  p.id = id;
  p.normal = a.cross(b).normalized();
  p.boundary = {corner, corner + a, corner + a + b, corner + b};
  return p;
}

Scene make_staircase(int steps, double rise, double run, double width) {
  if (steps < 1 || !(rise > 0.0) || !(run > 0.0) || !(width > 0.0))
    throw ContractViolation("make_staircase: steps >= 1 and positive dimensions required");
  Scene s;
  for (int i = 0; i < steps; ++i) {
    // riser: x then z, normal = x cross z = -y
    s.planes.push_back(make_rectangle(2 * i, Vec3(0.0, i * run, i * rise), Vec3(width, 0.0, 0.0),
                                      Vec3(0.0, 0.0, rise)));
    // tread: x then y, normal = +z
    s.planes.push_back(make_rectangle(2 * i + 1, Vec3(0.0, i * run, (i + 1) * rise),
                                      Vec3(width, 0.0, 0.0), Vec3(0.0, run, 0.0)));
  }
  return s;
}

Scene make_tile_wall(int rows, int cols, double tile_w, double tile_h, double y0, double depth_step) {
  Scene s;
  const double x0 = -0.5 * cols * tile_w;
  const double z0 = -0.5 * rows * tile_h;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double y = y0 + ((r + c) % 2 == 0 ? 0.0 : depth_step) + 0.3 * depth_step * (c % 3);
      s.planes.push_back(make_rectangle(r * cols + c, Vec3(x0 + c * tile_w, y, z0 + r * tile_h),
                                        Vec3(tile_w, 0.0, 0.0), Vec3(0.0, 0.0, tile_h)));
    }
  return s;
}

CameraPose look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = Vec3::UnitX();
  right.normalize();
  const Vec3 down = forward.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  CameraPose pose;
  pose.translation = eye;
  pose.rotation = Eigen::Quaterniond(r).normalized();
  return pose;
}

}  // namespace polyterrain::scene
