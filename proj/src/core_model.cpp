#include "polyterrain/config.hpp"
#include "polyterrain/error.hpp"
#include "polyterrain/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polyterrain {

void CameraIntrinsics::validate() const {
  if (!(f > 0.0)) throw ContractViolation("intrinsics: focal length must be positive");
  if (width <= 0 || height <= 0) throw ContractViolation("intrinsics: image size must be positive");
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw ContractViolation("intrinsics: principal point outside the image");
  }
}

void CameraPose::validate() const {
  if (std::abs(rotation.norm() - 1.0) > 1e-9) {
    throw ContractViolation("pose: rotation quaternion is not unit length");
  }
  if (!translation.allFinite()) throw ContractViolation("pose: translation is not finite");
}

CameraPose CameraPose::inverse() const {
  CameraPose inv;
  inv.rotation = rotation.conjugate();
  inv.translation = -(inv.rotation * translation);
  return inv;
}

Vec3 transform_point(const CameraPose& pose, const Vec3& p) {
  return pose.rotation * p + pose.translation;
}

Vec3 transform_direction(const CameraPose& pose, const Vec3& d) { return pose.rotation * d; }

void DepthImage::validate() const {
  if (width < 0 || height < 0 ||
      data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ContractViolation("depth image: data length does not match width x height");
  }
  for (double d : data) {
    if (d < 0.0 || d > 65535.0 || !std::isfinite(d)) {
      throw ContractViolation("depth image: depth outside [0, 65535] mm");
    }
  }
}

std::size_t OrganizedCloud::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

PlanarRegion transform_region(const CameraPose& pose, const PlanarRegion& region) {
  PlanarRegion out;
  out.n_points = region.n_points;
  out.mse = region.mse;
  out.centroid = transform_point(pose, region.centroid);
  out.normal = transform_direction(pose, region.normal).normalized();
  out.contour.reserve(region.contour.size());
  for (const Vec3& v : region.contour) out.contour.push_back(transform_point(pose, v));
  for (const Loop3& hole : region.holes) {
    Loop3& h = out.holes.emplace_back();
    h.reserve(hole.size());
    for (const Vec3& v : hole) h.push_back(transform_point(pose, v));
  }
  return out;
}

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw ContractViolation(std::string("config: ") + field + " must be strictly positive");
  };
  require(cell_size > 0, "cell_size");
  require(seed_mse_max > 0.0, "seed_mse_max");
  require(discontinuity_max > 0.0, "discontinuity_max");
  require(tau_theta > 0.0, "tau_theta");
  require(tau_b > 0.0, "tau_b");
  require(raster_resolution > 0.0, "raster_resolution");
  require(epsilon > 0.0, "epsilon");
  require(foot_diameter > 0.0, "foot_diameter");
  require(refine_dist_max > 0.0, "refine_dist_max");
  require(min_region_cells > 0, "min_region_cells");
}

}  // namespace polyterrain

#include "polyterrain/plane_frame.hpp"

namespace polyterrain {

PlaneFrame2D PlaneFrame2D::make(const Vec3& origin, const Vec3& normal, double resolution) {
  PlaneFrame2D f;
  f.origin = origin;
  f.normal = normal.normalized();
  f.resolution = resolution;
  Vec3 x = Vec3::UnitX() - f.normal.x() * f.normal;
  if (x.norm() < 1e-6) x = Vec3::UnitY() - f.normal.y() * f.normal;
  f.axis_x = x.normalized();
  f.axis_y = f.normal.cross(f.axis_x).normalized();
  return f;
}

Loop2 PlaneFrame2D::project(const Loop3& loop) const {
  Loop2 out;
  out.reserve(loop.size());
  for (const Vec3& p : loop) out.push_back(project(p));
  return out;
}

Loop3 PlaneFrame2D::lift(const Loop2& loop) const {
  Loop3 out;
  out.reserve(loop.size());
  for (const Vec2& q : loop) out.push_back(lift(q));
  return out;
}

}  // namespace polyterrain
