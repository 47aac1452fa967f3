#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <limits>
#include <vector>

namespace polyterrain {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Loop2 = std::vector<Vec2>;
using Loop3 = std::vector<Vec3>;

/// Pinhole intrinsics. Pixel (u, v) has its center at integer coordinates.
struct CameraIntrinsics {
  double f = 525.0;
  double cx = 319.5;
  double cy = 239.5;
  int width = 640;
  int height = 480;

  /// Throws ContractViolation when f <= 0 or the principal point is outside
  /// the image.
  void validate() const;
};

/// World-from-camera rigid transform. Camera frame: +z forward, +x right,
/// +y down.
struct CameraPose {
  Vec3 translation = Vec3::Zero();
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();

  void validate() const;
  CameraPose inverse() const;
  Vec3 origin() const { return translation; }
};

Vec3 transform_point(const CameraPose& pose, const Vec3& p);
Vec3 transform_direction(const CameraPose& pose, const Vec3& d);

/// b = n . centroid
inline double plane_bias(const Vec3& normal, const Vec3& centroid) { return normal.dot(centroid); }

/// Depth grid in millimeters, row-major. 0 marks an invalid pixel. Values are
/// kept in double precision so that unquantized synthetic renders stay exact;
/// depth files carry integer millimeters.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0.0) {}

  double at(int u, int v) const { return data[static_cast<std::size_t>(v) * width + u]; }
  double& at(int u, int v) { return data[static_cast<std::size_t>(v) * width + u]; }
  bool valid(int u, int v) const { return at(u, v) > 0.0; }
  void validate() const;
};

/// Per-pixel camera-frame points that keep the image grid layout.
struct OrganizedCloud {
  int width = 0;
  int height = 0;
  std::vector<Vec3> points;
  std::vector<std::uint8_t> valid;

  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width + u; }
  const Vec3& at(int u, int v) const { return points[index(u, v)]; }
  bool is_valid(int u, int v) const { return valid[index(u, v)] != 0; }
  std::size_t valid_count() const;
};

/// A planar region: outer contour plus optional holes, support size,
/// centroid, unit normal and mean square point-to-plane error.
struct PlanarRegion {
  Loop3 contour;
  std::vector<Loop3> holes;
  std::int64_t n_points = 0;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double mse = 0.0;

  double bias() const { return plane_bias(normal, centroid); }
};

/// Convex polygon, counterclockwise when viewed from +normal.
struct ConvexPolygon {
  Vec3 normal = Vec3::UnitZ();
  Loop3 vertices;
};

struct PlanarMap {
  std::vector<PlanarRegion> regions;
  std::vector<std::vector<ConvexPolygon>> polygons;  // parallel to regions
};

/// Camera-frame region expressed in the world frame.
PlanarRegion transform_region(const CameraPose& pose, const PlanarRegion& region);

}  // namespace polyterrain
