#pragma once

#include "polyterrain/types.hpp"

#include <cstdint>
#include <vector>

namespace polyterrain::scene {

struct GroundTruthPlane {
  int id = 0;
  Vec3 normal = Vec3::UnitZ();
  Loop3 boundary;

  double bias() const { return boundary.empty() ? 0.0 : normal.dot(boundary.front()); }
};

struct Scene {
  std::vector<GroundTruthPlane> planes;
};

/// Depth noise: std = sigma_at_2m * (z / 2 m)^2, then rounding to
/// `quantization` millimeters (0 disables rounding).
struct NoiseModel {
  double sigma_at_2m = 0.0;
  double quantization = 0.0;

  static NoiseModel none() { return {}; }
  static NoiseModel sensor() { return {0.008, 1.0}; }
};

/// Ray-casts the scene through every pixel center and stores z-depth in mm.
/// Pixels with no hit are 0. Deterministic for a given seed.
DepthImage render_depth(const Scene& scene, const CameraIntrinsics& intr, const CameraPose& pose,
                        const NoiseModel& noise, std::uint64_t seed = 0);

/// Index into scene.planes of the nearest hit per pixel, -1 where nothing is hit.
std::vector<int> render_labels(const Scene& scene, const CameraIntrinsics& intr, const CameraPose& pose);

/// Staircase ascending along +y, width along +x, z up. Step i has a riser
/// facing -y at y = i*run and a tread facing +z at height (i+1)*rise.
/// Ids: risers 2i, treads 2i+1.
Scene make_staircase(int steps, double rise, double run, double width);

/// rows x cols rectangular tiles on a wall facing -y. Tiles alternate in depth
/// by `depth_step` so neighbours are never coplanar.
Scene make_tile_wall(int rows, int cols, double tile_w, double tile_h, double y0, double depth_step);

/// Camera at `eye` looking at `target`, world +z up.
CameraPose look_at(const Vec3& eye, const Vec3& target);

/// Axis-aligned helper: rectangle spanned by corner + a + b (a x b gives the normal).
GroundTruthPlane make_rectangle(int id, const Vec3& corner, const Vec3& a, const Vec3& b);

}  // namespace polyterrain::scene
