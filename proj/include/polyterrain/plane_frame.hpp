#pragma once

#include "polyterrain/types.hpp"

namespace polyterrain {

/// Right-handed in-plane frame: axis_x x axis_y = normal. A counterclockwise
/// loop in frame coordinates is counterclockwise viewed from +normal.
struct PlaneFrame2D {
  Vec3 origin = Vec3::Zero();
  Vec3 axis_x = Vec3::UnitX();
  Vec3 axis_y = Vec3::UnitY();
  Vec3 normal = Vec3::UnitZ();
  double resolution = 0.01;

  /// axis_x is the world x-axis projected onto the plane (world y when that
  /// projection degenerates).
  static PlaneFrame2D make(const Vec3& origin, const Vec3& normal, double resolution);

  Vec2 project(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(axis_x), d.dot(axis_y)};
  }
  Vec3 lift(const Vec2& q) const { return origin + q.x() * axis_x + q.y() * axis_y; }

  Loop2 project(const Loop3& loop) const;
  Loop3 lift(const Loop2& loop) const;

  bool operator==(const PlaneFrame2D&) const = default;
};

}  // namespace polyterrain
