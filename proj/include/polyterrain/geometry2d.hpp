#pragma once

#include "polyterrain/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace polyterrain {

/// Row-major binary grid. Cell (x, y) covers [x, x+1] x [y, y+1] in its
/// lattice coordinates.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  bool inside(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  bool get(int x, int y) const { return inside(x, y) && bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool on = true) { bits[static_cast<std::size_t>(y) * width + x] = on ? 1 : 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool operator==(const BinaryImage&) const = default;
};

/// Shoelace signed area; positive for counterclockwise loops.
double signed_area(std::span<const Vec2> loop);
double loop_perimeter(std::span<const Vec2> loop);
Vec2 loop_centroid(std::span<const Vec2> loop);

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Even-odd containment over any number of loops. Edges use a half-open rule
/// consistent with fill_loops, so a point on a shared edge is counted once.
bool point_in_loops(const Vec2& p, std::span<const Loop2> loops);

/// Sets the cells of `image` whose centers lie inside `loops` (even-odd).
/// Cell (i, j) has center ((col0 + i + 0.5) * res, (row0 + j + 0.5) * res).
void fill_loops(std::span<const Loop2> loops, double res, int col0, int row0, BinaryImage& image);

/// Proper or touching intersection of closed segments [a,b] and [c,d].
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// True when no two non-adjacent edges of the loop touch and no vertex repeats.
bool is_simple(std::span<const Vec2> loop);

/// True when every loop is simple and no two loops touch.
bool loops_disjoint_simple(std::span<const Loop2> loops);

/// Axis-aligned bounds of a set of loops.
struct Bounds2 {
  Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  void add(const Vec2& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool valid() const { return lo.x() <= hi.x() && lo.y() <= hi.y(); }
};
Bounds2 bounds_of(std::span<const Loop2> loops);

}  // namespace polyterrain
