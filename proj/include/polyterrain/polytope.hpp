#pragma once

#include "polyterrain/config.hpp"
#include "polyterrain/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace polyterrain::polytope {

/// |cross(v - prev, next - v)| / 2
double triangle_error(const Vec2& prev, const Vec2& v, const Vec2& next);

/// 2A / s for the triangle (prev, v, next); 0 when degenerate.
double inscribed_circle_diameter(const Vec2& prev, const Vec2& v, const Vec2& next);

/// Turn sign at v matches the loop orientation; a zero turn counts as convex.
bool is_convex_vertex(const Vec2& prev, const Vec2& v, const Vec2& next, bool counterclockwise = true);

/// Which side of the loop the region lies on. Outer loops bound the region
/// from outside; for holes the region is outside the loop, so the guard
/// applies to vertices that are convex with respect to the hole itself.
enum class LoopRole { kOuter, kHole };

/// One deletion performed by the simplifier, in the geometry it had when it
/// was removed. `expands` is true when removing it grew the region.
struct Removal {
  int index = 0;  // original vertex index
  Vec2 prev, v, next;
  double area = 0.0;
  double diameter = 0.0;
  bool expands = false;
};

struct SimplifyStats {
  std::int64_t heap_ops = 0;  // sift steps plus pushes and pops
  int pops = 0;
  int pinned = 0;
};

struct SimplifyResult {
  Loop2 vertices;
  std::vector<int> kept;  // original indices, in loop order
  std::vector<Removal> removals;
  std::vector<int> pinned;  // original indices preserved by the guard
  SimplifyStats stats;
};

/// Min-heap simplification. Pops the vertex of smallest triangle error
/// (ties by original index) until that error exceeds epsilon or 3 vertices
/// remain. Region-shrinking vertices are removed unconditionally; a
/// region-growing vertex is removed only when its triangle's incircle
/// diameter is below foot_diameter, otherwise it is pinned for good. The
/// two neighbours of each removed vertex are re-keyed. Either orientation is
/// accepted. Throws ContractViolation for fewer than 3 vertices.
SimplifyResult simplify_contour_traced(std::span<const Vec2> contour, double epsilon, double foot_diameter,
                                       LoopRole role = LoopRole::kOuter);

Loop2 simplify_contour(std::span<const Vec2> contour, double epsilon, double foot_diameter,
                       LoopRole role = LoopRole::kOuter);

/// Number of concave vertices of a counterclockwise loop.
int count_concave(std::span<const Vec2> loop);

/// Splits a simple loop at its concave vertices by extending the incoming
/// edge of the lowest-index concave vertex to the first boundary point it
/// exits through, recursively. Parts are counterclockwise; parts under
/// `min_area` or with fewer than 3 distinct vertices are dropped. A clockwise
/// input is reversed first. Throws NonSimplePolygon on self-intersection.
std::vector<Loop2> convex_partition(std::span<const Vec2> contour, double min_area = 0.0);

/// Joins every hole to the outer loop with a zero-width bridge, giving one
/// weakly simple counterclockwise loop. Holes may have either orientation.
Loop2 bridge_holes(const Loop2& outer, const std::vector<Loop2>& holes);

/// Partition of an outer loop with holes: bridge, then split.
std::vector<Loop2> convex_partition_with_holes(const Loop2& outer, const std::vector<Loop2>& holes,
                                               double min_area = 0.0);

/// Projects into the region's plane frame, simplifies outer loop and holes,
/// partitions and lifts every part back with the region normal.
std::vector<ConvexPolygon> approximate_region(const PlanarRegion& region, const PipelineConfig& cfg);

}  // namespace polyterrain::polytope
