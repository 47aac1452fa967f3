#pragma once

#include "polyterrain/plane_frame.hpp"
#include "polyterrain/scene.hpp"
#include "polyterrain/types.hpp"

#include <string>
#include <vector>

namespace polyterrain::eval {

/// Planar point set as a union of groups; each group is filled even-odd
/// (an outer loop plus its holes, or one convex part).
using Shape2 = std::vector<std::vector<Loop2>>;

/// Cells of a `resolution` lattice whose centers lie in the shape.
std::size_t raster_area_cells(const Shape2& shape, double resolution);

/// IoU of two shapes on a shared lattice. 0 when both are empty.
double raster_iou(const Shape2& a, const Shape2& b, double resolution);

/// Region (contour minus holes) or its convex parts, projected into `frame`.
Shape2 project_region(const PlanarRegion& region, const PlaneFrame2D& frame);
Shape2 project_polygons(const std::vector<ConvexPolygon>& polygons, const PlaneFrame2D& frame);

struct MatchResult {
  int gt_id = 0;
  int gt_index = 0;
  int pred_index = 0;
  double alpha_deg = 0.0;
  double delta_b_mm = 0.0;
  double iou = 0.0;
};

struct EvalReport {
  std::vector<MatchResult> matches;
  double mean_alpha_deg = 0.0;
  double mean_delta_b_mm = 0.0;
  double mean_iou = 0.0;
  int unmatched_gt = 0;
  int unmatched_pred = 0;

  std::string to_json() const;
};

struct EvalOptions {
  double resolution = 0.002;
  bool use_polygons = false;  // score the convex parts instead of the contour
};

/// Scores every predicted region against every ground-truth plane by IoU
/// after orthogonal projection onto the ground-truth plane, then matches
/// greedily by descending IoU (ties: lower ground-truth index, then lower
/// prediction index). Pairs with zero IoU are never matched.
/// alpha is sign-insensitive; delta_b = |n_gt . p_gt - n_gt . centroid|.
/// Throws InputError when the ground truth has no planes.
EvalReport evaluate(const PlanarMap& map, const scene::Scene& truth, const EvalOptions& opts = {});

}  // namespace polyterrain::eval
