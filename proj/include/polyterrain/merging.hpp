#pragma once

#include "polyterrain/config.hpp"
#include "polyterrain/contour.hpp"
#include "polyterrain/plane_frame.hpp"
#include "polyterrain/types.hpp"

#include <span>
#include <vector>

namespace polyterrain::merging {

/// Region occupancy in a plane frame. Cell (i, j) of `bits` covers
/// [(col0 + i) r, (col0 + i + 1) r] x [(row0 + j) r, (row0 + j + 1) r] in
/// frame coordinates, r = frame.resolution.
struct PlaneMask {
  PlaneFrame2D frame;
  int col0 = 0;
  int row0 = 0;
  BinaryImage bits;

  int cols() const { return bits.width; }
  int rows() const { return bits.height; }
  std::size_t count() const { return bits.count(); }
  /// Occupancy of global cell (c, r); false outside the grid.
  bool at(int c, int r) const { return bits.get(c - col0, r - row0); }
};

/// Sign-aligned coplanarity: 1 - |n1.n2| < tau_theta and |b1 - b2| < tau_b,
/// with b2 negated when the normals point in opposite directions.
bool is_coplanar(const PlanarRegion& a, const PlanarRegion& b, const PipelineConfig& cfg);

struct FusedPlane {
  std::int64_t n_points = 0;
  Vec3 centroid = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double mse = 0.0;
};

/// Floor applied to every MSE before inversion.
constexpr double kMseFloor = 1e-12;

/// Inverse-MSE weighted mean of angle pairs: returns (theta_m, phi_m, mse_m).
struct FusedAngles {
  double theta = 0.0;
  double phi = 0.0;
  double mse = 0.0;
};
FusedAngles fuse_angles(std::span<const double> theta, std::span<const double> phi, std::span<const double> mse);

/// N-weighted centroid, MSE_m = (sum 1/MSE_i)^-1, and a normal fused from
/// spherical angles with weights MSE_m / MSE_i. Normals are first flipped to
/// agree with parts[0]. Angles are measured in a spherical chart whose
/// equator passes through the weighted mean direction, so no input sits at a
/// pole or on the azimuth seam. Throws ContractViolation when a pair of parts
/// is not coplanar, or when `parts` is empty.
FusedPlane merge_parameters(std::span<const PlanarRegion> parts, const PipelineConfig& cfg);

/// Fills cells whose centers lie inside the projected outer contour and
/// outside its holes. Throws DegenerateProjection when the outer contour
/// projects to (near) zero area.
PlaneMask rasterize(const PlanarRegion& region, const PlaneFrame2D& frame);

/// (dilate(a) AND b) non-empty. Throws ContractViolation on frame mismatch.
bool masks_connected(const PlaneMask& a, const PlaneMask& b);

/// Cellwise OR over the joint extent. Throws ContractViolation on frame mismatch.
PlaneMask mask_union(const PlaneMask& a, const PlaneMask& b);

/// Boundary loops in world coordinates, all exactly on the frame plane
/// (cell-corner convention). Throws EmptyRegion on an empty mask.
struct Loops3 {
  std::vector<Loop3> outers;
  std::vector<Loop3> holes;
};
Loops3 inv_rasterize(const PlaneMask& mask);

/// Algorithm: for each incoming region, scan the historical list; on a
/// coplanar and connected pair, fuse into a region that replaces the
/// historical entry and keeps scanning as the incoming region (a later merge
/// absorbs the earlier replacement). Unmerged incoming regions are appended
/// in order.
std::vector<PlanarRegion> merge_planes(std::vector<PlanarRegion> historical,
                                       const std::vector<PlanarRegion>& incoming, const PipelineConfig& cfg);

/// Merge_planes folded over a single list, so touching coplanar regions of
/// one frame are joined as well.
std::vector<PlanarRegion> consolidate(const std::vector<PlanarRegion>& regions, const PipelineConfig& cfg);

}  // namespace polyterrain::merging
