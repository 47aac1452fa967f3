#pragma once

#include "polyterrain/config.hpp"
#include "polyterrain/contour.hpp"
#include "polyterrain/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace polyterrain::segmentation {

/// Result of a least-squares plane fit. The normal points toward the
/// viewpoint the fit was requested for.
struct PlaneFit {
  Vec3 normal = Vec3::UnitZ();
  Vec3 mean = Vec3::Zero();
  double mse = 0.0;
  double bias() const { return normal.dot(mean); }
};

/// First and second moments of a point set; exact under merging.
struct Moments {
  std::int64_t count = 0;
  Vec3 sum = Vec3::Zero();
  Eigen::Matrix3d outer = Eigen::Matrix3d::Zero();

  void add(const Vec3& p) {
    ++count;
    sum += p;
    outer.noalias() += p * p.transpose();
  }
  void merge(const Moments& o) {
    count += o.count;
    sum += o.sum;
    outer += o.outer;
  }
  Vec3 mean() const { return sum / static_cast<double>(count); }
  /// Fast closed-form fit used during region growing.
  std::optional<PlaneFit> fit(const Vec3& viewpoint = Vec3::Zero()) const;
};

/// PCA plane fit: normal = eigenvector of the smallest eigenvalue of the
/// centered scatter matrix, mse = lambda_min / k. Returns nullopt for fewer
/// than 3 points or a rank-deficient (collinear / coincident) cluster.
std::optional<PlaneFit> fit_cell_plane(std::span<const Vec3> points, const Vec3& viewpoint = Vec3::Zero());

OrganizedCloud build_organized_cloud(const DepthImage& depth, const CameraIntrinsics& intr);

struct Cell {
  int row = 0;
  int col = 0;
  int count = 0;
  Vec3 mean = Vec3::Zero();
  std::optional<Vec3> normal;
  std::optional<double> mse;
  double max_jump = 0.0;  // largest depth step between adjacent valid pixels, meters
  double split_ratio = 1.0;  // see SplitTest
  bool planar = false;
  Moments moments;
};

struct CellGrid {
  int rows = 0;
  int cols = 0;
  int cell_size = 0;
  std::vector<Cell> cells;

  const Cell& at(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col]; }
  Cell& at(int row, int col) { return cells[static_cast<std::size_t>(row) * cols + col]; }
};

/// One plane against four quadrant planes. `ratio` is the quadrant planes'
/// residual sum over the residual sum about the cell plane (close to 1 when
/// one plane explains the cell); `gain` is the mean squared residual the
/// split removes, m^2. A cell straddles a crease when the split removes a
/// large share of a non-negligible residual. Quadrants that cannot be fitted
/// are skipped.
struct SplitTest {
  double ratio = 1.0;
  double gain = 0.0;

  static constexpr double kMinRatio = 0.75;
  static constexpr double kGainFloor = 1e-6;  // (1 mm)^2
  bool straddles() const { return ratio < kMinRatio && gain > kGainFloor; }
};
SplitTest split_test(const Moments (&quadrants)[4], const PlaneFit& cell_plane);

/// Fits every cell. A cell is planar when at least 90% of its pixels are valid,
/// the fit is full rank, mse is below cfg.cell_mse_bound(mean depth) and no
/// adjacent-pixel depth jump reaches cfg.discontinuity_max and the
/// quadrant split test does not flag a crease.
CellGrid fit_cells(const OrganizedCloud& cloud, const PipelineConfig& cfg);

/// Histogram bin of a normal: 30 degree polar x 45 degree azimuth buckets.
int normal_bin(const Vec3& normal);
constexpr int kNormalBins = 6 * 8;

/// Seed cells ordered by descending bin population, then ascending mse,
/// then cell index.
std::vector<int> select_seeds(const CellGrid& grid, const PipelineConfig& cfg);

struct CellLabels {
  int rows = 0;
  int cols = 0;
  std::vector<int> labels;        // -1 unlabeled
  std::vector<PlaneFit> planes;   // per region
  std::vector<Moments> moments;   // per region

  int at(int row, int col) const { return labels[static_cast<std::size_t>(row) * cols + col]; }
  std::size_t region_count() const { return planes.size(); }
};

/// Cell-wise region growing. Repeatedly takes the most populated normal bin
/// among available seeds, starts from its lowest-mse seed and grows over
/// 4-connected planar cells whose normal satisfies 1 - |n_c . n| < tau_theta
/// and whose mean lies within tau_b of the growing plane. Regions under
/// cfg.min_region_cells are discarded.
CellLabels grow_regions(const CellGrid& grid, const std::vector<int>& seeds, const PipelineConfig& cfg);

struct SegmentLabelImage {
  int width = 0;
  int height = 0;
  std::vector<int> labels;  // -1 unlabeled

  int at(int u, int v) const { return labels[static_cast<std::size_t>(v) * width + u]; }
};

/// Pixel-level refinement. Pixels in cells interior to a region (cell mask
/// eroded by one cell) keep that label; pixels in the band (dilated minus
/// eroded) take the nearest candidate plane among regions whose dilated
/// mask covers the cell. Either way a pixel is labeled only if its distance
/// to the chosen plane is below cfg.refine_dist_max.
SegmentLabelImage refine_boundaries(const CellLabels& cell_labels, const OrganizedCloud& cloud,
                                    const PipelineConfig& cfg);

/// Intersects the viewing ray of image point (u, v) with the plane.
/// nullopt when the ray grazes the plane (|denominator| < 1e-9) or meets it
/// behind the camera.
std::optional<Vec3> backproject_vertex(const Vec2& uv, const Vec3& normal, const Vec3& centroid,
                                       const CameraIntrinsics& intr);

/// Back-projects a loop, dropping grazing vertices.
Loop3 backproject_contour(std::span<const Vec2> vertices_img, const Vec3& normal, const Vec3& centroid,
                          const CameraIntrinsics& intr);

/// Intermediate products of segment_frame, for inspection and tests.
struct SegmentDebug {
  OrganizedCloud cloud;
  CellGrid cells;
  CellLabels cell_labels;
  SegmentLabelImage refined;
  SegmentLabelImage labels;  // final; label i belongs to returned region i
};

/// Full single-frame segmentation. Regions are in the camera frame.
std::vector<PlanarRegion> segment_frame(const DepthImage& depth, const CameraIntrinsics& intr,
                                        const PipelineConfig& cfg, SegmentDebug* debug = nullptr);

}  // namespace polyterrain::segmentation
