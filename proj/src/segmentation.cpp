#include "polyterrain/segmentation.hpp"

#include "polyterrain/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace polyterrain::segmentation {

namespace {

PlaneFit oriented(const Vec3& normal, const Vec3& mean, double mse, const Vec3& viewpoint) {
  PlaneFit f;
  f.normal = normal.normalized();
  if (f.normal.dot(viewpoint - mean) < 0.0) f.normal = -f.normal;
  f.mean = mean;
  f.mse = std::max(mse, 0.0);
  return f;
}

bool rank_deficient(const Eigen::Vector3d& evals) {
  // evals ascending; a plane needs two clearly non-zero spreads.
  return !(evals(2) > 0.0) || evals(1) <= 1e-12 * evals(2);
}

}  // namespace

std::optional<PlaneFit> Moments::fit(const Vec3& viewpoint) const {
  if (count < 3) return std::nullopt;
  const double k = static_cast<double>(count);
  const Vec3 m = sum / k;
  const Eigen::Matrix3d cov = outer / k - m * m.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
  es.computeDirect(cov);
  if (rank_deficient(es.eigenvalues())) return std::nullopt;
  return oriented(es.eigenvectors().col(0), m, es.eigenvalues()(0), viewpoint);
}

std::optional<PlaneFit> fit_cell_plane(std::span<const Vec3> points, const Vec3& viewpoint) {
  if (points.size() < 3) return std::nullopt;
  const double k = static_cast<double>(points.size());
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= k;
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    scatter.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(scatter);
  if (es.info() != Eigen::Success || rank_deficient(es.eigenvalues())) return std::nullopt;
  return oriented(es.eigenvectors().col(0), mean, es.eigenvalues()(0) / k, viewpoint);
}

OrganizedCloud build_organized_cloud(const DepthImage& depth, const CameraIntrinsics& intr) {
  OrganizedCloud cloud;
  cloud.width = depth.width;
  cloud.height = depth.height;
  const std::size_t n = static_cast<std::size_t>(depth.width) * depth.height;
  cloud.points.resize(n);
  cloud.valid.resize(n);
  const double inv_f = 1.0 / intr.f;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const std::size_t i = static_cast<std::size_t>(v) * depth.width + u;
      const double d = depth.data[i];
      if (!(d > 0.0)) {
        cloud.points[i].setZero();
        cloud.valid[i] = 0;
        continue;
      }
      const double z = d / 1000.0;
      cloud.points[i] = Vec3(z * (u - intr.cx) * inv_f, z * (v - intr.cy) * inv_f, z);
      cloud.valid[i] = 1;
    }
  }
  return cloud;
}

namespace {

// Sum of squared residuals of a point set (given by its moments) about a plane.
double residual_sse(const Moments& m, const PlaneFit& plane) {
  const double b = plane.bias();
  const double v = plane.normal.dot(m.outer * plane.normal) - 2.0 * b * plane.normal.dot(m.sum) +
                   static_cast<double>(m.count) * b * b;
  return std::max(v, 0.0);
}

}  // namespace

SplitTest split_test(const Moments (&quadrants)[4], const PlaneFit& cell_plane) {
  double own = 0.0, whole = 0.0;
  std::int64_t k = 0;
  for (const Moments& q : quadrants) {
    const auto f = q.fit();
    if (!f) continue;
    own += f->mse * static_cast<double>(q.count);
    whole += residual_sse(q, cell_plane);
    k += q.count;
  }
  SplitTest t;
  if (k == 0 || !(whole > 0.0)) return t;
  t.ratio = std::min(own / whole, 1.0);
  t.gain = std::max(whole - own, 0.0) / static_cast<double>(k);
  return t;
}

CellGrid fit_cells(const OrganizedCloud& cloud, const PipelineConfig& cfg) {
  CellGrid grid;
  grid.cell_size = cfg.cell_size;
  grid.rows = cloud.height / cfg.cell_size;
  grid.cols = cloud.width / cfg.cell_size;
  grid.cells.resize(static_cast<std::size_t>(grid.rows) * grid.cols);
  const int cs = cfg.cell_size;
  const int half = cs / 2;
  const int min_valid = (9 * cs * cs + 9) / 10;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      Cell& cell = grid.at(r, c);
      cell.row = r;
      cell.col = c;
      const int u0 = c * cs, v0 = r * cs;
      double max_jump = 0.0;
      Moments quad[4];
      for (int v = v0; v < v0 + cs; ++v) {
        for (int u = u0; u < u0 + cs; ++u) {
          if (!cloud.is_valid(u, v)) continue;
          const Vec3& p = cloud.at(u, v);
          quad[(v - v0 < half ? 0 : 2) + (u - u0 < half ? 0 : 1)].add(p);
          if (u + 1 < u0 + cs && cloud.is_valid(u + 1, v))
            max_jump = std::max(max_jump, std::abs(cloud.at(u + 1, v).z() - p.z()));
          if (v + 1 < v0 + cs && cloud.is_valid(u, v + 1))
            max_jump = std::max(max_jump, std::abs(cloud.at(u, v + 1).z() - p.z()));
        }
      }
      for (const Moments& q : quad) cell.moments.merge(q);
      cell.count = static_cast<int>(cell.moments.count);
      cell.max_jump = max_jump;
      if (cell.count == 0) continue;
      cell.mean = cell.moments.mean();
      if (cell.count < min_valid) continue;
      const auto fit = cell.moments.fit();
      if (!fit) continue;
      cell.normal = fit->normal;
      cell.mse = fit->mse;
      const SplitTest split = split_test(quad, *fit);
      cell.split_ratio = split.ratio;
      cell.planar = fit->mse < cfg.cell_mse_bound(cell.mean.z()) && max_jump < cfg.discontinuity_max &&
                    !split.straddles();
    }
  }
  return grid;
}

int normal_bin(const Vec3& n) {
  const double polar = std::acos(std::clamp(n.z(), -1.0, 1.0));
  double az = std::atan2(n.y(), n.x());
  if (az < 0.0) az += 2.0 * std::numbers::pi;
  const int pb = std::min(5, static_cast<int>(polar / (std::numbers::pi / 6.0)));
  const int ab = std::min(7, static_cast<int>(az / (std::numbers::pi / 4.0)));
  return pb * 8 + ab;
}

std::vector<int> select_seeds(const CellGrid& grid, const PipelineConfig& cfg) {
  std::vector<int> seeds;
  std::vector<int> population(kNormalBins, 0);
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const Cell& c = grid.cells[i];
    if (!c.planar || !(*c.mse < cfg.cell_mse_bound(c.mean.z())) || !(c.max_jump < cfg.discontinuity_max)) continue;
    seeds.push_back(static_cast<int>(i));
    ++population[normal_bin(*c.normal)];
  }
  std::stable_sort(seeds.begin(), seeds.end(), [&](int a, int b) {
    const Cell& ca = grid.cells[a];
    const Cell& cb = grid.cells[b];
    const int pa = population[normal_bin(*ca.normal)], pb = population[normal_bin(*cb.normal)];
    if (pa != pb) return pa > pb;
    const int ba = normal_bin(*ca.normal), bb = normal_bin(*cb.normal);
    if (ba != bb) return ba < bb;
    if (*ca.mse != *cb.mse) return *ca.mse < *cb.mse;
    return a < b;
  });
  return seeds;
}

CellLabels grow_regions(const CellGrid& grid, const std::vector<int>& seeds, const PipelineConfig& cfg) {
  CellLabels out;
  out.rows = grid.rows;
  out.cols = grid.cols;
  out.labels.assign(grid.cells.size(), -1);

  std::vector<std::uint8_t> available(grid.cells.size(), 0);
  std::vector<int> bin_of(grid.cells.size(), -1);
  std::vector<int> population(kNormalBins, 0);
  for (int s : seeds) {
    available[s] = 1;
    bin_of[s] = normal_bin(*grid.cells[s].normal);
    ++population[bin_of[s]];
  }
  auto retire = [&](int cell) {
    if (!available[cell]) return;
    available[cell] = 0;
    --population[bin_of[cell]];
  };

  std::vector<int> members;
  std::deque<int> frontier;
  std::vector<int> in_region(grid.cells.size(), -1);
  int attempt = 0;
  while (true) {
    const int bin = static_cast<int>(std::max_element(population.begin(), population.end()) - population.begin());
    if (population[bin] <= 0) break;
    int start = -1;
    for (int s : seeds) {
      if (!available[s] || bin_of[s] != bin) continue;
      if (start < 0 || *grid.cells[s].mse < *grid.cells[start].mse) start = s;
    }
    retire(start);
    ++attempt;

    Moments stats = grid.cells[start].moments;
    PlaneFit plane{*grid.cells[start].normal, grid.cells[start].mean, *grid.cells[start].mse};
    members.assign(1, start);
    in_region[start] = attempt;
    frontier.assign(1, start);
    while (!frontier.empty()) {
      const int cur = frontier.front();
      frontier.pop_front();
      const int r = cur / grid.cols, c = cur % grid.cols;
      constexpr int dr[4] = {-1, 1, 0, 0};
      constexpr int dc[4] = {0, 0, -1, 1};
      for (int k = 0; k < 4; ++k) {
        const int nr = r + dr[k], nc = c + dc[k];
        if (nr < 0 || nc < 0 || nr >= grid.rows || nc >= grid.cols) continue;
        const int idx = nr * grid.cols + nc;
        if (!available[idx] || in_region[idx] == attempt) continue;
        const Cell& cand = grid.cells[idx];
        const double angle_term = 1.0 - std::abs(cand.normal->dot(plane.normal));
        const double dist = std::abs(plane.normal.dot(cand.mean) - plane.bias());
        if (!(angle_term < cfg.tau_theta) || !(dist < cfg.tau_b)) continue;
        in_region[idx] = attempt;
        members.push_back(idx);
        frontier.push_back(idx);
        stats.merge(cand.moments);
        if (auto refit = stats.fit()) plane = *refit;
      }
    }

    if (static_cast<int>(members.size()) < cfg.min_region_cells) continue;
    const int label = static_cast<int>(out.planes.size());
    for (int m : members) {
      out.labels[m] = label;
      retire(m);
    }
    out.planes.push_back(plane);
    out.moments.push_back(stats);
  }
  return out;
}

SegmentLabelImage refine_boundaries(const CellLabels& cell_labels, const OrganizedCloud& cloud,
                                    const PipelineConfig& cfg) {
  SegmentLabelImage out;
  out.width = cloud.width;
  out.height = cloud.height;
  out.labels.assign(static_cast<std::size_t>(cloud.width) * cloud.height, -1);
  const int rows = cell_labels.rows, cols = cell_labels.cols, cs = cfg.cell_size;
  const std::size_t nregions = cell_labels.region_count();

  // Candidate regions per cell from the dilated masks; interior flag from the eroded mask.
  std::vector<std::vector<int>> candidates(static_cast<std::size_t>(rows) * cols);
  std::vector<std::uint8_t> interior(static_cast<std::size_t>(rows) * cols, 0);
  auto label_at = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= rows || c >= cols) return -1;
    return cell_labels.at(r, c);
  };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int own = label_at(r, c);
      bool all_same = own >= 0;
      auto& cand = candidates[static_cast<std::size_t>(r) * cols + c];
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc) {
          const int l = label_at(r + dr, c + dc);
          if (l != own) all_same = false;
          if (l >= 0 && std::find(cand.begin(), cand.end(), l) == cand.end()) cand.push_back(l);
        }
      std::sort(cand.begin(), cand.end());
      interior[static_cast<std::size_t>(r) * cols + c] = all_same ? 1 : 0;
    }
  }

  std::vector<Vec3> normals(nregions);
  std::vector<double> biases(nregions);
  for (std::size_t i = 0; i < nregions; ++i) {
    normals[i] = cell_labels.planes[i].normal;
    biases[i] = cell_labels.planes[i].bias();
  }

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::size_t ci = static_cast<std::size_t>(r) * cols + c;
      const auto& cand = candidates[ci];
      if (cand.empty()) continue;
      const int own = cell_labels.at(r, c);
      for (int v = r * cs; v < (r + 1) * cs; ++v) {
        for (int u = c * cs; u < (c + 1) * cs; ++u) {
          if (!cloud.is_valid(u, v)) continue;
          const Vec3& p = cloud.at(u, v);
          int best = -1;
          double best_d = cfg.refine_dist_max;
          if (interior[ci]) {
            const double d = std::abs(normals[own].dot(p) - biases[own]);
            if (d < best_d) best = own;
          } else {
            for (int l : cand) {
              const double d = std::abs(normals[l].dot(p) - biases[l]);
              if (d < best_d) {
                best_d = d;
                best = l;
              }
            }
          }
          out.labels[static_cast<std::size_t>(v) * out.width + u] = best;
        }
      }
    }
  }
  return out;
}

std::optional<Vec3> backproject_vertex(const Vec2& uv, const Vec3& normal, const Vec3& centroid,
                                       const CameraIntrinsics& intr) {
  const double xn = (uv.x() - intr.cx) / intr.f;
  const double yn = (uv.y() - intr.cy) / intr.f;
  const double denom = normal.x() * xn + normal.y() * yn + normal.z();
  if (std::abs(denom) < 1e-9) return std::nullopt;
  const double z = normal.dot(centroid) / denom;
  if (!(z > 0.0)) return std::nullopt;
  return Vec3(z * xn, z * yn, z);
}

Loop3 backproject_contour(std::span<const Vec2> vertices_img, const Vec3& normal, const Vec3& centroid,
                          const CameraIntrinsics& intr) {
  Loop3 out;
  out.reserve(vertices_img.size());
  for (const Vec2& uv : vertices_img)
    if (auto p = backproject_vertex(uv, normal, centroid, intr)) out.push_back(*p);
  return out;
}

namespace {

struct PixelBox {
  int u0 = 0, v0 = 0, u1 = -1, v1 = -1;
  void add(int u, int v) {
    if (u1 < u0) {
      u0 = u1 = u;
      v0 = v1 = v;
      return;
    }
    u0 = std::min(u0, u);
    u1 = std::max(u1, u);
    v0 = std::min(v0, v);
    v1 = std::max(v1, v);
  }
};

// Two-pass exact fit over the set pixels of a region mask whose origin is pixel (u0, v0).
std::optional<PlaneFit> fit_mask(const OrganizedCloud& cloud, const BinaryImage& mask, int u0, int v0) {
  std::size_t k = 0;
  Vec3 mean = Vec3::Zero();
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
    const Vec3* pts = cloud.points.data() + static_cast<std::size_t>(v0 + y) * cloud.width + u0;
    for (int x = 0; x < mask.width; ++x)
      if (row[x]) mean += pts[x], ++k;
  }
  if (k < 3) return std::nullopt;
  mean /= static_cast<double>(k);
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
    const Vec3* pts = cloud.points.data() + static_cast<std::size_t>(v0 + y) * cloud.width + u0;
    for (int x = 0; x < mask.width; ++x) {
      if (!row[x]) continue;
      const Vec3 d = pts[x] - mean;
      scatter.noalias() += d * d.transpose();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(scatter);
  if (es.info() != Eigen::Success || rank_deficient(es.eigenvalues())) return std::nullopt;
  return oriented(es.eigenvectors().col(0), mean, es.eigenvalues()(0) / static_cast<double>(k), Vec3::Zero());
}

}  // namespace

std::vector<PlanarRegion> segment_frame(const DepthImage& depth, const CameraIntrinsics& intr,
                                        const PipelineConfig& cfg, SegmentDebug* debug) {
  cfg.validate();
  if (depth.width != intr.width || depth.height != intr.height)
    throw ContractViolation("segment_frame: depth size does not match intrinsics");

  OrganizedCloud cloud = build_organized_cloud(depth, intr);
  CellGrid grid = fit_cells(cloud, cfg);
  const std::vector<int> seeds = select_seeds(grid, cfg);
  CellLabels cell_labels = grow_regions(grid, seeds, cfg);
  SegmentLabelImage refined = refine_boundaries(cell_labels, cloud, cfg);

  const int w = cloud.width;
  const std::size_t nregions = cell_labels.region_count();
  std::vector<int> labels = debug ? refined.labels : std::move(refined.labels);
  std::vector<PlanarRegion> regions;
  std::vector<int> final_label(nregions, -1);
  // Cleanup may strip most of a region's support; what is left must still
  // amount to min_region_cells full cells.
  const std::size_t min_pixels = static_cast<std::size_t>(cfg.min_region_cells) * cfg.cell_size * cfg.cell_size;

  std::vector<PixelBox> boxes(nregions);
  for (int v = 0; v < depth.height; ++v)
    for (int u = 0; u < w; ++u) {
      const int l = labels[static_cast<std::size_t>(v) * w + u];
      if (l >= 0) boxes[l].add(u, v);
    }

  for (std::size_t r = 0; r < nregions; ++r) {
    const PixelBox& box = boxes[r];
    if (box.u1 < box.u0) continue;
    const int label = static_cast<int>(r);
    BinaryImage mask(box.u1 - box.u0 + 1, box.v1 - box.v0 + 1);
    for (int y = 0; y < mask.height; ++y) {
      const int* row = labels.data() + static_cast<std::size_t>(box.v0 + y) * w + box.u0;
      for (int x = 0; x < mask.width; ++x)
        if (row[x] == label) mask.bits[static_cast<std::size_t>(y) * mask.width + x] = 1;
    }
    std::optional<PlaneFit> fit;
    // Clean the support until it is one saddle-free component whose every
    // point lies within refine_dist_max of the plane fitted to it.
    for (int iter = 0; iter < 16; ++iter) {
      do {
        keep_largest_component(mask);
      } while (remove_saddles(mask) > 0);
      fit = fit_mask(cloud, mask, box.u0, box.v0);
      if (!fit) break;
      const double b = fit->bias();
      bool dropped = false;
      for (int y = 0; y < mask.height; ++y) {
        std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
        const Vec3* pts = cloud.points.data() + static_cast<std::size_t>(box.v0 + y) * w + box.u0;
        for (int x = 0; x < mask.width; ++x) {
          if (row[x] && !(std::abs(fit->normal.dot(pts[x]) - b) < cfg.refine_dist_max)) {
            row[x] = 0;
            dropped = true;
          }
        }
      }
      if (!dropped) break;
      fit.reset();
    }
    const std::size_t kept = mask.count();
    const bool accepted = fit && kept >= min_pixels;
    for (int y = 0; y < mask.height; ++y) {
      int* row = labels.data() + static_cast<std::size_t>(box.v0 + y) * w + box.u0;
      const std::uint8_t* m = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
      for (int x = 0; x < mask.width; ++x)
        if (row[x] == label && (!accepted || !m[x])) row[x] = -1;
    }
    if (!accepted) continue;

    fill_small_holes(mask, static_cast<std::size_t>(cfg.cell_size) * cfg.cell_size);
    const ContourSet contours = extract_contour(mask);

    // Lattice corner (x, y) of pixel (u0 + x, v0 + y) sits at image (u0 + x - 0.5, v0 + y - 0.5).
    auto to_image = [&](const Loop2& loop) {
      Loop2 img;
      img.reserve(loop.size());
      for (const Vec2& q : loop) img.emplace_back(box.u0 + q.x() - 0.5, box.v0 + q.y() - 0.5);
      return img;
    };
    PlanarRegion region;
    region.normal = fit->normal;
    region.centroid = fit->mean;
    region.mse = fit->mse;
    region.n_points = static_cast<std::int64_t>(kept);
    region.contour = backproject_contour(to_image(contours.outers.front()), fit->normal, fit->mean, intr);
    if (region.contour.size() < 3) {
      for (int y = 0; y < mask.height; ++y) {
        int* row = labels.data() + static_cast<std::size_t>(box.v0 + y) * w + box.u0;
        for (int x = 0; x < mask.width; ++x)
          if (row[x] == label) row[x] = -1;
      }
      continue;
    }
    for (const Loop2& hole : contours.holes) {
      Loop3 h = backproject_contour(to_image(hole), fit->normal, fit->mean, intr);
      if (h.size() >= 3) region.holes.push_back(std::move(h));
    }
    final_label[r] = static_cast<int>(regions.size());
    regions.push_back(std::move(region));
  }

  for (int& l : labels)
    if (l >= 0) l = final_label[l];

  if (debug) {
    debug->cloud = std::move(cloud);
    debug->cells = std::move(grid);
    debug->cell_labels = std::move(cell_labels);
    debug->refined = std::move(refined);
    debug->labels = SegmentLabelImage{w, depth.height, std::move(labels)};
  }
  return regions;
}

}  // namespace polyterrain::segmentation
