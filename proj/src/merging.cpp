#include "polyterrain/merging.hpp"

#include "polyterrain/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace polyterrain::merging {

bool is_coplanar(const PlanarRegion& a, const PlanarRegion& b, const PipelineConfig& cfg) {
  const double dot = a.normal.dot(b.normal);
  const double sign = dot < 0.0 ? -1.0 : 1.0;
  return 1.0 - std::abs(dot) < cfg.tau_theta && std::abs(a.bias() - sign * b.bias()) < cfg.tau_b;
}

FusedAngles fuse_angles(std::span<const double> theta, std::span<const double> phi, std::span<const double> mse) {
  if (theta.empty() || theta.size() != phi.size() || theta.size() != mse.size())
    throw ContractViolation("fuse_angles: inputs must be non-empty and of equal length");
  double inv_sum = 0.0;
  for (double m : mse) inv_sum += 1.0 / std::max(m, kMseFloor);
  FusedAngles out;
  out.mse = 1.0 / inv_sum;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double w = out.mse / std::max(mse[i], kMseFloor);
    out.theta += w * theta[i];
    out.phi += w * phi[i];
  }
  return out;
}

FusedPlane merge_parameters(std::span<const PlanarRegion> parts, const PipelineConfig& cfg) {
  if (parts.empty()) throw ContractViolation("merge_parameters: no parts");
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      if (!is_coplanar(parts[i], parts[j], cfg))
        throw ContractViolation("merge_parameters: parts are not coplanar");

  FusedPlane out;
  Vec3 weighted = Vec3::Zero();
  std::vector<Vec3> normals;
  std::vector<double> mses;
  normals.reserve(parts.size());
  mses.reserve(parts.size());
  for (const PlanarRegion& p : parts) {
    out.n_points += p.n_points;
    weighted += static_cast<double>(p.n_points) * p.centroid;
    Vec3 n = p.normal.normalized();
    if (n.dot(parts[0].normal) < 0.0) n = -n;
    normals.push_back(n);
    mses.push_back(std::max(p.mse, kMseFloor));
  }
  out.centroid = weighted / static_cast<double>(out.n_points);

  // Chart: a = reference direction (theta = pi/2, phi = 0), c = chart pole.
  Vec3 ref = Vec3::Zero();
  for (std::size_t i = 0; i < normals.size(); ++i) ref += normals[i] / mses[i];
  const Vec3 a = ref.normalized();
  int k = 0;
  a.cwiseAbs().minCoeff(&k);
  const Vec3 c = (Vec3::Unit(k) - a * a(k)).normalized();
  const Vec3 b = c.cross(a);

  std::vector<double> theta, phi;
  for (const Vec3& n : normals) {
    theta.push_back(std::acos(std::clamp(n.dot(c), -1.0, 1.0)));
    phi.push_back(std::atan2(n.dot(b), n.dot(a)));  // within (-pi/2, pi/2): every n is near a
  }
  const FusedAngles f = fuse_angles(theta, phi, mses);
  out.mse = f.mse;
  out.normal = (std::sin(f.theta) * (std::cos(f.phi) * a + std::sin(f.phi) * b) + std::cos(f.theta) * c).normalized();
  return out;
}

PlaneMask rasterize(const PlanarRegion& region, const PlaneFrame2D& frame) {
  std::vector<Loop2> loops;
  loops.push_back(frame.project(region.contour));
  const double area = std::abs(signed_area(loops.front()));
  const double perim = loop_perimeter(loops.front());
  if (loops.front().size() < 3 || !(area > 1e-12 * perim * perim) || !(area > 0.0))
    throw DegenerateProjection("rasterize: contour projects to zero area");
  for (const Loop3& h : region.holes)
    if (h.size() >= 3) loops.push_back(frame.project(h));

  const Bounds2 bb = bounds_of(loops);
  const double r = frame.resolution;
  PlaneMask mask;
  mask.frame = frame;
  mask.col0 = static_cast<int>(std::floor(bb.lo.x() / r));
  mask.row0 = static_cast<int>(std::floor(bb.lo.y() / r));
  const int col1 = static_cast<int>(std::ceil(bb.hi.x() / r));
  const int row1 = static_cast<int>(std::ceil(bb.hi.y() / r));
  mask.bits = BinaryImage(std::max(1, col1 - mask.col0), std::max(1, row1 - mask.row0));
  fill_loops(loops, r, mask.col0, mask.row0, mask.bits);
  return mask;
}

namespace {

void require_same_frame(const PlaneMask& a, const PlaneMask& b, const char* what) {
  if (!(a.frame == b.frame)) throw ContractViolation(std::string(what) + ": masks use different frames");
}

}  // namespace

bool masks_connected(const PlaneMask& a, const PlaneMask& b) {
  require_same_frame(a, b, "masks_connected");
  for (int j = 0; j < b.rows(); ++j) {
    for (int i = 0; i < b.cols(); ++i) {
      if (!b.bits.get(i, j)) continue;
      const int c = b.col0 + i, r = b.row0 + j;
      for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc)
          if (a.at(c + dc, r + dr)) return true;
    }
  }
  return false;
}

PlaneMask mask_union(const PlaneMask& a, const PlaneMask& b) {
  require_same_frame(a, b, "mask_union");
  PlaneMask out;
  out.frame = a.frame;
  out.col0 = std::min(a.col0, b.col0);
  out.row0 = std::min(a.row0, b.row0);
  const int col1 = std::max(a.col0 + a.cols(), b.col0 + b.cols());
  const int row1 = std::max(a.row0 + a.rows(), b.row0 + b.rows());
  out.bits = BinaryImage(col1 - out.col0, row1 - out.row0);
  for (const PlaneMask* m : {&a, &b})
    for (int j = 0; j < m->rows(); ++j)
      for (int i = 0; i < m->cols(); ++i)
        if (m->bits.get(i, j)) out.bits.set(m->col0 + i - out.col0, m->row0 + j - out.row0);
  return out;
}

Loops3 inv_rasterize(const PlaneMask& mask) {
  const ContourSet cs = extract_contour(mask.bits);
  const double r = mask.frame.resolution;
  auto lift = [&](const Loop2& loop) {
    Loop3 out;
    out.reserve(loop.size());
    for (const Vec2& q : loop) out.push_back(mask.frame.lift(Vec2((mask.col0 + q.x()) * r, (mask.row0 + q.y()) * r)));
    return out;
  };
  Loops3 out;
  for (const Loop2& l : cs.outers) out.outers.push_back(lift(l));
  for (const Loop2& l : cs.holes) out.holes.push_back(lift(l));
  return out;
}

namespace {

// Fuses two regions known to be coplanar; nullopt unless their masks touch.
std::optional<PlanarRegion> try_merge(const PlanarRegion& hist, const PlanarRegion& incoming, const PipelineConfig& cfg) {
  const PlanarRegion pair[2] = {hist, incoming};
  const FusedPlane fused = merge_parameters(pair, cfg);
  const PlaneFrame2D frame = PlaneFrame2D::make(fused.centroid, fused.normal, cfg.raster_resolution);
  PlaneMask mh, mn;
  try {
    mh = rasterize(hist, frame);
    mn = rasterize(incoming, frame);
  } catch (const DegenerateProjection&) {
    return std::nullopt;
  }
  if (!masks_connected(mn, mh)) return std::nullopt;
  PlaneMask merged = mask_union(mn, mh);
  do {
    keep_largest_component(merged.bits);
  } while (remove_saddles(merged.bits) > 0);
  if (merged.bits.empty()) return std::nullopt;
  Loops3 loops = inv_rasterize(merged);

  PlanarRegion out;
  out.n_points = fused.n_points;
  out.centroid = fused.centroid;
  out.normal = fused.normal;
  out.mse = fused.mse;
  out.contour = std::move(loops.outers.front());
  out.holes = std::move(loops.holes);
  return out;
}

}  // namespace

std::vector<PlanarRegion> merge_planes(std::vector<PlanarRegion> historical,
                                       const std::vector<PlanarRegion>& incoming, const PipelineConfig& cfg) {
  std::vector<PlanarRegion> unmerged;
  for (const PlanarRegion& in : incoming) {
    PlanarRegion current = in;
    std::ptrdiff_t placed = -1;  // index in `historical` holding `current`, if merged
    for (std::size_t i = 0; i < historical.size(); ++i) {
      if (static_cast<std::ptrdiff_t>(i) == placed) continue;
      if (!is_coplanar(historical[i], current, cfg)) continue;
      std::optional<PlanarRegion> merged = try_merge(historical[i], current, cfg);
      if (!merged) continue;
      historical[i] = *merged;
      current = std::move(*merged);
      if (placed >= 0) {
        historical.erase(historical.begin() + placed);
        --i;
      }
      placed = static_cast<std::ptrdiff_t>(i);
    }
    if (placed < 0) unmerged.push_back(std::move(current));
  }
  for (PlanarRegion& r : unmerged) historical.push_back(std::move(r));
  return historical;
}

std::vector<PlanarRegion> consolidate(const std::vector<PlanarRegion>& regions, const PipelineConfig& cfg) {
  std::vector<PlanarRegion> out;
  for (const PlanarRegion& r : regions) out = merge_planes(std::move(out), {r}, cfg);
  return out;
}

}  // namespace polyterrain::merging
