#include "polyterrain/eval.hpp"

#include "polyterrain/error.hpp"
#include "polyterrain/geometry2d.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polyterrain::eval {

namespace {

struct Window {
  int col0 = 0, row0 = 0, col1 = 0, row1 = 0;  // half-open
  bool empty() const { return col1 <= col0 || row1 <= row0; }
};

Window window_of(const Shape2& shape, double res) {
  Bounds2 bb;
  for (const auto& group : shape)
    for (const Loop2& l : group)
      for (const Vec2& p : l) bb.add(p);
  if (!bb.valid()) return {};
  return {static_cast<int>(std::floor(bb.lo.x() / res)), static_cast<int>(std::floor(bb.lo.y() / res)),
          static_cast<int>(std::ceil(bb.hi.x() / res)), static_cast<int>(std::ceil(bb.hi.y() / res))};
}

BinaryImage fill(const Shape2& shape, double res, const Window& w) {
  BinaryImage acc(w.col1 - w.col0, w.row1 - w.row0);
  BinaryImage tmp(acc.width, acc.height);
  for (const auto& group : shape) {
    std::fill(tmp.bits.begin(), tmp.bits.end(), 0);
    fill_loops(group, res, w.col0, w.row0, tmp);
    for (std::size_t i = 0; i < acc.bits.size(); ++i) acc.bits[i] |= tmp.bits[i];
  }
  return acc;
}

}  // namespace

std::size_t raster_area_cells(const Shape2& shape, double resolution) {
  const Window w = window_of(shape, resolution);
  if (w.empty()) return 0;
  return fill(shape, resolution, w).count();
}

double raster_iou(const Shape2& a, const Shape2& b, double resolution) {
  const std::size_t na = raster_area_cells(a, resolution);
  const std::size_t nb = raster_area_cells(b, resolution);
  if (na + nb == 0) return 0.0;
  const Window wa = window_of(a, resolution), wb = window_of(b, resolution);
  const Window w{std::max(wa.col0, wb.col0), std::max(wa.row0, wb.row0), std::min(wa.col1, wb.col1),
                 std::min(wa.row1, wb.row1)};
  std::size_t inter = 0;
  if (!w.empty() && !wa.empty() && !wb.empty()) {
    const BinaryImage fa = fill(a, resolution, w);
    const BinaryImage fb = fill(b, resolution, w);
    for (std::size_t i = 0; i < fa.bits.size(); ++i) inter += (fa.bits[i] & fb.bits[i]) ? 1 : 0;
  }
  return static_cast<double>(inter) / static_cast<double>(na + nb - inter);
}

Shape2 project_region(const PlanarRegion& region, const PlaneFrame2D& frame) {
  std::vector<Loop2> group;
  if (region.contour.size() >= 3) group.push_back(frame.project(region.contour));
  for (const Loop3& h : region.holes)
    if (h.size() >= 3) group.push_back(frame.project(h));
  if (group.empty()) return {};
  return {group};
}

Shape2 project_polygons(const std::vector<ConvexPolygon>& polygons, const PlaneFrame2D& frame) {
  Shape2 out;
  for (const ConvexPolygon& p : polygons)
    if (p.vertices.size() >= 3) out.push_back({frame.project(p.vertices)});
  return out;
}

EvalReport evaluate(const PlanarMap& map, const scene::Scene& truth, const EvalOptions& opts) {
  if (truth.planes.empty()) throw InputError(InputError::Kind::kMalformed, "planes", "ground truth has no planes");
  const std::size_t ng = truth.planes.size(), np = map.regions.size();

  struct Pair {
    double iou;
    std::size_t g, p;
  };
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < ng; ++g) {
    const scene::GroundTruthPlane& gt = truth.planes[g];
    if (gt.boundary.size() < 3) continue;
    const PlaneFrame2D frame = PlaneFrame2D::make(gt.boundary.front(), gt.normal, opts.resolution);
    const Shape2 gshape{{frame.project(gt.boundary)}};
    for (std::size_t p = 0; p < np; ++p) {
      const bool with_polys = opts.use_polygons && p < map.polygons.size();
      const Shape2 pshape = with_polys ? project_polygons(map.polygons[p], frame) : project_region(map.regions[p], frame);
      const double iou = raster_iou(gshape, pshape, opts.resolution);
      if (iou > 0.0) pairs.push_back({iou, g, p});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.g != b.g) return a.g < b.g;
    return a.p < b.p;
  });

  EvalReport rep;
  std::vector<std::uint8_t> gused(ng, 0), pused(np, 0);
  for (const Pair& pr : pairs) {
    if (gused[pr.g] || pused[pr.p]) continue;
    gused[pr.g] = pused[pr.p] = 1;
    const scene::GroundTruthPlane& gt = truth.planes[pr.g];
    const PlanarRegion& r = map.regions[pr.p];
    const Vec3 ng_unit = gt.normal.normalized();
    const double c = std::clamp(std::abs(ng_unit.dot(r.normal.normalized())), 0.0, 1.0);
    MatchResult m;
    m.gt_id = gt.id;
    m.gt_index = static_cast<int>(pr.g);
    m.pred_index = static_cast<int>(pr.p);
    m.alpha_deg = std::acos(c) * 180.0 / std::numbers::pi;
    m.delta_b_mm = std::abs(ng_unit.dot(gt.boundary.front()) - ng_unit.dot(r.centroid)) * 1000.0;
    m.iou = pr.iou;
    rep.matches.push_back(m);
  }
  std::sort(rep.matches.begin(), rep.matches.end(),
            [](const MatchResult& a, const MatchResult& b) { return a.gt_index < b.gt_index; });
  for (const MatchResult& m : rep.matches) {
    rep.mean_alpha_deg += m.alpha_deg;
    rep.mean_delta_b_mm += m.delta_b_mm;
    rep.mean_iou += m.iou;
  }
  if (!rep.matches.empty()) {
    const double k = static_cast<double>(rep.matches.size());
    rep.mean_alpha_deg /= k;
    rep.mean_delta_b_mm /= k;
    rep.mean_iou /= k;
  }
  rep.unmatched_gt = static_cast<int>(ng - rep.matches.size());
  rep.unmatched_pred = static_cast<int>(np - rep.matches.size());
  return rep;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["matches"] = nlohmann::json::array();
  for (const MatchResult& m : matches)
    j["matches"].push_back({{"gt_id", m.gt_id},
                            {"pred_index", m.pred_index},
                            {"alpha_deg", m.alpha_deg},
                            {"delta_b_mm", m.delta_b_mm},
                            {"iou", m.iou}});
  j["mean_alpha_deg"] = mean_alpha_deg;
  j["mean_delta_b_mm"] = mean_delta_b_mm;
  j["mean_iou"] = mean_iou;
  j["unmatched_gt"] = unmatched_gt;
  j["unmatched_pred"] = unmatched_pred;
  return j.dump(2) + "\n";
}

}  // namespace polyterrain::eval
