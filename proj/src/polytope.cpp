#include "polyterrain/polytope.hpp"

#include "polyterrain/error.hpp"
#include "polyterrain/geometry2d.hpp"
#include "polyterrain/plane_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace polyterrain::polytope {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double triangle_error(const Vec2& prev, const Vec2& v, const Vec2& next) {
  return std::abs(cross2(v - prev, next - v)) / 2.0;
}

double inscribed_circle_diameter(const Vec2& prev, const Vec2& v, const Vec2& next) {
  const double area = triangle_error(prev, v, next);
  const double s = ((v - prev).norm() + (next - v).norm() + (prev - next).norm()) / 2.0;
  if (!(area > 0.0) || !(s > 0.0)) return 0.0;
  return 2.0 * area / s;
}

bool is_convex_vertex(const Vec2& prev, const Vec2& v, const Vec2& next, bool counterclockwise) {
  const double c = cross2(v - prev, next - v);
  return counterclockwise ? c >= 0.0 : c <= 0.0;
}

namespace {

// Binary min-heap over vertex ids with position tracking, ordered by
// (key, id).
class IndexedHeap {
 public:
  IndexedHeap(const std::vector<double>& keys, std::int64_t& ops) : keys_(keys), ops_(ops), pos_(keys.size(), -1) {}

  bool empty() const { return heap_.empty(); }
  int top() const { return heap_.front(); }

  void push(int id) {
    ++ops_;
    pos_[id] = static_cast<int>(heap_.size());
    heap_.push_back(id);
    sift_up(pos_[id]);
  }
  void pop() {
    ++ops_;
    const int id = heap_.front();
    swap_at(0, static_cast<int>(heap_.size()) - 1);
    heap_.pop_back();
    pos_[id] = -1;
    if (!heap_.empty()) sift_down(0);
  }
  // Restores order after keys_[id] changed.
  void update(int id) {
    const int p = pos_[id];
    if (p < 0) return;
    ++ops_;
    sift_up(p);
    sift_down(pos_[id]);
  }

 private:
  bool less(int a, int b) const { return keys_[a] < keys_[b] || (keys_[a] == keys_[b] && a < b); }
  void swap_at(int i, int j) {
    std::swap(heap_[i], heap_[j]);
    pos_[heap_[i]] = i;
    pos_[heap_[j]] = j;
  }
  void sift_up(int i) {
    while (i > 0) {
      const int parent = (i - 1) / 2;
      if (!less(heap_[i], heap_[parent])) break;
      ++ops_;
      swap_at(i, parent);
      i = parent;
    }
  }
  void sift_down(int i) {
    const int n = static_cast<int>(heap_.size());
    while (true) {
      const int l = 2 * i + 1, r = l + 1;
      int m = i;
      if (l < n && less(heap_[l], heap_[m])) m = l;
      if (r < n && less(heap_[r], heap_[m])) m = r;
      if (m == i) break;
      ++ops_;
      swap_at(i, m);
      i = m;
    }
  }

  const std::vector<double>& keys_;
  std::int64_t& ops_;
  std::vector<int> pos_;
  std::vector<int> heap_;
};

}  // namespace

SimplifyResult simplify_contour_traced(std::span<const Vec2> contour, double epsilon, double foot_diameter,
                                       LoopRole role) {
  const int n = static_cast<int>(contour.size());
  if (n < 3) throw ContractViolation("simplify_contour: fewer than 3 vertices");
  const double orient = signed_area(contour) < 0.0 ? -1.0 : 1.0;

  std::vector<int> prev(n), next(n);
  for (int i = 0; i < n; ++i) {
    prev[i] = (i + n - 1) % n;
    next[i] = (i + 1) % n;
  }
  std::vector<std::uint8_t> pinned(n, 0), removed(n, 0);
  std::vector<double> key(n);
  auto turn = [&](int i) { return orient * cross2(contour[i] - contour[prev[i]], contour[next[i]] - contour[i]); };
  auto expands = [&](int i) { return role == LoopRole::kOuter ? turn(i) < 0.0 : turn(i) > 0.0; };
  auto rekey = [&](int i) { key[i] = pinned[i] ? kInf : triangle_error(contour[prev[i]], contour[i], contour[next[i]]); };

  SimplifyResult out;
  IndexedHeap heap(key, out.stats.heap_ops);
  for (int i = 0; i < n; ++i) {
    rekey(i);
    heap.push(i);
  }
  int alive = n;
  while (alive > 3 && !heap.empty()) {
    const int i = heap.top();
    if (!(key[i] <= epsilon)) break;
    heap.pop();
    ++out.stats.pops;
    const Vec2& a = contour[prev[i]];
    const Vec2& b = contour[next[i]];
    const double d = inscribed_circle_diameter(a, contour[i], b);
    const bool grows = expands(i);
    if (grows && d >= foot_diameter) {
      pinned[i] = 1;
      key[i] = kInf;
      out.pinned.push_back(i);
      ++out.stats.pinned;
      continue;
    }
    out.removals.push_back({i, a, contour[i], b, key[i], d, grows});
    removed[i] = 1;
    --alive;
    const int p = prev[i], q = next[i];
    next[p] = q;
    prev[q] = p;
    rekey(p);
    heap.update(p);
    rekey(q);
    heap.update(q);
  }

  int start = 0;
  while (removed[start]) ++start;
  int i = start;
  do {
    out.kept.push_back(i);
    out.vertices.push_back(contour[i]);
    i = next[i];
  } while (i != start);
  std::sort(out.pinned.begin(), out.pinned.end());
  return out;
}

Loop2 simplify_contour(std::span<const Vec2> contour, double epsilon, double foot_diameter, LoopRole role) {
  return simplify_contour_traced(contour, epsilon, foot_diameter, role).vertices;
}

int count_concave(std::span<const Vec2> loop) {
  const int n = static_cast<int>(loop.size());
  int q = 0;
  for (int i = 0; i < n; ++i)
    if (!is_convex_vertex(loop[(i + n - 1) % n], loop[i], loop[(i + 1) % n])) ++q;
  return q;
}

namespace {

double scale_of(std::span<const Vec2> loop) {
  Vec2 lo = loop.front(), hi = loop.front();
  for (const Vec2& p : loop) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return std::max((hi - lo).norm(), 1e-300);
}

Loop2 dedup(std::span<const Vec2> loop, double tol) {
  Loop2 out;
  for (const Vec2& p : loop)
    if (out.empty() || (p - out.back()).norm() > tol) out.push_back(p);
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
  return out;
}

// Weakly simple counterclockwise loop -> convex parts.
std::vector<Loop2> partition_loop(Loop2 start, double min_area) {
  std::vector<Loop2> out;
  if (start.size() < 3) return out;
  const double scale = scale_of(start);
  const double cross_tol = 1e-12 * scale * scale;
  const double snap = 1e-9 * std::max(1.0, scale);
  const double t_tol = 1e-12 * scale;
  std::size_t budget = 4 * start.size() + 16;

  std::vector<Loop2> stack;
  stack.push_back(dedup(start, 0.0));
  while (!stack.empty()) {
    Loop2 poly = std::move(stack.back());
    stack.pop_back();
    const int n = static_cast<int>(poly.size());
    if (n < 3) continue;

    int concave = -1;
    for (int i = 0; i < n && concave < 0; ++i) {
      const Vec2 in = poly[i] - poly[(i + n - 1) % n];
      const Vec2 outd = poly[(i + 1) % n] - poly[i];
      const double c = cross2(in, outd);
      if (c < -cross_tol || (std::abs(c) <= cross_tol && in.dot(outd) < 0.0)) concave = i;
    }
    if (concave < 0) {
      const double area = signed_area(poly);
      if (area > 0.0 && area >= min_area) out.push_back(std::move(poly));
      continue;
    }
    if (budget-- == 0) throw ContractViolation("convex_partition: split budget exhausted");

    const int i = concave;
    const Vec2 p = poly[i];
    const Vec2 d = p - poly[(i + n - 1) % n];
    double best_t = kInf;
    int best_edge = -1;
    double best_u = 0.0;
    for (int j = 0; j < n; ++j) {
      const int j1 = (j + 1) % n;
      if (j == i || j1 == i) continue;
      const Vec2& a = poly[j];
      const Vec2 e = poly[j1] - a;
      const double denom = cross2(d, e);
      if (!(denom > 0.0)) continue;  // only edges the ray leaves the interior through
      const Vec2 ap = a - p;
      const double t = cross2(ap, e) / denom;
      const double u = cross2(ap, d) / denom;
      const double elen = e.norm();
      const double slack = elen > 0.0 ? snap / elen : 0.0;
      if (!(t > t_tol) || u < -slack || u > 1.0 + slack) continue;
      if (t < best_t) {
        best_t = t;
        best_edge = j;
        best_u = std::clamp(u, 0.0, 1.0);
      }
    }
    if (best_edge < 0) throw ContractViolation("convex_partition: extension ray found no boundary");

    const int j = best_edge, j1 = (j + 1) % n;
    const Vec2 s = poly[j] + best_u * (poly[j1] - poly[j]);
    Loop2 a, b;
    auto walk = [&](int from, int to, Loop2& dst) {
      for (int k = from;; k = (k + 1) % n) {
        dst.push_back(poly[k]);
        if (k == to) break;
      }
    };
    if ((s - poly[j]).norm() <= snap) {
      walk(i, j, a);
      walk(j, i, b);
    } else if ((s - poly[j1]).norm() <= snap) {
      walk(i, j1, a);
      walk(j1, i, b);
    } else {
      walk(i, j, a);
      a.push_back(s);
      b.push_back(s);
      walk(j1, i, b);
    }
    stack.push_back(dedup(b, 0.0));
    stack.push_back(dedup(a, 0.0));
  }
  return out;
}

// Segment v -> q leaves vertex v (neighbours a before, b after) strictly
// into the region on the left of a -> v -> b. Angles are compared through
// normalized sines, so near-collinear bridges count as blocked.
bool in_cone(const Vec2& a, const Vec2& v, const Vec2& b, const Vec2& q) {
  constexpr double kSinTol = 1e-9;
  auto turn = [](const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    const Vec2 e1 = p1 - p0, e2 = p2 - p0;
    const double len = e1.norm() * e2.norm();
    return len > 0.0 ? cross2(e1, e2) / len : 0.0;
  };
  if (turn(v, b, a) >= 0.0) return turn(v, q, a) > kSinTol && turn(q, v, b) > kSinTol;
  return !(turn(v, q, b) >= -kSinTol && turn(q, v, a) >= -kSinTol);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

Loop2 oriented(std::span<const Vec2> loop, bool ccw) {
  Loop2 out(loop.begin(), loop.end());
  if ((signed_area(out) > 0.0) != ccw) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Loop2> convex_partition(std::span<const Vec2> contour, double min_area) {
  if (contour.size() < 3) return {};
  Loop2 poly = dedup(contour, 0.0);
  if (poly.size() < 3) return {};
  if (!is_simple(poly)) throw NonSimplePolygon("convex_partition: polygon is not simple");
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return partition_loop(std::move(poly), min_area);
}

Loop2 bridge_holes(const Loop2& outer_in, const std::vector<Loop2>& holes_in) {
  Loop2 poly = oriented(outer_in, true);
  std::vector<Loop2> holes;
  for (const Loop2& h : holes_in)
    if (h.size() >= 3) holes.push_back(oriented(h, false));

  auto max_x = [](const Loop2& l) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(l.size()); ++k)
      if (l[k].x() > l[best].x()) best = k;
    return best;
  };
  std::vector<int> order(holes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return holes[a][max_x(holes[a])].x() > holes[b][max_x(holes[b])].x(); });

  std::vector<Loop2> every{poly};
  every.insert(every.end(), holes.begin(), holes.end());
  const Bounds2 box = bounds_of(every);
  const double clearance = 1e-9 * std::max(1.0, (box.hi - box.lo).norm());

  std::vector<std::uint8_t> done(holes.size(), 0);
  for (int hi : order) {
    const Loop2& hole = holes[hi];
    const int h = max_x(hole);
    const Vec2 hp = hole[h];

    std::vector<int> cand(poly.size());
    std::iota(cand.begin(), cand.end(), 0);
    std::stable_sort(cand.begin(), cand.end(),
                     [&](int a, int b) { return (poly[a] - hp).squaredNorm() < (poly[b] - hp).squaredNorm(); });

    const std::size_t hn = hole.size();
    auto blocked = [&](int c) {
      const Vec2& op = poly[c];
      const std::size_t pn = poly.size();
      if (!in_cone(hole[(h + hn - 1) % hn], hp, hole[(h + 1) % hn], op)) return true;
      if (!in_cone(poly[(c + pn - 1) % pn], op, poly[(c + 1) % pn], hp)) return true;
      auto hits = [&](const Loop2& loop) {
        const std::size_t m = loop.size();
        for (std::size_t k = 0; k < m; ++k) {
          const Vec2& a = loop[k];
          const Vec2& b = loop[(k + 1) % m];
          if (a != op && a != hp && point_segment_distance(a, hp, op) <= clearance) return true;
          if (a == op || b == op || a == hp || b == hp) continue;
          if (segments_intersect(hp, op, a, b)) return true;
        }
        return false;
      };
      if (hits(poly)) return true;
      for (std::size_t k = 0; k < holes.size(); ++k)
        if (!done[k] && hits(holes[k])) return true;
      std::vector<Loop2> region{poly};
      for (std::size_t k = 0; k < holes.size(); ++k)
        if (!done[k]) region.push_back(holes[k]);
      return !point_in_loops((hp + op) / 2.0, region);
    };

    int o = -1;
    for (int c : cand)
      if (!blocked(c)) {
        o = c;
        break;
      }
    if (o < 0) throw ContractViolation("bridge_holes: no visible outer vertex for hole");

    Loop2 merged;
    merged.reserve(poly.size() + hole.size() + 2);
    merged.insert(merged.end(), poly.begin(), poly.begin() + o + 1);
    for (std::size_t k = 0; k <= hole.size(); ++k) merged.push_back(hole[(h + k) % hole.size()]);
    merged.push_back(poly[o]);
    merged.insert(merged.end(), poly.begin() + o + 1, poly.end());
    poly.swap(merged);
    done[hi] = 1;
  }
  return poly;
}

std::vector<Loop2> convex_partition_with_holes(const Loop2& outer, const std::vector<Loop2>& holes, double min_area) {
  if (holes.empty()) return convex_partition(outer, min_area);
  std::vector<Loop2> all{outer};
  all.insert(all.end(), holes.begin(), holes.end());
  if (!loops_disjoint_simple(all)) throw NonSimplePolygon("convex_partition: loops intersect");
  return partition_loop(bridge_holes(outer, holes), min_area);
}

std::vector<ConvexPolygon> approximate_region(const PlanarRegion& region, const PipelineConfig& cfg) {
  std::vector<ConvexPolygon> out;
  if (region.contour.size() < 3) return out;
  const PlaneFrame2D frame = PlaneFrame2D::make(region.centroid, region.normal, cfg.raster_resolution);
  const double min_area = cfg.raster_resolution * cfg.raster_resolution;

  Loop2 outer = oriented(frame.project(region.contour), true);
  if (!(std::abs(signed_area(outer)) > min_area)) return out;
  std::vector<Loop2> holes;
  for (const Loop3& h : region.holes) {
    Loop2 hl = oriented(frame.project(h), false);
    if (hl.size() >= 3 && std::abs(signed_area(hl)) > 0.0) holes.push_back(std::move(hl));
  }

  // Loops simplified independently may collide; back off epsilon until they do not.
  Loop2 s_outer = outer;
  std::vector<Loop2> s_holes = holes;
  double eps = cfg.epsilon;
  for (int attempt = 0; attempt < 12; ++attempt, eps /= 2.0) {
    Loop2 o = simplify_contour(outer, eps, cfg.foot_diameter, LoopRole::kOuter);
    std::vector<Loop2> hs;
    std::vector<Loop2> all{o};
    for (const Loop2& h : holes) {
      hs.push_back(simplify_contour(h, eps, cfg.foot_diameter, LoopRole::kHole));
      all.push_back(hs.back());
    }
    if (loops_disjoint_simple(all)) {
      s_outer = std::move(o);
      s_holes = std::move(hs);
      break;
    }
  }

  std::vector<Loop2> parts = convex_partition_with_holes(s_outer, s_holes, min_area);
  out.reserve(parts.size());
  for (const Loop2& part : parts) out.push_back({region.normal, frame.lift(part)});
  return out;
}

}  // namespace polyterrain::polytope
