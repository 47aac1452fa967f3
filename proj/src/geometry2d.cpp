#include "polyterrain/geometry2d.hpp"

#include <algorithm>
#include <cmath>

namespace polyterrain {

std::size_t BinaryImage::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double signed_area(std::span<const Vec2> loop) {
  const std::size_t n = loop.size();
  if (n < 3) return 0.0;
  // Shift to the first vertex to limit cancellation on far-from-origin loops.
  const Vec2 o = loop[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) twice += cross2(loop[i] - o, loop[i + 1] - o);
  return 0.5 * twice;
}

double loop_perimeter(std::span<const Vec2> loop) {
  double p = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) p += (loop[(i + 1) % loop.size()] - loop[i]).norm();
  return p;
}

Vec2 loop_centroid(std::span<const Vec2> loop) {
  const std::size_t n = loop.size();
  const Vec2 o = loop[0];
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 p = loop[i] - o, q = loop[i + 1] - o;
    const double w = cross2(p, q);
    a2 += w;
    c += w * (p + q);
  }
  if (a2 == 0.0) return o;
  return o + c / (3.0 * a2);
}

bool point_in_loops(const Vec2& p, std::span<const Loop2> loops) {
  bool inside = false;
  for (const Loop2& loop : loops) {
    const std::size_t n = loop.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2& a = loop[j];
      const Vec2& b = loop[i];
      if ((a.y() <= p.y()) != (b.y() <= p.y())) {
        const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
        if (p.x() < x) inside = !inside;
      }
    }
  }
  return inside;
}

void fill_loops(std::span<const Loop2> loops, double res, int col0, int row0, BinaryImage& image) {
  std::vector<double> xs;
  for (int j = 0; j < image.height; ++j) {
    const double y = (row0 + j + 0.5) * res;
    xs.clear();
    for (const Loop2& loop : loops) {
      const std::size_t n = loop.size();
      for (std::size_t i = 0, k = n - 1; i < n; k = i++) {
        const Vec2& a = loop[k];
        const Vec2& b = loop[i];
        if ((a.y() <= y) != (b.y() <= y)) {
          xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
        }
      }
    }
    if (xs.size() < 2) continue;
    std::sort(xs.begin(), xs.end());
    // A center c is inside iff an odd number of crossings lie strictly to its
    // right (as in point_in_loops), i.e. xs[2k] <= c < xs[2k+1].
    auto center = [&](int i) { return (col0 + i + 0.5) * res; };
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      int i0 = static_cast<int>(std::ceil(xs[k] / res - 0.5 - col0));
      while (center(i0 - 1) >= xs[k]) --i0;
      while (center(i0) < xs[k]) ++i0;
      int i1 = static_cast<int>(std::floor(xs[k + 1] / res - 0.5 - col0));
      while (center(i1 + 1) < xs[k + 1]) ++i1;
      while (i1 >= i0 && center(i1) >= xs[k + 1]) --i1;
      i0 = std::max(i0, 0);
      i1 = std::min(i1, image.width - 1);
      for (int i = i0; i <= i1; ++i) image.bits[static_cast<std::size_t>(j) * image.width + i] = 1;
    }
  }
}

namespace {

int orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

}  // namespace

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

namespace {

struct Edge {
  Vec2 a, b;
  Vec2 lo, hi;
  std::size_t loop, index;
};

std::vector<Edge> collect_edges(std::span<const Loop2> loops) {
  std::vector<Edge> edges;
  for (std::size_t l = 0; l < loops.size(); ++l) {
    const Loop2& loop = loops[l];
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vec2& a = loop[i];
      const Vec2& b = loop[(i + 1) % loop.size()];
      edges.push_back({a, b, a.cwiseMin(b), a.cwiseMax(b), l, i});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.lo.x() < y.lo.x(); });
  return edges;
}

// Sweep over x-sorted edges; adjacent edges of one loop may share exactly
// their common vertex.
bool any_crossing(std::span<const Loop2> loops) {
  const std::vector<Edge> edges = collect_edges(loops);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    for (std::size_t j = i + 1; j < edges.size() && edges[j].lo.x() <= e.hi.x(); ++j) {
      const Edge& g = edges[j];
      if (g.lo.y() > e.hi.y() || g.hi.y() < e.lo.y()) continue;
      if (e.loop == g.loop) {
        const std::size_t n = loops[e.loop].size();
        const bool consecutive = (e.index + 1) % n == g.index || (g.index + 1) % n == e.index;
        if (consecutive) {
          if (n == 3) continue;
          // Shared vertex is fine; overlap along the edges is not.
          const Vec2& shared = (e.index + 1) % n == g.index ? e.b : e.a;
          const Vec2& e_other = (e.index + 1) % n == g.index ? e.a : e.b;
          const Vec2& g_other = (e.index + 1) % n == g.index ? g.b : g.a;
          if (orient(e_other, shared, g_other) == 0 && (e_other - shared).dot(g_other - shared) > 0.0) return true;
          continue;
        }
      }
      if (segments_intersect(e.a, e.b, g.a, g.b)) return true;
    }
  }
  return false;
}

}  // namespace

bool is_simple(std::span<const Vec2> loop) {
  if (loop.size() < 3) return false;
  const Loop2 copy(loop.begin(), loop.end());
  return !any_crossing(std::span<const Loop2>(&copy, 1));
}

bool loops_disjoint_simple(std::span<const Loop2> loops) {
  for (const Loop2& l : loops) {
    if (l.size() < 3) return false;
  }
  return !any_crossing(loops);
}

Bounds2 bounds_of(std::span<const Loop2> loops) {
  Bounds2 b;
  for (const Loop2& l : loops)
    for (const Vec2& p : l) b.add(p);
  return b;
}

}  // namespace polyterrain
