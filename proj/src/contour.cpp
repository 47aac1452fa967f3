#include "polyterrain/contour.hpp"

#include "polyterrain/error.hpp"

#include <algorithm>
#include <array>

namespace polyterrain {

std::vector<Loop2> ContourSet::all() const {
  std::vector<Loop2> out = outers;
  out.insert(out.end(), holes.begin(), holes.end());
  return out;
}

namespace {

// Directions: 0 = +x, 1 = +y, 2 = -x, 3 = -y. Turning left is +1.
constexpr std::array<int, 4> kDx{1, 0, -1, 0};
constexpr std::array<int, 4> kDy{0, 1, 0, -1};

// Pixel on the left / right of the crack leaving corner (cx, cy) along `dir`.
std::array<int, 2> left_pixel(int cx, int cy, int dir) {
  switch (dir) {
    case 0: return {cx, cy};
    case 1: return {cx - 1, cy};
    case 2: return {cx - 1, cy - 1};
    default: return {cx, cy - 1};
  }
}
std::array<int, 2> right_pixel(int cx, int cy, int dir) {
  switch (dir) {
    case 0: return {cx, cy - 1};
    case 1: return {cx, cy};
    case 2: return {cx - 1, cy};
    default: return {cx - 1, cy - 1};
  }
}

bool is_edge(const BinaryImage& m, int cx, int cy, int dir) {
  const auto l = left_pixel(cx, cy, dir);
  const auto r = right_pixel(cx, cy, dir);
  return m.get(l[0], l[1]) && !m.get(r[0], r[1]);
}

}  // namespace

ContourSet extract_contour(const BinaryImage& mask) {
  if (mask.empty()) throw EmptyRegion("extract_contour: empty mask");
  const int cw = mask.width + 1;
  const int ch = mask.height + 1;
  std::vector<std::uint8_t> visited(static_cast<std::size_t>(cw) * ch * 4, 0);
  auto edge_id = [&](int cx, int cy, int dir) {
    return (static_cast<std::size_t>(cy) * cw + cx) * 4 + dir;
  };

  // Corner (cx, cy) touches padded pixels (cx..cx+1, cy..cy+1).
  std::vector<std::uint8_t> padded(static_cast<std::size_t>(cw + 1) * (ch + 1), 0);
  for (int y = 0; y < mask.height; ++y)
    std::copy_n(mask.bits.data() + static_cast<std::size_t>(y) * mask.width, mask.width,
                padded.data() + static_cast<std::size_t>(y + 1) * (cw + 1) + 1);
  ContourSet out;
  for (int cy = 0; cy < ch; ++cy) {
    for (int cx = 0; cx < cw; ++cx) {
      // Corners whose four pixels agree start no crack.
      const std::uint8_t* up = padded.data() + static_cast<std::size_t>(cy) * (cw + 1) + cx;
      const std::uint8_t* down = up + cw + 1;
      if (up[0] == up[1] && up[0] == down[0] && up[0] == down[1]) continue;
      for (int d0 = 0; d0 < 4; ++d0) {
        if (visited[edge_id(cx, cy, d0)] || !is_edge(mask, cx, cy, d0)) continue;
        Loop2 loop;
        int x = cx, y = cy, dir = d0;
        int prev_dir = -1;
        while (!visited[edge_id(x, y, dir)]) {
          visited[edge_id(x, y, dir)] = 1;
          if (dir != prev_dir) loop.emplace_back(x, y);
          prev_dir = dir;
          x += kDx[dir];
          y += kDy[dir];
          // Right turn first keeps diagonal foreground neighbours connected.
          int next = -1;
          for (int turn : {3, 0, 1}) {
            const int cand = (dir + turn) % 4;
            if (is_edge(mask, x, y, cand)) {
              next = cand;
              break;
            }
          }
          dir = next;
        }
        // The start vertex is redundant when the loop closes straight through it.
        if (prev_dir == d0 && loop.size() > 1) loop.erase(loop.begin());
        if (signed_area(loop) > 0.0) {
          out.outers.push_back(std::move(loop));
        } else {
          out.holes.push_back(std::move(loop));
        }
      }
    }
  }
  return out;
}

int remove_saddles(BinaryImage& mask) {
  int cleared = 0;
  auto neighbours = [&](int x, int y) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if ((dx || dy) && mask.get(x + dx, y + dy)) ++n;
    return n;
  };
  std::vector<std::array<int, 2>> pending;
  // Clears one pixel of the 2x2 window at (x, y) if it is a saddle and
  // queues the windows that clearing may have turned into saddles.
  auto resolve = [&](int x, int y) {
    if (x < 0 || y < 0 || x + 1 >= mask.width || y + 1 >= mask.height) return;
    const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width + x;
    const bool a = row[0], b = row[1];
    const bool c = row[mask.width], d = row[mask.width + 1];
    if (a != d || b != c || a == b) return;
    int px = x, py = y, qx = x + 1, qy = y + 1;
    if (b) px = x + 1, py = y, qx = x, qy = y + 1;
    // Drop the less supported pixel of the diagonal pair.
    if (neighbours(qx, qy) < neighbours(px, py)) std::swap(px, qx), std::swap(py, qy);
    mask.set(px, py, false);
    ++cleared;
    for (int wy = py - 1; wy <= py; ++wy)
      for (int wx = px - 1; wx <= px; ++wx) pending.push_back({wx, wy});
  };
  for (int y = 0; y + 1 < mask.height; ++y) {
    const std::uint8_t* top = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
    const std::uint8_t* bottom = top + mask.width;
    for (int x = 0; x + 1 < mask.width; ++x)
      if (top[x] == bottom[x + 1] && top[x + 1] == bottom[x] && top[x] != top[x + 1]) resolve(x, y);
  }
  while (!pending.empty()) {
    const auto [x, y] = pending.back();
    pending.pop_back();
    resolve(x, y);
  }
  return cleared;
}

void keep_largest_component(BinaryImage& mask) {
  // Run-length labelling: runs of a row join 8-adjacent runs of the row above.
  struct Run {
    int y, x0, x1;  // inclusive
  };
  const int w = mask.width;
  std::vector<Run> runs;
  std::vector<int> parent;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::size_t prev_begin = 0, prev_end = 0;
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * w;
    const std::size_t row_begin = runs.size();
    std::size_t j = prev_begin;
    for (int x = 0; x < w;) {
      if (!row[x]) {
        ++x;
        continue;
      }
      const int x0 = x;
      while (x < w && row[x]) ++x;
      const int id = static_cast<int>(runs.size());
      runs.push_back({y, x0, x - 1});
      parent.push_back(id);
      while (j < prev_end && runs[j].x1 + 1 < x0) ++j;
      for (std::size_t k = j; k < prev_end && runs[k].x0 <= x; ++k) {
        const int a = find(static_cast<int>(k)), b = find(id);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    prev_begin = row_begin;
    prev_end = runs.size();
  }
  std::vector<std::size_t> sizes(runs.size(), 0);
  std::size_t roots = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const int r = find(static_cast<int>(i));
    if (sizes[r] == 0) ++roots;
    sizes[r] += static_cast<std::size_t>(runs[i].x1 - runs[i].x0 + 1);
  }
  if (roots <= 1) return;
  // Roots are the first run of each component, so ties keep the earliest in scan order.
  const int keep = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (find(static_cast<int>(i)) == keep) continue;
    std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(runs[i].y) * w;
    std::fill(row + runs[i].x0, row + runs[i].x1 + 1, std::uint8_t{0});
  }
}

void fill_small_holes(BinaryImage& mask, std::size_t max_pixels) {
  const std::size_t n = mask.bits.size();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<int> comp, stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (mask.bits[start] || seen[start]) continue;
    comp.clear();
    stack.assign(1, static_cast<int>(start));
    seen[start] = 1;
    bool touches_border = false;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      comp.push_back(p);
      const int px = p % mask.width, py = p / mask.width;
      if (px == 0 || py == 0 || px == mask.width - 1 || py == mask.height - 1) touches_border = true;
      constexpr int dx[4] = {1, -1, 0, 0};
      constexpr int dy[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int qx = px + dx[k], qy = py + dy[k];
        if (!mask.inside(qx, qy)) continue;
        const std::size_t q = static_cast<std::size_t>(qy) * mask.width + qx;
        if (!mask.bits[q] && !seen[q]) {
          seen[q] = 1;
          stack.push_back(static_cast<int>(q));
        }
      }
    }
    if (!touches_border && comp.size() < max_pixels)
      for (int p : comp) mask.bits[p] = 1;
  }
}

BinaryImage dilate(const BinaryImage& mask) {
  BinaryImage out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      bool on = false;
      for (int dy = -1; dy <= 1 && !on; ++dy)
        for (int dx = -1; dx <= 1 && !on; ++dx) on = mask.get(x + dx, y + dy);
      if (on) out.set(x, y);
    }
  return out;
}

BinaryImage erode(const BinaryImage& mask) {
  BinaryImage out(mask.width, mask.height);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x) {
      bool on = mask.get(x, y);
      for (int dy = -1; dy <= 1 && on; ++dy)
        for (int dx = -1; dx <= 1 && on; ++dx) on = mask.get(x + dx, y + dy);
      if (on) out.set(x, y);
    }
  return out;
}

}  // namespace polyterrain
