#pragma once

#include "polyterrain/geometry2d.hpp"

#include <vector>

namespace polyterrain {

/// Boundary loops of a binary image, in its lattice coordinates (cell corners
/// at integer positions). Outer loops are counterclockwise (positive signed
/// area), holes clockwise. Only corner vertices are emitted.
struct ContourSet {
  std::vector<Loop2> outers;
  std::vector<Loop2> holes;

  std::vector<Loop2> all() const;
};

/// Crack-following border extraction with 8-connected foreground: diagonal
/// neighbours belong to the same outer loop, which then passes the shared
/// corner twice. Throws EmptyRegion on an empty mask.
ContourSet extract_contour(const BinaryImage& mask);

/// Clears foreground pixels until no 2x2 window holds a diagonal-only pair.
/// Afterwards every lattice corner carries 0 or 2 boundary edges, so all
/// loops are simple and pairwise vertex-disjoint. Returns the number of
/// pixels cleared.
int remove_saddles(BinaryImage& mask);

/// Keeps the largest 8-connected component (ties: first in raster order).
void keep_largest_component(BinaryImage& mask);

/// Fills 4-connected background components that do not touch the border and
/// have fewer than `max_pixels` cells.
void fill_small_holes(BinaryImage& mask, std::size_t max_pixels);

/// 3x3 morphology; pixels outside the image count as background.
BinaryImage dilate(const BinaryImage& mask);
BinaryImage erode(const BinaryImage& mask);

}  // namespace polyterrain
