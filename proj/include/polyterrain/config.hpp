#pragma once

#include <cmath>
#include <numbers>

namespace polyterrain {

/// Tunables for the whole pipeline. Lengths in meters, areas in m^2.
struct PipelineConfig {
  int cell_size = 20;                   // pixels per cell side
  double seed_mse_max = 2.5e-5;         // cell MSE bound at 1 m range, scaled by z^4 beyond
  double discontinuity_max = 0.05;      // max depth jump between adjacent pixels in a cell
  double tau_theta = 1.0 - std::cos(5.0 * std::numbers::pi / 180.0);
  double tau_b = 0.02;
  double raster_resolution = 0.01;
  double epsilon = 9e-4;                // simplification threshold (9 cm^2)
  double foot_diameter = 0.04;
  double refine_dist_max = 0.04;

  int min_region_cells = 4;

  /// Throws ContractViolation unless every field is strictly positive.
  void validate() const;

  /// MSE bound for a cell whose mean depth is `z` meters.
  double cell_mse_bound(double z) const {
    const double scale = z > 1.0 ? z * z * z * z : 1.0;
    return seed_mse_max * scale;
  }
};

}  // namespace polyterrain
