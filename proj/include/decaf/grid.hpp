#pragma once

#include <Eigen/Core>

#include "decaf/errors.hpp"

namespace decaf {

/// Regular voxel grid. Pitches are in micrometres; the first slice sits at
/// axial position z0 with the focal plane at z = 0. Slice q lies at
/// z0 + q*dz.
struct Grid3D {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0, dy = 0, dz = 0;
  double z0 = 0;

  [[nodiscard]] long voxels() const { return static_cast<long>(nx) * ny * nz; }
  [[nodiscard]] long pixels() const { return static_cast<long>(nx) * ny; }

  void validate() const {
    if (nx < 1 || ny < 1 || nz < 1)
      throw ConfigError("grid dimensions must be positive");
    if (!(dx > 0) || !(dy > 0) || !(dz > 0))
      throw ConfigError("grid pitches must be positive");
  }
};

/// Maps voxel index i on an n-point axis to [-1, 1]: index 0 -> -1,
/// index n-1 -> +1, spacing 2/(n-1). A single-point axis maps to 0.
inline double normalized_coord(int i, int n) {
  return n > 1 ? -1.0 + 2.0 * i / (n - 1) : 0.0;
}

/// Normalized field coordinates of voxel (ix, iy, iz).
inline Eigen::Vector3d normalize_coords(const Grid3D& g, int ix, int iy, int iz) {
  return {normalized_coord(ix, g.nx), normalized_coord(iy, g.ny),
          normalized_coord(iz, g.nz)};
}

}  // namespace decaf
