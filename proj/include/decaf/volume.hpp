#pragma once

#include <Eigen/Core>
#include <vector>

#include "decaf/grid.hpp"

namespace decaf {

/// One lateral slice, indexed S(ix, iy); ix varies fastest in memory.
using Slice = Eigen::MatrixXd;
using CSlice = Eigen::MatrixXcd;

/// Complex permittivity contrast eps - n0^2 on a grid, split into channels:
/// re[q] holds the real part of slice q, im[q] the imaginary part. An empty
/// im vector marks a purely real volume.
struct PermittivityVolume {
  Grid3D grid;
  std::vector<Slice> re;
  std::vector<Slice> im;

  [[nodiscard]] bool complex_pair() const { return !im.empty(); }
  static PermittivityVolume zeros(const Grid3D& g, bool complex_pair = true);
};

/// Refractive index n_re + j*n_im relative to a background medium n0.
struct RIVolume {
  Grid3D grid;
  double n0 = 1.0;
  std::vector<Slice> re;
  std::vector<Slice> im;
};

/// ri = sqrt(n0^2 + d_eps) with the principal branch:
///   n_re = sqrt(((n0^2 + d_re) + sqrt((n0^2 + d_re)^2 + d_im^2)) / 2)
///   n_im = d_im / (2 n_re)
RIVolume permittivity_to_ri(const PermittivityVolume& v, double n0);

/// Inverse map: d_re = n_re^2 - n_im^2 - n0^2, d_im = 2 n_re n_im.
PermittivityVolume ri_to_permittivity(const RIVolume& v);

/// Largest entry of the real channel (signed maximum, not magnitude).
double max_value(const std::vector<Slice>& slices);

}  // namespace decaf
