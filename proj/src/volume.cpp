#include "decaf/volume.hpp"

#include <cmath>
#include <limits>

namespace decaf {

PermittivityVolume PermittivityVolume::zeros(const Grid3D& g, bool complex_pair) {
  PermittivityVolume v;
  v.grid = g;
  v.re.assign(g.nz, Slice::Zero(g.nx, g.ny));
  if (complex_pair) v.im.assign(g.nz, Slice::Zero(g.nx, g.ny));
  return v;
}

RIVolume permittivity_to_ri(const PermittivityVolume& v, double n0) {
  RIVolume out;
  out.grid = v.grid;
  out.n0 = n0;
  out.re.resize(v.grid.nz);
  out.im.resize(v.grid.nz);
  const double n0sq = n0 * n0;
  for (int q = 0; q < v.grid.nz; ++q) {
    out.re[q].resize(v.grid.nx, v.grid.ny);
    out.im[q].resize(v.grid.nx, v.grid.ny);
    for (int j = 0; j < v.grid.ny; ++j) {
      for (int i = 0; i < v.grid.nx; ++i) {
        const double a = n0sq + v.re[q](i, j);
        const double b = v.complex_pair() ? v.im[q](i, j) : 0.0;
        const double nre = std::sqrt(0.5 * (a + std::hypot(a, b)));
        out.re[q](i, j) = nre;
        out.im[q](i, j) = nre > 0 ? b / (2.0 * nre) : 0.0;
      }
    }
  }
  return out;
}

PermittivityVolume ri_to_permittivity(const RIVolume& v) {
  PermittivityVolume out;
  out.grid = v.grid;
  out.re.resize(v.grid.nz);
  out.im.resize(v.grid.nz);
  const double n0sq = v.n0 * v.n0;
  for (int q = 0; q < v.grid.nz; ++q) {
    out.re[q] = v.re[q].array().square().matrix() - v.im[q].array().square().matrix();
    out.re[q].array() -= n0sq;
    out.im[q] = 2.0 * v.re[q].cwiseProduct(v.im[q]);
  }
  return out;
}

double max_value(const std::vector<Slice>& slices) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : slices) m = std::max(m, s.maxCoeff());
  return m;
}

}  // namespace decaf
