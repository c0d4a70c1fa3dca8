#include "decaf/transfer.hpp"

#include <cmath>
#include <complex>

#include "decaf/fft2.hpp"
#include "decaf/parallel.hpp"

namespace decaf {

namespace {

constexpr std::complex<double> kJ{0.0, 1.0};

struct TfPair {
  CSlice ph, ab;
};

// One pass fills both transfer functions; they share the defocus terms.
TfPair build_pair(const Grid3D& g, const OpticalSetup& s,
                  const IlluminationSource& src, int q, AbsorptionSign sign) {
  const double k0 = s.k0();
  const double cutoff = s.pupil_cutoff();
  const double zq = q * g.dz;
  const double eta_i = axial_wavevector(k0, src.u);
  const double p_src = src.u.norm() <= cutoff ? 1.0 : 0.0;    // P(up) = P(-up)
  const Eigen::VectorXd ux = frequency_axis(g.nx, g.dx);
  const Eigen::VectorXd uy = frequency_axis(g.ny, g.dy);

  TfPair out{CSlice(g.nx, g.ny), CSlice(g.nx, g.ny)};
  const double amp = 0.5 * k0 * k0;
  const double term_sign = sign == AbsorptionSign::Difference ? -1.0 : 1.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Eigen::Vector2d u(ux[i], uy[j]);
      std::complex<double> t1 = 0, t2 = 0;
      const Eigen::Vector2d um = u - src.u;
      if (um.norm() <= cutoff) {
        const double eta = axial_wavevector(k0, um);
        t1 = std::exp(-kJ * ((eta - eta_i) * zq)) / eta;
      }
      const Eigen::Vector2d up = u + src.u;
      if (up.norm() <= cutoff) {
        const double eta = axial_wavevector(k0, up);
        t2 = std::exp(kJ * ((eta - eta_i) * zq)) / eta;
      }
      const double p_u = u.norm() <= cutoff ? 1.0 : 0.0;
      out.ph(i, j) = kJ * amp * (p_u * t1 - p_src * t2);
      out.ab(i, j) = -amp * (p_src * t1 + term_sign * p_src * t2);
    }
  }
  return out;
}

}  // namespace

CSlice phase_tf(const Grid3D& g, const OpticalSetup& s,
                const IlluminationSource& src, int q) {
  return build_pair(g, s, src, q, AbsorptionSign::Difference).ph;
}

CSlice absorption_tf(const Grid3D& g, const OpticalSetup& s,
                     const IlluminationSource& src, int q, AbsorptionSign sign) {
  return build_pair(g, s, src, q, sign).ab;
}

TfStack build_tf_stack(const Grid3D& g, const OpticalSetup& s,
                       AbsorptionSign sign) {
  g.validate();
  s.validate();
  TfStack stack;
  stack.nx = g.nx;
  stack.ny = g.ny;
  const int p_count = s.measurement_count();
  stack.ph.assign(p_count, std::vector<CSlice>(g.nz));
  stack.ab.assign(p_count, std::vector<CSlice>(g.nz));
  parallel_for(p_count, [&](int begin, int end) {
    for (int p = begin; p < end; ++p) {
      for (int q = 0; q < g.nz; ++q) {
        if (!s.multiplexed()) {
          auto pair = build_pair(g, s, s.sources[p], q, sign);
          stack.ph[p][q] = std::move(pair.ph);
          stack.ab[p][q] = std::move(pair.ab);
        } else {
          CSlice ph = CSlice::Zero(g.nx, g.ny);
          CSlice ab = CSlice::Zero(g.nx, g.ny);
          for (int idx : s.groups[p]) {
            auto pair = build_pair(g, s, s.sources[idx], q, sign);
            ph += pair.ph;
            ab += pair.ab;
          }
          stack.ph[p][q] = std::move(ph);
          stack.ab[p][q] = std::move(ab);
        }
      }
    }
  });
  return stack;
}

}  // namespace decaf
