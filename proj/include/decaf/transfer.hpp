#pragma once

#include <vector>

#include "decaf/grid.hpp"
#include "decaf/optics.hpp"
#include "decaf/volume.hpp"

namespace decaf {

/// Sign between the two defocus terms of the absorption transfer function.
/// Difference subtracts them (the published form); Sum adds them.
enum class AbsorptionSign { Difference, Sum };

/// Weak-scattering transfer functions of slice q under one oblique
/// plane-wave source, sampled on the lateral DFT frequency grid (DC at
/// index 0). Slice q defocuses by q*dz relative to the source reference.
///
/// Both functions combine a forward term T1(u) = exp(-j(eta(u-up)-eta_i)
/// *q*dz)/eta(u-up) and a conjugate term T2(u) = exp(+j(eta(u+up)-eta_i)
/// *q*dz)/eta(u+up); the binary pupil zeroes each shifted frequency before
/// eta is evaluated, so evanescent branches never arise (requires NA <= 1).
///
/// phase:      j*(k0^2/2) * [ P(u)*T1(u)  - P(-up)*T2(u) ]
/// absorption:  -(k0^2/2) * [ P(up)*T1(u) -+ P(-up)*T2(u) ]
CSlice phase_tf(const Grid3D& g, const OpticalSetup& s,
                const IlluminationSource& src, int q);
CSlice absorption_tf(const Grid3D& g, const OpticalSetup& s,
                     const IlluminationSource& src, int q,
                     AbsorptionSign sign = AbsorptionSign::Difference);

/// Transfer functions for every (measurement, slice) pair. For multiplexed
/// setups each measurement's function is the sum of its group members'
/// functions, accumulated in listed order.
struct TfStack {
  int nx = 0, ny = 0;
  std::vector<std::vector<CSlice>> ph;  // [measurement][slice]
  std::vector<std::vector<CSlice>> ab;

  [[nodiscard]] int measurements() const { return static_cast<int>(ph.size()); }
  [[nodiscard]] int slices() const {
    return ph.empty() ? 0 : static_cast<int>(ph.front().size());
  }
};

TfStack build_tf_stack(const Grid3D& g, const OpticalSetup& s,
                       AbsorptionSign sign = AbsorptionSign::Difference);

}  // namespace decaf
