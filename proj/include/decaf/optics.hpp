#pragma once

#include <Eigen/Core>
#include <vector>

#include "decaf/errors.hpp"

namespace decaf {

/// Plane-wave illumination, identified by its lateral wavevector (rad/um).
struct IlluminationSource {
  Eigen::Vector2d u{0, 0};
};

/// Imaging geometry: objective NA, vacuum wavelength (um), medium index n0,
/// and the illumination list. A non-empty `groups` vector marks a
/// multiplexed acquisition: each group of source indices lights up together
/// and yields one measurement. Otherwise each source yields one measurement.
struct OpticalSetup {
  double na = 0;
  double lambda = 0;
  double n0 = 1.0;
  std::vector<IlluminationSource> sources;
  std::vector<std::vector<int>> groups;

  [[nodiscard]] double k0() const { return 2.0 * EIGEN_PI / lambda; }
  [[nodiscard]] double pupil_cutoff() const { return na * k0(); }
  [[nodiscard]] bool multiplexed() const { return !groups.empty(); }
  [[nodiscard]] int measurement_count() const {
    return multiplexed() ? static_cast<int>(groups.size())
                         : static_cast<int>(sources.size());
  }
  void validate() const;
};

/// Binary pupil: 1 when |u| <= NA*2*pi/lambda, else 0.
inline double pupil(const OpticalSetup& s, const Eigen::Vector2d& u) {
  return u.norm() <= s.pupil_cutoff() ? 1.0 : 0.0;
}

/// Axial wavevector sqrt(k0^2 - |u|^2); |u| must not exceed k0
/// (the propagating domain).
double axial_wavevector(double k0, const Eigen::Vector2d& u);

/// Band limits of the acquisition, in cycles per micrometre.
struct ResolutionLimits {
  double lateral = 0;  // 4*NA/lambda
  double axial = 0;    // (2*n0 - 2*sqrt(n0^2 - NA^2))/lambda
};
ResolutionLimits resolution_limits(const OpticalSetup& s);

}  // namespace decaf
