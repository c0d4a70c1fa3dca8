#include "decaf/optics.hpp"

#include <cmath>
#include <set>

namespace decaf {

void OpticalSetup::validate() const {
  if (!(lambda > 0)) throw ConfigError("wavelength must be positive");
  if (!(na > 0) || !(na < n0))
    throw ConfigError("numerical aperture must satisfy 0 < NA < n0");
  if (sources.empty()) throw ConfigError("setup needs at least one source");
  for (const auto& s : sources)
    if (s.u.norm() > k0())
      throw ConfigError("illumination wavevector exceeds k0 (evanescent)");
  if (!groups.empty()) {
    std::set<int> seen;
    for (const auto& g : groups) {
      if (g.empty()) throw ConfigError("empty multiplex group");
      for (int idx : g) {
        if (idx < 0 || idx >= static_cast<int>(sources.size()))
          throw ConfigError("multiplex group references a missing source");
        if (!seen.insert(idx).second)
          throw ConfigError("multiplex groups must be disjoint");
      }
    }
  }
}

double axial_wavevector(double k0, const Eigen::Vector2d& u) {
  const double r2 = k0 * k0 - u.squaredNorm();
  if (r2 < 0) throw ConfigError("axial wavevector of an evanescent frequency");
  return std::sqrt(r2);
}

ResolutionLimits resolution_limits(const OpticalSetup& s) {
  s.validate();
  ResolutionLimits r;
  r.lateral = 4.0 * s.na / s.lambda;
  r.axial = (2.0 * s.n0 - 2.0 * std::sqrt(s.n0 * s.n0 - s.na * s.na)) / s.lambda;
  return r;
}

}  // namespace decaf
