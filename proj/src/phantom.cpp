#include "decaf/phantom.hpp"

#include <cmath>
#include <random>

#include "decaf/errors.hpp"
#include "decaf/parallel.hpp"

namespace decaf {

namespace {

double shell_profile(double rho, double softness) {
  if (softness <= 0) return rho <= 1.0 ? 1.0 : 0.0;
  if (rho <= 1.0 - softness) return 1.0;
  if (rho >= 1.0) return 0.0;
  const double t = (1.0 - rho) / softness;
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

PermittivityVolume make_phantom(const PhantomSpec& spec) {
  spec.grid.validate();
  for (const auto& c : spec.cells) {
    if (!(c.semi.array() > 0).all()) throw ConfigError("ellipsoid semi-axes must be positive");
    if (!std::isfinite(c.amp_re) || !std::isfinite(c.amp_im))
      throw ConfigError("ellipsoid amplitudes must be finite");
    if (c.softness < 0 || c.softness > 1) throw ConfigError("softness must lie in [0, 1]");
  }
  const Grid3D& g = spec.grid;
  PermittivityVolume vol = PermittivityVolume::zeros(g, true);
  const double cx = (g.nx - 1) / 2.0, cy = (g.ny - 1) / 2.0;
  parallel_for(g.nz, [&](int lo, int hi) {
    for (int q = lo; q < hi; ++q) {
      const double z = g.z0 + q * g.dz;
      for (int j = 0; j < g.ny; ++j) {
        const double y = (j - cy) * g.dy;
        for (int i = 0; i < g.nx; ++i) {
          const double x = (i - cx) * g.dx;
          double re = 0, im = 0;
          for (const auto& c : spec.cells) {
            const Eigen::Vector3d d((x - c.center.x()) / c.semi.x(),
                                    (y - c.center.y()) / c.semi.y(),
                                    (z - c.center.z()) / c.semi.z());
            const double s = shell_profile(d.norm(), c.softness);
            re = std::max(re, c.amp_re * s);
            im = std::max(im, c.amp_im * s);
          }
          vol.re[q](i, j) = re;
          vol.im[q](i, j) = im;
        }
      }
    }
  });
  return vol;
}

std::vector<Ellipsoid> random_cells(const Grid3D& g, int count, std::uint64_t seed,
                                    double amp_re, double amp_im, double softness) {
  g.validate();
  if (count < 0) throw ConfigError("cell count must be nonnegative");
  const double lx = g.nx * g.dx, ly = g.ny * g.dy, lz = g.nz * g.dz;
  const double lat = std::min(lx, ly);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Ellipsoid> cells(static_cast<size_t>(count));
  for (auto& c : cells) {
    c.center.x() = (unit(rng) - 0.5) * 0.7 * lx;
    c.center.y() = (unit(rng) - 0.5) * 0.7 * ly;
    c.center.z() = g.z0 + (0.5 + (unit(rng) - 0.5) * 0.7) * lz;
    c.semi.x() = (0.06 + 0.08 * unit(rng)) * lat;
    c.semi.y() = (0.06 + 0.08 * unit(rng)) * lat;
    c.semi.z() = (0.2 + 0.2 * unit(rng)) * lz;
    c.amp_re = amp_re;
    c.amp_im = amp_im;
    c.softness = softness;
  }
  return cells;
}

void NoiseSpec::validate() const {
  if (std < 0) throw ConfigError("noise std must be nonnegative");
  if (kind == Kind::None && std != 0)
    throw ConfigError("noise std must be zero when noise is disabled");
}

MeasurementSet simulate_measurements(const PermittivityVolume& vol,
                                     const OpticalSetup& setup,
                                     const NoiseSpec& noise, AbsorptionSign sign) {
  noise.validate();
  const TfStack stack = build_tf_stack(vol.grid, setup, sign);
  MeasurementSet m = forward(stack, vol);
  if (noise.kind == NoiseSpec::Kind::Gaussian && noise.std > 0) {
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, noise.std);
    for (auto& img : m.images)
      for (double& v : img.reshaped()) v += gauss(rng);
  }
  return m;
}

const char* to_string(SetupPreset p) {
  switch (p) {
    case SetupPreset::Dense89: return "dense89";
    case SetupPreset::Annular24: return "annular24";
    case SetupPreset::Multiplexed16x6: return "multiplexed16x6";
  }
  return "?";
}

SetupPreset setup_preset_from(const std::string& name) {
  if (name == "dense89") return SetupPreset::Dense89;
  if (name == "annular24") return SetupPreset::Annular24;
  if (name == "multiplexed16x6") return SetupPreset::Multiplexed16x6;
  throw ConfigError("unknown setup preset: " + name);
}

OpticalSetup make_setup(SetupPreset preset, double lambda, double na, double n0,
                        const SetupGeometry& geo) {
  OpticalSetup s;
  s.lambda = lambda;
  s.na = na;
  s.n0 = n0;
  const double k0 = s.k0();
  switch (preset) {
    case SetupPreset::Dense89: {
      if (!(geo.led_pitch_mm > 0) || !(geo.led_distance_mm > 0))
        throw ConfigError("led geometry must be positive");
      // Keep every lattice LED whose lateral wave vector sits inside the
      // pupil (brightfield condition).
      const double t = na / n0;  // maximal incidence sine
      if (!(t < 1)) throw ConfigError("numerical aperture must stay below n0");
      const int reach = static_cast<int>(std::floor(
          geo.led_distance_mm * t / std::sqrt(1 - t * t) / geo.led_pitch_mm));
      for (int i = -reach; i <= reach; ++i) {
        for (int j = -reach; j <= reach; ++j) {
          const double rx = i * geo.led_pitch_mm, ry = j * geo.led_pitch_mm;
          const double r = std::hypot(rx, ry);
          const double sine = r / std::hypot(r, geo.led_distance_mm);
          const double mag = k0 * n0 * sine;
          if (mag > s.pupil_cutoff()) continue;
          IlluminationSource src;
          src.u = r == 0 ? Eigen::Vector2d::Zero()
                         : Eigen::Vector2d(mag * rx / r, mag * ry / r);
          s.sources.push_back(src);
        }
      }
      break;
    }
    case SetupPreset::Annular24: {
      if (geo.azimuths < 1) throw ConfigError("ring needs at least one azimuth");
      const double mag = k0 * n0 * std::sin(geo.incidence_deg * EIGEN_PI / 180.0);
      for (int a = 0; a < geo.azimuths; ++a) {
        const double phi = 2.0 * EIGEN_PI * a / geo.azimuths;
        s.sources.push_back({Eigen::Vector2d(mag * std::cos(phi), mag * std::sin(phi))});
      }
      break;
    }
    case SetupPreset::Multiplexed16x6: {
      if (geo.ring_count < 2 || geo.azimuths < 1 || geo.groups < 1)
        throw ConfigError("multiplexed geometry needs rings, azimuths, and groups");
      const int total = geo.ring_count * geo.azimuths;
      if (total % geo.groups != 0)
        throw ConfigError("sources must divide evenly into groups");
      for (int r = 0; r < geo.ring_count; ++r) {
        const double ring_na = geo.ring_na_min + (geo.ring_na_max - geo.ring_na_min) *
                                                     r / (geo.ring_count - 1);
        const double mag = k0 * ring_na;
        for (int a = 0; a < geo.azimuths; ++a) {
          const double phi = 2.0 * EIGEN_PI * a / geo.azimuths;
          s.sources.push_back({Eigen::Vector2d(mag * std::cos(phi), mag * std::sin(phi))});
        }
      }
      s.groups.assign(static_cast<size_t>(geo.groups), {});
      for (int f = 0; f < total; ++f) s.groups[static_cast<size_t>(f % geo.groups)].push_back(f);
      break;
    }
  }
  s.validate();
  return s;
}

OpticalSetup make_setup(SetupPreset preset) {
  switch (preset) {
    case SetupPreset::Dense89: return make_setup(preset, 0.632, 0.25, 1.0);
    case SetupPreset::Annular24: return make_setup(preset, 0.515, 0.65, 1.0);
    case SetupPreset::Multiplexed16x6: return make_setup(preset, 0.515, 0.65, 1.0);
  }
  throw ConfigError("unknown preset");
}

}  // namespace decaf
