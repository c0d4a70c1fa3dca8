#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "decaf/forward.hpp"
#include "decaf/grid.hpp"
#include "decaf/optics.hpp"
#include "decaf/transfer.hpp"
#include "decaf/volume.hpp"

namespace decaf {

/// Smooth-edged ellipsoid in physical coordinates (micrometers). The profile
/// is 1 inside the normalized radius 1 - softness, 0 outside radius 1, and a
/// smoothstep across the shell in between.
struct Ellipsoid {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d semi = Eigen::Vector3d::Ones();
  double amp_re = 0;
  double amp_im = 0;
  double softness = 0.25;  // shell thickness as a fraction of the radius
};

struct PhantomSpec {
  Grid3D grid;
  std::vector<Ellipsoid> cells;
};

/// Voxelized phantom; overlapping cells combine by elementwise max per
/// channel. Lateral coordinates are centered on the grid, the axial
/// coordinate starts at z0. An empty cell list gives a zero volume.
PermittivityVolume make_phantom(const PhantomSpec& spec);

/// Seeded ellipsoid soup within the central 70% of the grid extent; one
/// generator drives all draws (per cell: center xyz, then semi-axes xyz).
std::vector<Ellipsoid> random_cells(const Grid3D& g, int count, std::uint64_t seed,
                                    double amp_re, double amp_im,
                                    double softness = 0.25);

struct NoiseSpec {
  enum class Kind { None, Gaussian };
  Kind kind = Kind::None;
  double std = 0;
  std::uint64_t seed = 0;

  void validate() const;  // std >= 0
};

/// forward(build_tf_stack(setup), vol) plus seeded additive white Gaussian
/// noise (drawn image by image, fastest index first).
MeasurementSet simulate_measurements(const PermittivityVolume& vol,
                                     const OpticalSetup& setup,
                                     const NoiseSpec& noise,
                                     AbsorptionSign sign = AbsorptionSign::Difference);

enum class SetupPreset { Dense89, Annular24, Multiplexed16x6 };

const char* to_string(SetupPreset p);
SetupPreset setup_preset_from(const std::string& name);

struct SetupGeometry {
  // Square LED lattice (dense preset): every lattice source whose lateral
  // wave vector fits inside the pupil is included.
  double led_pitch_mm = 4.0;
  double led_distance_mm = 79.0;
  // Ring illumination (annular preset).
  double incidence_deg = 40.0;
  int azimuths = 24;
  // Concentric rings (multiplexed preset), grouped round-robin into
  // `groups` disjoint patterns.
  int ring_count = 4;
  double ring_na_min = 0.3;
  double ring_na_max = 0.575;
  int groups = 16;
};

/// Generates illumination wave vectors from the physical geometry:
///  - Dense89 (defaults lambda=0.632, NA=0.25, n0=1): 8mm-neighbourhood LED
///    board at led_distance; |u| = k0*n0*sin(theta_led).
///  - Annular24 (defaults lambda=0.515, NA=0.65, n0=1): `azimuths` sources
///    at |u| = k0*n0*sin(incidence).
///  - Multiplexed16x6: ring_count rings of `azimuths` sources spanning
///    ring_na_min..ring_na_max, flattened index f = ring*azimuths + azimuth,
///    group f % groups.
OpticalSetup make_setup(SetupPreset preset, double lambda, double na, double n0,
                        const SetupGeometry& geo = {});

/// Preset with its default wavelength/NA/background index.
OpticalSetup make_setup(SetupPreset preset);

}  // namespace decaf
