#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "decaf/errors.hpp"
#include "decaf/phantom.hpp"

using namespace decaf;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("empty cell lists produce zero volumes") {
  Grid3D g{16, 12, 4, 0.2, 0.2, 0.5, -0.75};
  PhantomSpec spec{g, {}};
  PermittivityVolume v = make_phantom(spec);
  REQUIRE(v.re.size() == 4);
  REQUIRE(v.im.size() == 4);
  for (int q = 0; q < 4; ++q) {
    CHECK(v.re[q].cwiseAbs().maxCoeff() == 0.0);
    CHECK(v.im[q].cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(v.grid.z0 == -0.75);
}

TEST_CASE("ellipsoid profile: plateau, shell, and emptiness") {
  // One cell centered on the grid; lateral coordinates are grid-centered
  // and the axial coordinate starts at z0.
  Grid3D g{33, 33, 9, 0.1, 0.1, 0.25, -1.0};
  Ellipsoid c;
  c.center = Eigen::Vector3d(0.0, 0.0, 0.0);  // slice index 4 (z0 + 4*dz = 0)
  c.semi = Eigen::Vector3d(1.0, 0.8, 0.9);
  c.amp_re = 0.155625;
  c.amp_im = 0.01;
  c.softness = 0.25;
  PermittivityVolume v = make_phantom({g, {c}});

  // Center voxel: rho = 0 -> exactly amp.
  CHECK(v.re[4](16, 16) == c.amp_re);
  CHECK(v.im[4](16, 16) == c.amp_im);
  // Inside the plateau (rho <= 1 - softness).
  CHECK(v.re[4](20, 16) == c.amp_re);  // rho = 0.4/1.0
  // In the shell: smoothstep of t = (1 - rho)/softness.
  {
    const double rho = 0.8 * 1.0;  // 8 voxels out on x: 0.8/1.0
    const double t = (1.0 - rho) / c.softness;
    const double expect = c.amp_re * t * t * (3.0 - 2.0 * t);
    CHECK(v.re[4](24, 16) == doctest::Approx(expect).epsilon(1e-12));
  }
  // Outside the unit radius: zero.
  CHECK(v.re[4](27, 16) == 0.0);
  // Off the central slice the ellipsoid shrinks.
  CHECK(v.re[0](16, 16) == 0.0);  // z = -1 -> rho > 1
  CHECK(v.re[3](16, 16) > 0.0);
}

TEST_CASE("overlapping cells combine by elementwise maximum") {
  Grid3D g{21, 21, 3, 0.2, 0.2, 0.5, -0.5};
  Ellipsoid a;
  a.center = Eigen::Vector3d(-0.2, 0.0, 0.0);
  a.semi = Eigen::Vector3d(1.2, 1.2, 1.2);
  a.amp_re = 0.1;
  a.softness = 0.0;
  Ellipsoid b = a;
  b.center = Eigen::Vector3d(0.2, 0.0, 0.0);
  b.amp_re = 0.07;
  PermittivityVolume v = make_phantom({g, {a, b}});
  // Overlap region holds max(0.1, 0.07), never the sum.
  CHECK(v.re[1](10, 10) == 0.1);
  CHECK(v.re[1].maxCoeff() == 0.1);
  // A point covered only by the weaker cell keeps its amplitude.
  CHECK(v.re[1](16, 10) == 0.07);
}

TEST_CASE("ellipsoid volume matches its closed form") {
  Grid3D g{64, 64, 32, 0.1, 0.1, 0.12, 0.0};
  Ellipsoid c;
  c.center = Eigen::Vector3d(0.0, 0.0, 32 * 0.12 / 2.0);
  c.semi = Eigen::Vector3d(2.2, 1.8, 1.1);
  c.amp_re = 1.0;
  c.softness = 0.02;
  PermittivityVolume v = make_phantom({g, {c}});
  double total = 0;
  for (const auto& s : v.re) total += s.sum();
  total *= g.dx * g.dy * g.dz;
  // The smooth shell trims the ball to roughly radius 1 - softness/2.
  const double shrink = std::pow(1.0 - c.softness / 2.0, 3.0);
  const double expect =
      4.0 / 3.0 * kPi * c.semi.x() * c.semi.y() * c.semi.z() * shrink;
  CHECK(total == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("phantom validation") {
  Grid3D g{8, 8, 2, 0.2, 0.2, 0.5, 0.0};
  Ellipsoid c;
  c.semi = Eigen::Vector3d(0.0, 1.0, 1.0);
  CHECK_THROWS_AS(make_phantom({g, {c}}), ConfigError);
  c.semi = Eigen::Vector3d(1.0, 1.0, 1.0);
  c.softness = 1.5;
  CHECK_THROWS_AS(make_phantom({g, {c}}), ConfigError);
  c.softness = 0.25;
  c.amp_re = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_phantom({g, {c}}), ConfigError);
}

TEST_CASE("random cell soup: seeded, bounded, parameter-stamped") {
  Grid3D g{64, 48, 8, 0.1625, 0.1625, 0.5, -1.75};
  auto cells = random_cells(g, 10, 11, 0.155625, 0.004, 0.3);
  REQUIRE(cells.size() == 10);
  const double lx = g.nx * g.dx, ly = g.ny * g.dy, lz = g.nz * g.dz;
  const double lat = std::min(lx, ly);
  for (const auto& c : cells) {
    CHECK(std::abs(c.center.x()) <= 0.35 * lx);
    CHECK(std::abs(c.center.y()) <= 0.35 * ly);
    CHECK(c.center.z() >= g.z0 + 0.15 * lz);
    CHECK(c.center.z() <= g.z0 + 0.85 * lz);
    CHECK(c.semi.x() >= 0.06 * lat);
    CHECK(c.semi.x() <= 0.14 * lat);
    CHECK(c.semi.y() >= 0.06 * lat);
    CHECK(c.semi.y() <= 0.14 * lat);
    CHECK(c.semi.z() >= 0.2 * lz);
    CHECK(c.semi.z() <= 0.4 * lz);
    CHECK(c.amp_re == 0.155625);
    CHECK(c.amp_im == 0.004);
    CHECK(c.softness == 0.3);
  }
  auto again = random_cells(g, 10, 11, 0.155625, 0.004, 0.3);
  for (size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].center == again[i].center);
    CHECK(cells[i].semi == again[i].semi);
  }
  auto other = random_cells(g, 10, 12, 0.155625, 0.004, 0.3);
  CHECK(cells[0].center != other[0].center);
  CHECK_THROWS_AS(random_cells(g, -1, 0, 0.1, 0.0, 0.25), ConfigError);
}

TEST_CASE("dense LED lattice preset") {
  OpticalSetup s = make_setup(SetupPreset::Dense89);
  CHECK(s.lambda == 0.632);
  CHECK(s.na == 0.25);
  CHECK(s.sources.size() == 89);
  CHECK_FALSE(s.multiplexed());
  CHECK(s.measurement_count() == 89);
  // Brightfield lattice: every source sits inside the pupil, and the
  // lattice is centro-symmetric (u and -u both present).
  for (const auto& src : s.sources) {
    CHECK(src.u.norm() <= s.pupil_cutoff());
    bool found = false;
    for (const auto& other : s.sources)
      if ((other.u + src.u).norm() < 1e-12) found = true;
    CHECK(found);
  }
  // One axial source.
  int axial = 0;
  for (const auto& src : s.sources)
    if (src.u.norm() == 0.0) ++axial;
  CHECK(axial == 1);
}

TEST_CASE("annular ring preset") {
  OpticalSetup s = make_setup(SetupPreset::Annular24);
  CHECK(s.lambda == 0.515);
  CHECK(s.na == 0.65);
  REQUIRE(s.sources.size() == 24);
  const double mag = s.k0() * s.n0 * std::sin(40.0 * kPi / 180.0);
  CHECK(mag < s.pupil_cutoff());  // brightfield ring
  std::vector<double> angles;
  for (const auto& src : s.sources) {
    CHECK(src.u.norm() == doctest::Approx(mag).epsilon(1e-12));
    angles.push_back(std::atan2(src.u.y(), src.u.x()));
  }
  // Azimuths are evenly spaced at 15 degrees.
  std::sort(angles.begin(), angles.end());
  for (size_t i = 1; i < angles.size(); ++i)
    CHECK(angles[i] - angles[i - 1] ==
          doctest::Approx(2.0 * kPi / 24).epsilon(1e-9));

  // Custom geometry: fewer azimuths, shallower ring.
  SetupGeometry geo;
  geo.azimuths = 6;
  geo.incidence_deg = 20.0;
  OpticalSetup c = make_setup(SetupPreset::Annular24, 0.515, 0.65, 1.0, geo);
  CHECK(c.sources.size() == 6);
  CHECK(c.sources[0].u.norm() ==
        doctest::Approx(c.k0() * std::sin(20.0 * kPi / 180.0)).epsilon(1e-12));
}

TEST_CASE("multiplexed ring preset: round-robin disjoint groups") {
  OpticalSetup s = make_setup(SetupPreset::Multiplexed16x6);
  REQUIRE(s.sources.size() == 96);
  REQUIRE(s.groups.size() == 16);
  CHECK(s.multiplexed());
  CHECK(s.measurement_count() == 16);

  std::set<int> seen;
  for (size_t gi = 0; gi < s.groups.size(); ++gi) {
    REQUIRE(s.groups[gi].size() == 6);
    for (int f : s.groups[gi]) {
      CHECK(f % 16 == static_cast<int>(gi));  // round-robin assignment
      CHECK(seen.insert(f).second);           // disjoint
    }
  }
  CHECK(seen.size() == 96);

  // Four rings of 24 sources; ring radii interpolate NA 0.3 .. 0.575.
  for (int r = 0; r < 4; ++r) {
    const double ring_na = 0.3 + (0.575 - 0.3) * r / 3.0;
    for (int a = 0; a < 24; ++a) {
      const auto& u = s.sources[static_cast<size_t>(r * 24 + a)].u;
      CHECK(u.norm() == doctest::Approx(s.k0() * ring_na).epsilon(1e-12));
    }
  }

  // Uneven splits are rejected.
  SetupGeometry geo;
  geo.azimuths = 25;
  CHECK_THROWS_AS(make_setup(SetupPreset::Multiplexed16x6, 0.515, 0.65, 1.0, geo),
                  ConfigError);
}

TEST_CASE("preset names round trip") {
  CHECK(setup_preset_from("dense89") == SetupPreset::Dense89);
  CHECK(setup_preset_from("annular24") == SetupPreset::Annular24);
  CHECK(setup_preset_from("multiplexed16x6") == SetupPreset::Multiplexed16x6);
  CHECK_THROWS_AS(setup_preset_from("ringlight"), ConfigError);
  CHECK(std::string(to_string(SetupPreset::Dense89)) == "dense89");
  CHECK(std::string(to_string(SetupPreset::Annular24)) == "annular24");
  CHECK(std::string(to_string(SetupPreset::Multiplexed16x6)) == "multiplexed16x6");
}

TEST_CASE("noiseless simulation equals the forward model") {
  Grid3D g{32, 32, 4, 0.1625, 0.1625, 0.5, -0.75};
  SetupGeometry geo;
  geo.azimuths = 8;
  OpticalSetup s = make_setup(SetupPreset::Annular24, 0.515, 0.65, 1.0, geo);
  PermittivityVolume v = make_phantom({g, random_cells(g, 4, 7, 0.1, 0.01)});

  NoiseSpec none;
  for (auto sign : {AbsorptionSign::Difference, AbsorptionSign::Sum}) {
    MeasurementSet a = simulate_measurements(v, s, none, sign);
    MeasurementSet b = forward(build_tf_stack(g, s, sign), v);
    REQUIRE(a.count() == b.count());
    for (int p = 0; p < a.count(); ++p)
      CHECK((a.images[p] - b.images[p]).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("measurement noise: seeded gaussian of the requested strength") {
  Grid3D g{32, 32, 2, 0.1625, 0.1625, 0.5, 0.0};
  SetupGeometry geo;
  geo.azimuths = 8;
  OpticalSetup s = make_setup(SetupPreset::Annular24, 0.515, 0.65, 1.0, geo);
  PermittivityVolume v = make_phantom({g, random_cells(g, 3, 5, 0.1, 0.0)});

  NoiseSpec clean;
  NoiseSpec noisy;
  noisy.kind = NoiseSpec::Kind::Gaussian;
  noisy.std = 0.05;
  noisy.seed = 123;

  MeasurementSet y0 = simulate_measurements(v, s, clean);
  MeasurementSet y1 = simulate_measurements(v, s, noisy);
  double acc = 0, mean = 0;
  long n = 0;
  for (int p = 0; p < y0.count(); ++p) {
    Slice d = y1.images[p] - y0.images[p];
    mean += d.sum();
    acc += d.squaredNorm();
    n += d.size();
  }
  mean /= n;
  double sd = std::sqrt(acc / n - mean * mean);
  CHECK(std::abs(mean) < 2e-3);
  CHECK(sd == doctest::Approx(0.05).epsilon(0.03));

  // Deterministic in the seed; a new seed reshuffles the noise.
  MeasurementSet y2 = simulate_measurements(v, s, noisy);
  for (int p = 0; p < y1.count(); ++p)
    CHECK((y1.images[p] - y2.images[p]).cwiseAbs().maxCoeff() == 0.0);
  noisy.seed = 124;
  MeasurementSet y3 = simulate_measurements(v, s, noisy);
  CHECK((y1.images[0] - y3.images[0]).cwiseAbs().maxCoeff() > 0.0);

  // The documented draw order: one generator, image by image, column-major
  // within an image.
  std::mt19937_64 rng(123);
  std::normal_distribution<double> gauss(0.0, 0.05);
  bool order_ok = true;
  for (int p = 0; p < y0.count() && order_ok; ++p) {
    Slice d = y1.images[p] - y0.images[p];
    // (y + g) - y only recovers g up to rounding; a draw-order mismatch
    // would instead leave residuals on the scale of the noise itself.
    for (int j = 0; j < d.cols() && order_ok; ++j)
      for (int i = 0; i < d.rows() && order_ok; ++i)
        order_ok = std::abs(d(i, j) - gauss(rng)) < 1e-12;
  }
  CHECK(order_ok);

  NoiseSpec bad;
  bad.std = 0.1;  // std without enabling noise
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.kind = NoiseSpec::Kind::Gaussian;
  bad.std = -0.1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
