#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "decaf/errors.hpp"
#include "decaf/fft2.hpp"
#include "decaf/forward.hpp"
#include "decaf/optics.hpp"
#include "decaf/tikhonov.hpp"
#include "decaf/transfer.hpp"
#include "decaf/volume.hpp"

using namespace decaf;
using cd = std::complex<double>;

namespace {

const double kPi = std::acos(-1.0);

OpticalSetup ring_setup(int azimuths) {
  OpticalSetup s;
  s.na = 0.65;
  s.lambda = 0.515;
  s.n0 = 1.0;
  const double mag = s.n0 * std::sin(40.0 * kPi / 180.0) * s.k0();
  for (int a = 0; a < azimuths; ++a) {
    const double phi = 2.0 * kPi * a / azimuths;
    s.sources.push_back({Eigen::Vector2d(mag * std::cos(phi), mag * std::sin(phi))});
  }
  return s;
}

MeasurementSet random_measurements(int count, int nx, int ny, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MeasurementSet m = MeasurementSet::zeros(count, nx, ny);
  for (auto& img : m.images)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) img(i, j) = d(rng);
  return m;
}

PermittivityVolume random_volume(const Grid3D& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  PermittivityVolume v = PermittivityVolume::zeros(g, true);
  for (auto* ch : {&v.re, &v.im})
    for (auto& s : *ch)
      for (int j = 0; j < s.cols(); ++j)
        for (int i = 0; i < s.rows(); ++i) s(i, j) = d(rng);
  return v;
}

double norm(const PermittivityVolume& v) {
  double acc = 0;
  for (const auto& s : v.re) acc += s.squaredNorm();
  for (const auto& s : v.im) acc += s.squaredNorm();
  return std::sqrt(acc);
}

double norm(const MeasurementSet& m) {
  double acc = 0;
  for (const auto& img : m.images) acc += img.squaredNorm();
  return std::sqrt(acc);
}

MeasurementSet subtract(const MeasurementSet& a, const MeasurementSet& b) {
  MeasurementSet out = a;
  for (int p = 0; p < out.count(); ++p) out.images[p] -= b.images[p];
  return out;
}

double objective(const TfStack& stack, const Grid3D& g, const MeasurementSet& y,
                 const PermittivityVolume& x, double tau) {
  MeasurementSet r = subtract(forward(stack, x), y);
  double n = norm(r);
  double xn = norm(x);
  return n * n + tau * xn * xn;
}

}  // namespace

TEST_CASE("zero measurements give the zero volume") {
  Grid3D g{16, 16, 2, 0.2, 0.2, 0.5, -0.25};
  OpticalSetup s = ring_setup(8);
  TfStack stack = build_tf_stack(g, s);
  MeasurementSet y = MeasurementSet::zeros(8, 16, 16);
  for (auto solver : {TikhonovConfig::Solver::Direct, TikhonovConfig::Solver::Cg}) {
    TikhonovConfig cfg;
    cfg.tau = 1e-4;
    cfg.solver = solver;
    PermittivityVolume x = tikhonov_reconstruct(stack, g, y, cfg);
    CHECK(norm(x) == 0.0);
    CHECK(x.complex_pair());
  }
}

TEST_CASE("stronger regularization shrinks the solution and loosens the fit") {
  Grid3D g{16, 16, 2, 0.2, 0.2, 0.5, -0.25};
  OpticalSetup s = ring_setup(8);
  TfStack stack = build_tf_stack(g, s);
  MeasurementSet y = forward(stack, random_volume(g, 3));

  double prev_norm = std::numeric_limits<double>::infinity();
  double prev_resid = -1.0;
  for (double tau : {1e-6, 1e-4, 1e-2, 1.0, 1e2}) {
    TikhonovConfig cfg;
    cfg.tau = tau;
    PermittivityVolume x = tikhonov_reconstruct(stack, g, y, cfg);
    double xn = norm(x);
    double rn = norm(subtract(forward(stack, x), y));
    CAPTURE(tau);
    CHECK(xn <= prev_norm + 1e-12);
    CHECK(rn >= prev_resid - 1e-12);
    prev_norm = xn;
    prev_resid = rn;
  }
}

TEST_CASE("direct and conjugate-gradient solvers agree") {
  Grid3D g{12, 10, 3, 0.2, 0.25, 0.5, -0.5};
  OpticalSetup s = ring_setup(6);
  TfStack stack = build_tf_stack(g, s);
  MeasurementSet y = random_measurements(6, 12, 10, 17);

  TikhonovConfig direct;
  direct.tau = 1e-3;
  TikhonovConfig cg = direct;
  cg.solver = TikhonovConfig::Solver::Cg;
  cg.cg_tol = 1e-12;
  cg.cg_maxiter = 2000;

  PermittivityVolume xd = tikhonov_reconstruct(stack, g, y, direct);
  PermittivityVolume xc = tikhonov_reconstruct(stack, g, y, cg);
  PermittivityVolume diff = xd;
  for (size_t q = 0; q < diff.re.size(); ++q) {
    diff.re[q] -= xc.re[q];
    diff.im[q] -= xc.im[q];
  }
  CHECK(norm(diff) / norm(xd) < 1e-6);
}

TEST_CASE("reconstruction is linear in the data") {
  Grid3D g{12, 12, 2, 0.2, 0.2, 0.5, 0.0};
  OpticalSetup s = ring_setup(6);
  TfStack stack = build_tf_stack(g, s);
  MeasurementSet y1 = random_measurements(6, 12, 12, 5);
  MeasurementSet y2 = random_measurements(6, 12, 12, 6);
  MeasurementSet ysum = y1;
  for (int p = 0; p < ysum.count(); ++p) ysum.images[p] += y2.images[p];

  TikhonovConfig cfg;
  cfg.tau = 1e-2;
  PermittivityVolume xa = tikhonov_reconstruct(stack, g, y1, cfg);
  PermittivityVolume xb = tikhonov_reconstruct(stack, g, y2, cfg);
  PermittivityVolume xs = tikhonov_reconstruct(stack, g, ysum, cfg);
  PermittivityVolume lin = xa;
  for (size_t q = 0; q < lin.re.size(); ++q) {
    lin.re[q] += xb.re[q];
    lin.im[q] += xb.im[q];
    lin.re[q] -= xs.re[q];
    lin.im[q] -= xs.im[q];
  }
  CHECK(norm(lin) / norm(xs) < 1e-10);
}

TEST_CASE("solution satisfies the normal equations") {
  Grid3D g{14, 14, 2, 0.2, 0.2, 0.5, -0.25};
  OpticalSetup s = ring_setup(8);
  TfStack stack = build_tf_stack(g, s);
  MeasurementSet y = random_measurements(8, 14, 14, 23);

  for (auto solver : {TikhonovConfig::Solver::Direct, TikhonovConfig::Solver::Cg}) {
    TikhonovConfig cfg;
    cfg.tau = 1e-3;
    cfg.solver = solver;
    cfg.cg_tol = 1e-12;
    cfg.cg_maxiter = 2000;
    PermittivityVolume x = tikhonov_reconstruct(stack, g, y, cfg);

    // g = A^T(Ax - y) + tau*x must vanish against the scale of A^T y.
    PermittivityVolume grad = adjoint(stack, subtract(forward(stack, x), y), g);
    for (size_t q = 0; q < grad.re.size(); ++q) {
      grad.re[q] += cfg.tau * x.re[q];
      grad.im[q] += cfg.tau * x.im[q];
    }
    double scale = norm(adjoint(stack, y, g));
    CAPTURE(to_string(solver));
    CHECK(norm(grad) / scale < 1e-8);
  }
}

TEST_CASE("perturbing the solution never lowers the objective") {
  Grid3D g{10, 10, 2, 0.2, 0.2, 0.5, 0.0};
  OpticalSetup s = ring_setup(6);
  TfStack stack = build_tf_stack(g, s);
  MeasurementSet y = random_measurements(6, 10, 10, 31);
  TikhonovConfig cfg;
  cfg.tau = 1e-2;
  PermittivityVolume x = tikhonov_reconstruct(stack, g, y, cfg);
  const double j0 = objective(stack, g, y, x, cfg.tau);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (double scale : {1e-3, 1e-2, 1e-1}) {
    PermittivityVolume probe = x;
    for (auto* ch : {&probe.re, &probe.im})
      for (auto& sl : *ch)
        for (int j = 0; j < sl.cols(); ++j)
          for (int i = 0; i < sl.rows(); ++i) sl(i, j) += scale * d(rng);
    CHECK(objective(stack, g, y, probe, cfg.tau) >= j0);
  }
}

TEST_CASE("single-slice band-limited phantom is recovered almost exactly") {
  // Build a phantom supported on the well-conditioned part of the spectrum:
  // fold the transfer functions into their Hermitian-symmetrized forms
  // G(u) = (H(u) + conj(H(-u)))/2, form the per-frequency normal matrix,
  // and keep only frequencies whose smallest eigenvalue is solidly above
  // the regularization floor.
  Grid3D g{24, 24, 1, 0.2, 0.2, 0.5, 0.0};
  OpticalSetup s = ring_setup(12);
  // The summed defocus sign keeps both channels observable, so the full
  // two-channel recovery statement is meaningful.
  TfStack stack = build_tf_stack(g, s, AbsorptionSign::Sum);

  // Smooth random blob to start from.
  Slice blob = Slice::Zero(24, 24);
  for (int j = 0; j < 24; ++j)
    for (int i = 0; i < 24; ++i) {
      double dx1 = (i - 9.0) / 4.0, dy1 = (j - 13.0) / 5.0;
      double dx2 = (i - 16.0) / 3.5, dy2 = (j - 8.0) / 3.0;
      blob(i, j) = 0.1 * std::exp(-dx1 * dx1 - dy1 * dy1) +
                   0.07 * std::exp(-dx2 * dx2 - dy2 * dy2);
    }
  CSlice spec_re = fft2(blob);
  CSlice spec_im = fft2(Slice(0.5 * blob));

  // Mask out weakly-seen frequencies (and enforce conjugate symmetry of
  // the mask by construction: the eigenvalues at u and -u coincide).
  for (int j = 0; j < 24; ++j)
    for (int i = 0; i < 24; ++i) {
      int mi = (24 - i) % 24, mj = (24 - j) % 24;
      Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
      for (int p = 0; p < stack.measurements(); ++p) {
        cd gph = 0.5 * (stack.ph[p][0](i, j) + std::conj(stack.ph[p][0](mi, mj)));
        cd gab = 0.5 * (stack.ab[p][0](i, j) + std::conj(stack.ab[p][0](mi, mj)));
        Eigen::Vector2cd row(gph, gab);
        m += row * row.adjoint();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(m);
      if (eig.eigenvalues().minCoeff() < 1.0) {
        spec_re(i, j) = 0;
        spec_im(i, j) = 0;
      }
    }
  PermittivityVolume phantom = PermittivityVolume::zeros(g, true);
  phantom.re[0] = ifft2(spec_re).real();
  phantom.im[0] = ifft2(spec_im).real();
  REQUIRE(norm(phantom) > 1e-3);

  MeasurementSet y = forward(stack, phantom);
  TikhonovConfig cfg;
  cfg.tau = 1e-8;
  PermittivityVolume x = tikhonov_reconstruct(stack, g, y, cfg);
  PermittivityVolume err = x;
  err.re[0] -= phantom.re[0];
  err.im[0] -= phantom.im[0];
  CHECK(norm(err) / norm(phantom) < 1e-3);
}

TEST_CASE("configuration validation and solver names") {
  TikhonovConfig cfg;
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tau = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tau = 1e-3;
  CHECK_NOTHROW(cfg.validate());

  CHECK(tikhonov_solver_from("direct") == TikhonovConfig::Solver::Direct);
  CHECK(tikhonov_solver_from("cg") == TikhonovConfig::Solver::Cg);
  CHECK(tikhonov_solver_from("conjugate-gradient") == TikhonovConfig::Solver::Cg);
  CHECK_THROWS_AS(tikhonov_solver_from("lsqr"), ConfigError);
  CHECK(std::string(to_string(TikhonovConfig::Solver::Direct)) == "direct");
  CHECK(std::string(to_string(TikhonovConfig::Solver::Cg)) == "conjugate-gradient");
}
