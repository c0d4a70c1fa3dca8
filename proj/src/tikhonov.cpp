#include "decaf/tikhonov.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>

#include "decaf/errors.hpp"
#include "decaf/fft2.hpp"
#include "decaf/parallel.hpp"

namespace decaf {

void TikhonovConfig::validate() const {
  if (!(tau > 0)) throw ConfigError("tikhonov weight must be positive");
  if (!(cg_tol > 0) || cg_maxiter < 1) throw ConfigError("cg parameters must be positive");
}

const char* to_string(TikhonovConfig::Solver s) {
  return s == TikhonovConfig::Solver::Direct ? "direct" : "conjugate-gradient";
}

TikhonovConfig::Solver tikhonov_solver_from(const std::string& name) {
  if (name == "direct") return TikhonovConfig::Solver::Direct;
  if (name == "conjugate-gradient" || name == "cg") return TikhonovConfig::Solver::Cg;
  throw ConfigError("unknown tikhonov solver: " + name);
}

namespace {

using Cx = std::complex<double>;

PermittivityVolume solve_direct(const TfStack& stack, const Grid3D& g,
                                const MeasurementSet& y, double tau) {
  const int np = stack.measurements();
  const int nq = stack.slices();
  const int nx = g.nx, ny = g.ny;

  std::vector<CSlice> y_hat(np);
  parallel_for(np, [&](int lo, int hi) {
    for (int p = lo; p < hi; ++p) y_hat[p] = fft2(y.images[p]);
  });

  std::vector<CSlice> xi(2 * nq, CSlice(nx, ny));
  parallel_for(ny, [&](int lo, int hi) {
    Eigen::MatrixXcd m(np, 2 * nq);
    Eigen::VectorXcd b(np);
    for (int j = lo; j < hi; ++j) {
      const int j2 = (ny - j) % ny;
      for (int i = 0; i < nx; ++i) {
        const int i2 = (nx - i) % nx;
        for (int p = 0; p < np; ++p) {
          for (int q = 0; q < nq; ++q) {
            m(p, q) = 0.5 * (stack.ph[p][q](i, j) + std::conj(stack.ph[p][q](i2, j2)));
            m(p, nq + q) = 0.5 * (stack.ab[p][q](i, j) + std::conj(stack.ab[p][q](i2, j2)));
          }
          b(p) = y_hat[p](i, j);
        }
        Eigen::MatrixXcd normal = m.adjoint() * m;
        normal.diagonal().array() += tau;
        const Eigen::LLT<Eigen::MatrixXcd> llt(normal);
        if (llt.info() != Eigen::Success)
          throw NumericError("per-frequency normal system is not positive definite");
        const Eigen::VectorXcd sol = llt.solve(m.adjoint() * b);
        for (int q = 0; q < 2 * nq; ++q) xi[q](i, j) = sol(q);
      }
    }
  });

  PermittivityVolume out = PermittivityVolume::zeros(g, true);
  parallel_for(nq, [&](int lo, int hi) {
    for (int q = lo; q < hi; ++q) {
      out.re[q] = ifft2(xi[q]).real();
      out.im[q] = ifft2(xi[nq + q]).real();
    }
  });
  return out;
}

double dot(const PermittivityVolume& a, const PermittivityVolume& b) {
  double s = 0;
  for (size_t q = 0; q < a.re.size(); ++q) {
    s += a.re[q].cwiseProduct(b.re[q]).sum();
    s += a.im[q].cwiseProduct(b.im[q]).sum();
  }
  return s;
}

void axpy(double c, const PermittivityVolume& x, PermittivityVolume& y) {
  for (size_t q = 0; q < y.re.size(); ++q) {
    y.re[q] += c * x.re[q];
    y.im[q] += c * x.im[q];
  }
}

PermittivityVolume solve_cg(const TfStack& stack, const Grid3D& g,
                            const MeasurementSet& y, const TikhonovConfig& cfg) {
  const auto apply = [&](const PermittivityVolume& x) {
    PermittivityVolume ax = adjoint(stack, forward(stack, x), g);
    axpy(cfg.tau, x, ax);
    return ax;
  };

  const PermittivityVolume rhs = adjoint(stack, y, g);
  PermittivityVolume x = PermittivityVolume::zeros(g, true);
  PermittivityVolume r = rhs;
  PermittivityVolume p = r;
  double rr = dot(r, r);
  const double stop = cfg.cg_tol * cfg.cg_tol * std::max(rr, 1e-300);
  for (int it = 0; it < cfg.cg_maxiter && rr > stop; ++it) {
    const PermittivityVolume ap = apply(p);
    const double alpha = rr / dot(p, ap);
    if (!std::isfinite(alpha)) throw NumericError("conjugate gradients diverged");
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double rr_new = dot(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (size_t q = 0; q < p.re.size(); ++q) {
      p.re[q] = r.re[q] + beta * p.re[q];
      p.im[q] = r.im[q] + beta * p.im[q];
    }
  }
  return x;
}

}  // namespace

PermittivityVolume tikhonov_reconstruct(const TfStack& stack, const Grid3D& g,
                                        const MeasurementSet& y,
                                        const TikhonovConfig& cfg) {
  cfg.validate();
  g.validate();
  if (stack.nx != g.nx || stack.ny != g.ny || stack.slices() != g.nz)
    throw ConfigError("transfer stack does not match the grid");
  if (y.count() != stack.measurements() || y.nx != g.nx || y.ny != g.ny)
    throw ConfigError("measurements do not match the transfer stack");
  if (cfg.solver == TikhonovConfig::Solver::Direct)
    return solve_direct(stack, g, y, cfg.tau);
  return solve_cg(stack, g, y, cfg);
}

}  // namespace decaf
