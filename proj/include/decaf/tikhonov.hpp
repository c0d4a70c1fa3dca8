#pragma once

#include "decaf/forward.hpp"
#include "decaf/grid.hpp"
#include "decaf/transfer.hpp"
#include "decaf/volume.hpp"

namespace decaf {

struct TikhonovConfig {
  enum class Solver { Direct, Cg };
  double tau = 1e-3;  // l2 regularization weight, > 0
  Solver solver = Solver::Direct;
  double cg_tol = 1e-10;
  int cg_maxiter = 500;

  void validate() const;
};

/// Minimizes ||forward(x) - y||^2 + tau*||x||^2 over complex-pair volumes.
///
/// The transfer functions are diagonal in lateral frequency, and taking the
/// real part of the inverse FFT couples only (u, -u) pairs; substituting the
/// Hermitian-symmetrized functions G(u) = (H(u) + conj(H(-u)))/2 makes the
/// normal equations decouple into one (2*nz)-unknown Hermitian
/// positive-definite system per frequency, solved by Cholesky (Direct).
/// The Cg solver runs matrix-free conjugate gradients on
/// adjoint(forward(x)) + tau*x instead and agrees to cg_tol.
PermittivityVolume tikhonov_reconstruct(const TfStack& stack, const Grid3D& g,
                                        const MeasurementSet& y,
                                        const TikhonovConfig& cfg);

const char* to_string(TikhonovConfig::Solver s);
TikhonovConfig::Solver tikhonov_solver_from(const std::string& name);

}  // namespace decaf
