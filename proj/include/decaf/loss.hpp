#pragma once

#include "decaf/denoiser.hpp"
#include "decaf/forward.hpp"
#include "decaf/volume.hpp"

namespace decaf {

struct LossWeights {
  double alpha = 0.05;            // slice-wise noise-reduction weight
  double beta = 0.1;              // axial-continuity weight
  double charbonnier_eps = 1e-6;  // smoothing constant for l1 terms
  void validate() const;          // alpha, beta >= 0; eps > 0
};

// Per-term breakdown. term2/term3 hold the raw (unweighted) regularizer
// magnitudes; total is term1 + alpha*term2 + beta*term3, summed exactly
// in that order.
struct LossBreakdown {
  double term1 = 0;
  double term2 = 0;
  double term3 = 0;
  double total = 0;
};

// Smoothed l1 on the measurement mismatch: sum over every pixel of
// sqrt(r^2 + eps^2), r = pred - target. When grad is non-null it is
// overwritten with d(term)/d(pred) = r / sqrt(r^2 + eps^2).
double data_term(const MeasurementSet& pred, const MeasurementSet& target,
                 double eps, MeasurementSet* grad);

// Squared distance to the denoised volume, ||x - D(x)||_2^2, denoising each
// z-slice of each channel independently. Returns the raw magnitude; when
// grad is non-null, accumulates alpha * 2(x - D(x)) into it (the denoiser is
// treated as constant under differentiation). Identity denoiser contributes
// exactly zero and leaves grad untouched.
double denoise_term(const PermittivityVolume& x, const Denoiser& d,
                    double alpha, PermittivityVolume* grad);

// Smoothed l1 of successive z-slice differences over both channels,
// sum_j charbonnier(slice_j - slice_{j-1}) for j = 1..nz-1 (interior
// differences only; each pixel contributes at least (nz-1)*eps of floor).
// When grad is non-null, accumulates beta * d/sqrt(d^2+eps^2) into it.
double continuity_term(const PermittivityVolume& x, double eps, double beta,
                       PermittivityVolume* grad);

// Full objective on an explicit volume: evaluates forward(stack, x) and all
// three terms. Convenience for logging and reference loops.
LossBreakdown total_loss(const TfStack& stack, const MeasurementSet& y,
                         const PermittivityVolume& x, const Denoiser& d,
                         const LossWeights& w);

}  // namespace decaf
