#pragma once

#include <memory>

#include "decaf/dncnn.hpp"
#include "decaf/volume.hpp"

namespace decaf {

enum class DenoiserKind { Identity, GaussianResidual, Cnn };

const char* to_string(DenoiserKind k);
DenoiserKind denoiser_kind_from(const std::string& name);

// A 2D slice denoiser D. Residual kinds define D(x) = x - R(x) exactly,
// where R extracts the estimated noise.
struct Denoiser {
  DenoiserKind kind = DenoiserKind::Identity;
  double sigma = 0.0;  // noise strength in intensity units
  std::shared_ptr<const DncnnNet> net;

  static Denoiser identity();
  // Classical fallback: R = identity - Gaussian blur. The blur std is tied
  // to the noise strength as 100*sigma pixels (documented monotone map).
  static Denoiser gaussian_residual(double sigma);
  static Denoiser cnn(DncnnNet net);

  void validate() const;  // sigma > 0 for non-identity kinds
};

// Separable Gaussian blur with reflective (mirror) padding; preserves
// constants up to rounding because the kernel is normalized to unit sum.
Slice gaussian_blur(const Slice& img, double std_px);

// Estimated noise R(x); zero for the identity kind.
Slice denoiser_residual(const Denoiser& d, const Slice& img);

// Denoised image. Residual kinds return x - R(x) exactly (same R used by
// denoiser_residual), the identity kind returns its input unchanged.
Slice denoise(const Denoiser& d, const Slice& img);

}  // namespace decaf
