#pragma once

#include <optional>
#include <vector>

#include "decaf/volume.hpp"

namespace decaf {

/// Mean squared / mean absolute error over all entries of matching stacks.
double mse(const std::vector<Slice>& a, const std::vector<Slice>& b);
double mae(const std::vector<Slice>& a, const std::vector<Slice>& b);

/// Both channels of a volume pooled into one mean.
double mse(const PermittivityVolume& a, const PermittivityVolume& b);
double mae(const PermittivityVolume& a, const PermittivityVolume& b);

struct PsnrOptions {
  /// Default: 10*log10(max^2 / mse) with max taken over the reference.
  /// printed_form drops the square: 10*log10(max / mse).
  bool printed_form = false;
};

/// Peak signal-to-noise ratio in dB against the reference peak. Returns
/// nullopt when mse is exactly zero: the inputs are identical and callers
/// report that outcome instead of a number.
std::optional<double> psnr(const std::vector<Slice>& ref,
                           const std::vector<Slice>& est,
                           PsnrOptions opts = {});

/// PSNR from precomputed statistics; nullopt when mse_value == 0.
std::optional<double> psnr_from(double peak, double mse_value,
                                PsnrOptions opts = {});

}  // namespace decaf
