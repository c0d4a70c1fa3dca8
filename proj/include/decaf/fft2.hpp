#pragma once

#include <Eigen/Core>

#include "decaf/volume.hpp"

namespace decaf {

/// Unnormalized forward 2-D DFT; DC lands at index (0, 0).
CSlice fft2(const CSlice& x);
CSlice fft2(const Slice& x);

/// Inverse 2-D DFT scaled by 1/(rows*cols), so ifft2(fft2(x)) == x.
CSlice ifft2(const CSlice& x);

/// Angular DFT frequencies 2*pi*fftfreq(n, pitch): entry i is
/// 2*pi*i/(n*pitch) for i < (n+1)/2 and wraps to the negative branch
/// beyond, so an even-length axis lists its Nyquist frequency negative.
Eigen::VectorXd frequency_axis(int n, double pitch);

}  // namespace decaf
