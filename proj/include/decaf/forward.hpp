#pragma once

#include <string>
#include <vector>

#include "decaf/transfer.hpp"
#include "decaf/volume.hpp"

namespace decaf {

/// One real intensity image per measurement, background removed.
struct MeasurementSet {
  int nx = 0, ny = 0;
  std::vector<Slice> images;

  [[nodiscard]] int count() const { return static_cast<int>(images.size()); }
  static MeasurementSet zeros(int p, int nx, int ny);
};

/// Linearized forward model. Per measurement p:
///   y_p = Re( ifft2( sum_q ph[p][q] .* fft2(re_q) + ab[p][q] .* fft2(im_q) ) )
/// A real-only volume contributes nothing through the absorption channel.
MeasurementSet forward(const TfStack& stack, const PermittivityVolume& v);

/// Exact adjoint of `forward` under the plain-sum inner products:
///   re_q = sum_p Re( ifft2( conj(ph[p][q]) .* fft2(w_p) ) ), same for im.
/// Always returns a complex-pair volume; grid metadata is copied from `like`.
PermittivityVolume adjoint(const TfStack& stack, const MeasurementSet& w,
                           const Grid3D& like);

/// Measurement container, magic "DCAM": u32 count, u32 nx/ny, then f32
/// images in measurement order (ix fastest within an image).
void write_dcam(const std::string& path, const MeasurementSet& m);
MeasurementSet read_dcam(const std::string& path);

}  // namespace decaf
