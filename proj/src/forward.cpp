#include "decaf/forward.hpp"

#include <cstdint>

#include "decaf/detail/binary_io.hpp"
#include "decaf/fft2.hpp"
#include "decaf/parallel.hpp"

namespace decaf {

MeasurementSet MeasurementSet::zeros(int p, int nx, int ny) {
  MeasurementSet m;
  m.nx = nx;
  m.ny = ny;
  m.images.assign(p, Slice::Zero(nx, ny));
  return m;
}

static void check_match(const TfStack& stack, int nx, int ny, int nz) {
  if (stack.nx != nx || stack.ny != ny)
    throw ConfigError("transfer stack lateral shape mismatch");
  if (nz >= 0 && stack.slices() != nz)
    throw ConfigError("transfer stack slice count mismatch");
}

MeasurementSet forward(const TfStack& stack, const PermittivityVolume& v) {
  check_match(stack, v.grid.nx, v.grid.ny, v.grid.nz);
  const int p_count = stack.measurements();
  const int nz = v.grid.nz;

  std::vector<CSlice> sp_re(nz), sp_im;
  for (int q = 0; q < nz; ++q) sp_re[q] = fft2(v.re[q]);
  if (v.complex_pair()) {
    sp_im.resize(nz);
    for (int q = 0; q < nz; ++q) sp_im[q] = fft2(v.im[q]);
  }

  MeasurementSet out = MeasurementSet::zeros(p_count, v.grid.nx, v.grid.ny);
  parallel_for(p_count, [&](int begin, int end) {
    for (int p = begin; p < end; ++p) {
      CSlice acc = CSlice::Zero(v.grid.nx, v.grid.ny);
      for (int q = 0; q < nz; ++q) {
        acc += stack.ph[p][q].cwiseProduct(sp_re[q]);
        if (!sp_im.empty()) acc += stack.ab[p][q].cwiseProduct(sp_im[q]);
      }
      out.images[p] = ifft2(acc).real();
    }
  });
  return out;
}

PermittivityVolume adjoint(const TfStack& stack, const MeasurementSet& w,
                           const Grid3D& like) {
  check_match(stack, w.nx, w.ny, -1);
  if (w.count() != stack.measurements())
    throw ConfigError("adjoint needs one image per measurement");
  const int nz = stack.slices();

  std::vector<CSlice> sp(w.count());
  parallel_for(w.count(), [&](int begin, int end) {
    for (int p = begin; p < end; ++p) sp[p] = fft2(w.images[p]);
  });

  PermittivityVolume out = PermittivityVolume::zeros(like, true);
  parallel_for(nz, [&](int begin, int end) {
    for (int q = begin; q < end; ++q) {
      CSlice acc_re = CSlice::Zero(w.nx, w.ny);
      CSlice acc_im = CSlice::Zero(w.nx, w.ny);
      for (int p = 0; p < w.count(); ++p) {
        acc_re += stack.ph[p][q].conjugate().cwiseProduct(sp[p]);
        acc_im += stack.ab[p][q].conjugate().cwiseProduct(sp[p]);
      }
      out.re[q] = ifft2(acc_re).real();
      out.im[q] = ifft2(acc_im).real();
    }
  });
  return out;
}

using namespace detail;

void write_dcam(const std::string& path, const MeasurementSet& m) {
  if (m.images.empty()) throw ConfigError("refusing to write empty measurements");
  auto out = open_write(path);
  write_magic(out, "DCAM");
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(m.count()));
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(m.nx));
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(m.ny));
  for (const auto& img : m.images) {
    if (img.rows() != m.nx || img.cols() != m.ny)
      throw ConfigError("measurement image shape mismatch");
    write_f32_array(out, img.data(), img.size());
  }
  if (!out) throw IoError("write failed: " + path);
}

MeasurementSet read_dcam(const std::string& path) {
  auto in = open_read(path);
  expect_magic(in, "DCAM");
  const auto p = read_scalar<std::uint32_t>(in, "count");
  MeasurementSet m;
  m.nx = static_cast<int>(read_scalar<std::uint32_t>(in, "nx"));
  m.ny = static_cast<int>(read_scalar<std::uint32_t>(in, "ny"));
  if (p == 0 || m.nx <= 0 || m.ny <= 0) throw IoError("degenerate measurement file");
  m.images.assign(p, Slice(m.nx, m.ny));
  for (auto& img : m.images) read_f32_array(in, img.data(), img.size(), "image");
  return m;
}

}  // namespace decaf
