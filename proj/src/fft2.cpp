#include "decaf/fft2.hpp"

#include <unsupported/Eigen/FFT>

namespace decaf {

namespace {

Eigen::FFT<double>& plan() {
  thread_local Eigen::FFT<double> fft;  // caches kissfft twiddle tables
  return fft;
}

enum class Dir { Fwd, Inv };

// Row/column decomposition. Eigen's 1-D inverse already scales by 1/n, so
// the two passes compose to the 1/(rows*cols) convention.
CSlice transform(const CSlice& x, Dir dir) {
  auto& fft = plan();
  CSlice work = x;
  // A 1-point DFT is the identity (and the kissfft backend cannot plan
  // it), so degenerate axes skip their pass.
  if (x.rows() > 1) {
    Eigen::VectorXcd in(x.rows()), out(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      in = work.col(j);
      if (dir == Dir::Fwd)
        fft.fwd(out, in);
      else
        fft.inv(out, in);
      work.col(j) = out;
    }
  }
  if (x.cols() > 1) {
    Eigen::VectorXcd rin(x.cols()), rout(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      rin = work.row(i);
      if (dir == Dir::Fwd)
        fft.fwd(rout, rin);
      else
        fft.inv(rout, rin);
      work.row(i) = rout;
    }
  }
  return work;
}

}  // namespace

CSlice fft2(const CSlice& x) { return transform(x, Dir::Fwd); }

CSlice fft2(const Slice& x) { return transform(x.cast<std::complex<double>>(), Dir::Fwd); }

CSlice ifft2(const CSlice& x) { return transform(x, Dir::Inv); }

Eigen::VectorXd frequency_axis(int n, double pitch) {
  Eigen::VectorXd u(n);
  const double step = 2.0 * EIGEN_PI / (n * pitch);
  for (int i = 0; i < n; ++i) {
    const int k = i < (n + 1) / 2 ? i : i - n;
    u[i] = step * k;
  }
  return u;
}

}  // namespace decaf
