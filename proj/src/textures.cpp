#include "decaf/textures.hpp"

#include <algorithm>
#include <random>

#include "decaf/errors.hpp"

namespace decaf {

namespace {

// Bilinear resize onto an n x n target; source pixels sit at cell centers.
Slice resize_bilinear(const Slice& src, int n) {
  const int sh = static_cast<int>(src.rows());
  const int sw = static_cast<int>(src.cols());
  Slice out(n, n);
  for (int j = 0; j < n; ++j) {
    const double fy = (j + 0.5) * sw / n - 0.5;
    const int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, sw - 1);
    const int j1 = std::min(j0 + 1, sw - 1);
    const double wy = std::clamp(fy - j0, 0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const double fx = (i + 0.5) * sh / n - 0.5;
      const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, sh - 1);
      const int i1 = std::min(i0 + 1, sh - 1);
      const double wx = std::clamp(fx - i0, 0.0, 1.0);
      out(i, j) = (1 - wx) * ((1 - wy) * src(i0, j0) + wy * src(i0, j1)) +
                  wx * ((1 - wy) * src(i1, j0) + wy * src(i1, j1));
    }
  }
  return out;
}

}  // namespace

std::vector<Slice> make_texture_dataset(int count, int size, std::uint64_t seed) {
  if (count < 1 || size < 4) throw ConfigError("texture dataset too small");
  std::vector<Slice> images;
  images.reserve(count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int idx = 0; idx < count; ++idx) {
    Slice acc = Slice::Zero(size, size);
    double amp = 1.0;
    for (int res = 4; res <= size; res *= 2) {
      Slice base(res, res);
      for (double& v : base.reshaped()) v = uni(rng);
      acc += amp * resize_bilinear(base, size);
      amp *= 0.55;
    }
    const double lo = acc.minCoeff();
    const double hi = acc.maxCoeff();
    acc = hi > lo ? Slice(((acc.array() - lo) / (hi - lo)).matrix())
                  : Slice::Zero(size, size);
    images.push_back(std::move(acc));
  }
  return images;
}

Slice add_gaussian_noise(const Slice& img, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  Slice out = img;
  if (sigma > 0)
    for (double& v : out.reshaped()) v += normal(rng);
  return out;
}

}  // namespace decaf
