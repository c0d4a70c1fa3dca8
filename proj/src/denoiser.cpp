#include "decaf/denoiser.hpp"

#include <cmath>

#include "decaf/errors.hpp"

namespace decaf {

const char* to_string(DenoiserKind k) {
  switch (k) {
    case DenoiserKind::Identity: return "identity";
    case DenoiserKind::GaussianResidual: return "gaussian-residual";
    case DenoiserKind::Cnn: return "cnn";
  }
  return "?";
}

DenoiserKind denoiser_kind_from(const std::string& name) {
  if (name == "identity") return DenoiserKind::Identity;
  if (name == "gaussian-residual") return DenoiserKind::GaussianResidual;
  if (name == "cnn" || name == "dncnn") return DenoiserKind::Cnn;
  throw ConfigError("unknown denoiser kind: " + name);
}

Denoiser Denoiser::identity() { return {}; }

Denoiser Denoiser::gaussian_residual(double sigma) {
  Denoiser d;
  d.kind = DenoiserKind::GaussianResidual;
  d.sigma = sigma;
  d.validate();
  return d;
}

Denoiser Denoiser::cnn(DncnnNet net) {
  Denoiser d;
  d.kind = DenoiserKind::Cnn;
  d.sigma = net.sigma;
  d.net = std::make_shared<const DncnnNet>(std::move(net));
  d.validate();
  return d;
}

void Denoiser::validate() const {
  if (kind != DenoiserKind::Identity && !(sigma > 0))
    throw ConfigError("denoiser noise strength must be positive");
  if (kind == DenoiserKind::Cnn && !net) throw ConfigError("cnn denoiser has no weights");
}

Slice gaussian_blur(const Slice& img, double std_px) {
  if (!(std_px > 0)) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * std_px)));
  Eigen::VectorXd kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k)
    kernel(k + radius) = std::exp(-0.5 * k * k / (std_px * std_px));
  kernel /= kernel.sum();

  const int nx = static_cast<int>(img.rows());
  const int ny = static_cast<int>(img.cols());
  const auto mirror = [](int t, int n) {
    while (t < 0 || t >= n) t = t < 0 ? -t : 2 * n - 2 - t;
    return t;
  };
  Slice tmp(nx, ny), out(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel(k + radius) * img(mirror(i + k, nx), j);
      tmp(i, j) = acc;
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel(k + radius) * tmp(i, mirror(j + k, ny));
      out(i, j) = acc;
    }
  return out;
}

Slice denoiser_residual(const Denoiser& d, const Slice& img) {
  switch (d.kind) {
    case DenoiserKind::Identity:
      return Slice::Zero(img.rows(), img.cols());
    case DenoiserKind::GaussianResidual:
      return img - gaussian_blur(img, 100.0 * d.sigma);
    case DenoiserKind::Cnn: {
      const int field = 1 + 2 * d.net->cfg.layers;
      if (img.rows() < field || img.cols() < field)
        throw ConfigError("image smaller than the cnn receptive field");
      return dncnn_residual(*d.net, img);
    }
  }
  throw ConfigError("unreachable denoiser kind");
}

Slice denoise(const Denoiser& d, const Slice& img) {
  if (d.kind == DenoiserKind::Identity) return img;
  return img - denoiser_residual(d, img);
}

}  // namespace decaf
