#include "decaf/encoding.hpp"

#include <cmath>
#include <random>

#include "decaf/parallel.hpp"

namespace decaf {

void EncodingConfig::validate() const {
  if (l_z < 0) throw ConfigError("l_z must be non-negative");
  switch (kind) {
    case EncodingKind::Positional:
    case EncodingKind::Radial:
      if (l_xy < 1) throw ConfigError("l_xy must be positive");
      if (kind == EncodingKind::Radial && thetas.empty())
        throw ConfigError("radial encoding needs at least one angle");
      break;
    case EncodingKind::Gaussian:
      if (gaussian_rows < 1) throw ConfigError("gaussian_rows must be positive");
      if (!(gaussian_scale > 0)) throw ConfigError("gaussian_scale must be positive");
      break;
  }
}

int Encoder::lateral_dim() const {
  switch (cfg.kind) {
    case EncodingKind::Positional:
      return 4 * cfg.l_xy;
    case EncodingKind::Radial:
      return 4 * static_cast<int>(cfg.thetas.size()) * cfg.l_xy;
    case EncodingKind::Gaussian:
      return 2 * cfg.gaussian_rows;
  }
  return 0;
}

Encoder make_encoder(const EncodingConfig& cfg) {
  cfg.validate();
  Encoder enc{cfg, {}};
  if (cfg.kind == EncodingKind::Gaussian) {
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, cfg.gaussian_scale);
    enc.b.resize(cfg.gaussian_rows, 2);
    for (int r = 0; r < cfg.gaussian_rows; ++r)
      for (int c = 0; c < 2; ++c) enc.b(r, c) = normal(rng);
  }
  return enc;
}

Eigen::VectorXd positional_encode(double t, int l_max) {
  Eigen::VectorXd f(2 * l_max);
  for (int l = 0; l < l_max; ++l) {
    const double arg = std::ldexp(EIGEN_PI, l) * t;  // 2^l * pi * t
    f[2 * l] = std::sin(arg);
    f[2 * l + 1] = std::cos(arg);
  }
  return f;
}

static void encode_into(const Encoder& enc, double x, double y, double z,
                        double* out) {
  const auto& cfg = enc.cfg;
  long k = 0;
  auto put_positional = [&](double t, int l_max) {
    for (int l = 0; l < l_max; ++l) {
      const double arg = std::ldexp(EIGEN_PI, l) * t;
      out[k++] = std::sin(arg);
      out[k++] = std::cos(arg);
    }
  };
  switch (cfg.kind) {
    case EncodingKind::Positional:
      put_positional(x, cfg.l_xy);
      put_positional(y, cfg.l_xy);
      break;
    case EncodingKind::Radial:
      for (double theta : cfg.thetas) {
        const double c = std::cos(theta), s = std::sin(theta);
        put_positional(c * x - s * y, cfg.l_xy);
        put_positional(s * x + c * y, cfg.l_xy);
      }
      break;
    case EncodingKind::Gaussian: {
      const int rows = cfg.gaussian_rows;
      for (int r = 0; r < rows; ++r) {
        const double arg = 2.0 * EIGEN_PI * (enc.b(r, 0) * x + enc.b(r, 1) * y);
        out[r] = std::sin(arg);
        out[rows + r] = std::cos(arg);
      }
      k = 2 * rows;
      break;
    }
  }
  put_positional(z, cfg.l_z);
}

Eigen::VectorXd encode(const Encoder& enc, const Eigen::Vector3d& c) {
  Eigen::VectorXd f(enc.dim());
  encode_into(enc, c.x(), c.y(), c.z(), f.data());
  return f;
}

const char* to_string(EncodingKind k) {
  switch (k) {
    case EncodingKind::Positional: return "positional";
    case EncodingKind::Radial: return "radial";
    case EncodingKind::Gaussian: return "gaussian";
  }
  return "?";
}

EncodingKind encoding_kind_from(const std::string& name) {
  if (name == "positional") return EncodingKind::Positional;
  if (name == "radial") return EncodingKind::Radial;
  if (name == "gaussian") return EncodingKind::Gaussian;
  throw ConfigError("unknown encoding kind: " + name);
}

Eigen::MatrixXd encode_batch(const Encoder& enc,
                             const Eigen::Matrix<double, Eigen::Dynamic, 3>& coords) {
  const long n = coords.rows();
  // Row-major staging so each coordinate writes a contiguous span.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f(
      n, enc.dim());
  parallel_for(static_cast<int>(n), [&](int begin, int end) {
    for (int r = begin; r < end; ++r)
      encode_into(enc, coords(r, 0), coords(r, 1), coords(r, 2), f.row(r).data());
  });
  return f;
}

}  // namespace decaf
