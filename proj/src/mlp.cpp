#include "decaf/mlp.hpp"

#include <json.hpp>

#include <algorithm>
#include <random>

#include "decaf/detail/binary_io.hpp"
#include "decaf/parallel.hpp"

namespace decaf {

using nlohmann::json;

void MlpConfig::validate() const {
  if (layers < 2) throw ConfigError("mlp needs at least two layers");
  if (width < 1) throw ConfigError("mlp width must be positive");
  if (out_dim < 1) throw ConfigError("mlp out_dim must be positive");
  if (!(leaky_slope >= 0) || leaky_slope >= 1)
    throw ConfigError("leaky slope must lie in [0, 1)");
}

static std::vector<std::pair<int, int>> layer_shapes(const MlpConfig& cfg,
                                                     int features, int skip) {
  std::vector<std::pair<int, int>> shapes(cfg.layers);
  for (int k = 0; k < cfg.layers; ++k) {
    int in = k == 0 ? features : cfg.width;
    if (k == skip) in += features;
    const int out = k == cfg.layers - 1 ? cfg.out_dim : cfg.width;
    shapes[k] = {in, out};
  }
  return shapes;
}

NeuralField make_field(const MlpConfig& cfg, const EncodingConfig& enc_cfg) {
  cfg.validate();
  NeuralField f{cfg, make_encoder(enc_cfg), {}, {}};
  const auto shapes = layer_shapes(cfg, f.enc.dim(), f.skip_index());
  std::mt19937_64 rng(cfg.seed);
  f.w.resize(cfg.layers);
  f.b.resize(cfg.layers);
  for (int k = 0; k < cfg.layers; ++k) {
    const auto [in, out] = shapes[k];
    std::normal_distribution<double> he(0.0, std::sqrt(2.0 / in));
    f.w[k].resize(in, out);
    for (double& x : f.w[k].reshaped()) x = he(rng);
    f.b[k] = Eigen::RowVectorXd::Zero(out);
  }
  return f;
}

std::vector<ParamRef> NeuralField::params(const std::vector<Eigen::MatrixXd>& gw,
                                          const std::vector<Eigen::RowVectorXd>& gb) {
  std::vector<ParamRef> refs;
  refs.reserve(2 * w.size());
  for (size_t k = 0; k < w.size(); ++k) {
    refs.push_back({w[k].data(), gw[k].data(), w[k].size()});
    refs.push_back({b[k].data(), gb[k].data(), b[k].size()});
  }
  return refs;
}

// Row blocks assigned to workers. Each row's output depends only on that
// row, so any contiguous split computes identical values; reductions add the
// per-block partials in block order to stay deterministic.
static int row_blocks(long rows) {
  return static_cast<int>(std::min<long>(thread_count(), rows));
}

Eigen::MatrixXd mlp_forward(const NeuralField& f, const Eigen::MatrixXd& features,
                            MlpCache* cache) {
  if (features.cols() != f.enc.dim())
    throw ConfigError("feature width does not match the encoder");
  const int n_layers = f.cfg.layers;
  const int skip = f.skip_index();
  const double slope = f.cfg.leaky_slope;
  const long rows = features.rows();

  MlpCache local;
  MlpCache& c = cache ? *cache : local;
  c.input = features;
  if (c.h.size() != static_cast<size_t>(n_layers)) c.h.resize(n_layers);
  for (int k = 0; k < n_layers; ++k) c.h[k].resize(rows, f.w[k].cols());
  if (skip >= 0)
    c.skip.resize(rows, f.w[skip].rows());
  else
    c.skip.resize(0, 0);

  const int nb = row_blocks(rows);
  parallel_for(nb, [&](int cb, int ce) {
    for (int ci = cb; ci < ce; ++ci) {
      const long b = rows * ci / nb;
      const long n = rows * (ci + 1) / nb - b;
      const Eigen::MatrixXd* prev = &c.input;
      for (int k = 0; k < n_layers; ++k) {
        const Eigen::MatrixXd* z = prev;
        if (k == skip) {
          c.skip.middleRows(b, n).leftCols(prev->cols()) = prev->middleRows(b, n);
          c.skip.middleRows(b, n).rightCols(c.input.cols()) =
              c.input.middleRows(b, n);
          z = &c.skip;
        }
        auto out = c.h[k].middleRows(b, n);
        out.noalias() = z->middleRows(b, n) * f.w[k];
        out.rowwise() += f.b[k];
        // max(v, slope*v) is the leaky rectifier for slope in [0, 1).
        if (k < n_layers - 1) out = out.cwiseMax(out * slope);
        prev = &c.h[k];
      }
    }
  });
  return c.h.back();
}

MlpGrads mlp_backward(const NeuralField& f, const MlpCache& cache,
                      const Eigen::MatrixXd& d_out) {
  const int n_layers = f.cfg.layers;
  const int skip = f.skip_index();
  const double slope = f.cfg.leaky_slope;
  if (cache.h.size() != static_cast<size_t>(n_layers))
    throw ConfigError("mlp cache does not match the network");
  const long rows = d_out.rows();

  const int nb = row_blocks(rows);
  std::vector<MlpGrads> part(static_cast<size_t>(std::max(nb, 1)));
  parallel_for(nb, [&](int cb, int ce) {
    for (int ci = cb; ci < ce; ++ci) {
      const long b = rows * ci / nb;
      const long n = rows * (ci + 1) / nb - b;
      MlpGrads& g = part[static_cast<size_t>(ci)];
      g.w.resize(n_layers);
      g.b.resize(n_layers);
      Eigen::MatrixXd delta = d_out.middleRows(b, n);
      for (int k = n_layers - 1; k >= 0; --k) {
        const Eigen::MatrixXd& zfull =
            k == 0 ? cache.input : (k == skip ? cache.skip : cache.h[k - 1]);
        g.w[k].noalias() = zfull.middleRows(b, n).transpose() * delta;
        g.b[k] = delta.colwise().sum();
        if (k == 0) break;
        Eigen::MatrixXd dz;
        dz.noalias() = delta * f.w[k].transpose();
        // The feature part of a skip input carries no trainable upstream state.
        const Eigen::MatrixXd& dh =
            k == skip ? dz.leftCols(cache.h[k - 1].cols()).eval() : dz;
        delta = dh.cwiseProduct(cache.h[k - 1].middleRows(b, n).unaryExpr(
            [slope](double v) { return v > 0 ? 1.0 : slope; }));
      }
    }
  });

  MlpGrads g = std::move(part[0]);
  if (nb == 0 || g.w.empty()) {  // no rows: zero gradients of the right shape
    g.w.resize(n_layers);
    g.b.resize(n_layers);
    for (int k = 0; k < n_layers; ++k) {
      g.w[k] = Eigen::MatrixXd::Zero(f.w[k].rows(), f.w[k].cols());
      g.b[k] = Eigen::RowVectorXd::Zero(f.b[k].cols());
    }
    return g;
  }
  for (int ci = 1; ci < nb; ++ci)
    for (int k = 0; k < n_layers; ++k) {
      g.w[k] += part[static_cast<size_t>(ci)].w[k];
      g.b[k] += part[static_cast<size_t>(ci)].b[k];
    }
  return g;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> rect_coords(const Grid3D& g, int x0,
                                                     int y0, int w, int h) {
  Eigen::Matrix<double, Eigen::Dynamic, 3> coords(
      static_cast<long>(w) * h * g.nz, 3);
  long r = 0;
  for (int iz = 0; iz < g.nz; ++iz) {
    const double cz = normalized_coord(iz, g.nz);
    for (int iy = 0; iy < h; ++iy) {
      const double cy = normalized_coord(y0 + iy, g.ny);
      for (int ix = 0; ix < w; ++ix, ++r) {
        coords(r, 0) = normalized_coord(x0 + ix, g.nx);
        coords(r, 1) = cy;
        coords(r, 2) = cz;
      }
    }
  }
  return coords;
}

PermittivityVolume rows_to_volume(const Eigen::MatrixXd& out, const Grid3D& like,
                                  int w, int h) {
  if (out.cols() != 2 || out.rows() != static_cast<long>(w) * h * like.nz)
    throw ConfigError("network output shape does not match the target rect");
  PermittivityVolume v;
  v.grid = like;
  v.grid.nx = w;
  v.grid.ny = h;
  v.re.resize(like.nz);
  v.im.resize(like.nz);
  const long pix = static_cast<long>(w) * h;
  for (int iz = 0; iz < like.nz; ++iz) {
    v.re[iz] = Eigen::Map<const Slice>(out.col(0).data() + iz * pix, w, h);
    v.im[iz] = Eigen::Map<const Slice>(out.col(1).data() + iz * pix, w, h);
  }
  return v;
}

Eigen::MatrixXd volume_to_rows(const PermittivityVolume& v) {
  const long pix = v.grid.pixels();
  Eigen::MatrixXd rows(pix * v.grid.nz, 2);
  for (int iz = 0; iz < v.grid.nz; ++iz) {
    rows.col(0).segment(iz * pix, pix) =
        Eigen::Map<const Eigen::VectorXd>(v.re[iz].data(), pix);
    if (v.complex_pair())
      rows.col(1).segment(iz * pix, pix) =
          Eigen::Map<const Eigen::VectorXd>(v.im[iz].data(), pix);
    else
      rows.col(1).segment(iz * pix, pix).setZero();
  }
  return rows;
}

PermittivityVolume render_volume(const NeuralField& f, const Grid3D& g,
                                 long* extrapolated) {
  g.validate();
  const auto coords = rect_coords(g, 0, 0, g.nx, g.ny);
  if (extrapolated) {
    long outside = 0;
    for (long r = 0; r < coords.rows(); ++r)
      if (coords.row(r).cwiseAbs().maxCoeff() > 1.0) ++outside;
    *extrapolated = outside;
  }
  const Eigen::MatrixXd out = mlp_forward(f, encode_batch(f.enc, coords));
  return rows_to_volume(out, g, g.nx, g.ny);
}

using namespace detail;

static json encoder_to_json(const Encoder& enc) {
  json j{{"kind", to_string(enc.cfg.kind)}, {"l_xy", enc.cfg.l_xy},
         {"l_z", enc.cfg.l_z},             {"thetas", enc.cfg.thetas},
         {"gaussian_rows", enc.cfg.gaussian_rows},
         {"gaussian_scale", enc.cfg.gaussian_scale},
         {"seed", enc.cfg.seed}};
  if (enc.cfg.kind == EncodingKind::Gaussian) {
    json rows = json::array();
    for (int r = 0; r < enc.b.rows(); ++r)
      rows.push_back({enc.b(r, 0), enc.b(r, 1)});
    j["b"] = std::move(rows);
  }
  return j;
}

void save_weights(const std::string& path, const NeuralField& f) {
  json meta{{"format", 1},
            {"encoding", encoder_to_json(f.enc)},
            {"mlp",
             {{"layers", f.cfg.layers},
              {"width", f.cfg.width},
              {"out_dim", f.cfg.out_dim},
              {"leaky_slope", f.cfg.leaky_slope},
              {"seed", f.cfg.seed}}}};
  json shapes = json::array();
  for (const auto& w : f.w) shapes.push_back({w.rows(), w.cols()});
  meta["shapes"] = std::move(shapes);

  auto out = open_write(path);
  write_magic(out, "DCFW");
  write_scalar<std::uint16_t>(out, 1);
  const std::string blob = meta.dump();
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  for (size_t k = 0; k < f.w.size(); ++k) {
    write_f32_array(out, f.w[k].data(), f.w[k].size());
    write_f32_array(out, f.b[k].data(), f.b[k].size());
  }
  if (!out) throw IoError("write failed: " + path);
}

NeuralField load_weights(const std::string& path) {
  auto in = open_read(path);
  expect_magic(in, "DCFW");
  if (read_scalar<std::uint16_t>(in, "version") != 1)
    throw IoError("unsupported weight version");
  const auto len = read_scalar<std::uint32_t>(in, "json length");
  std::string blob(len, '\0');
  in.read(blob.data(), len);
  if (!in) throw IoError("truncated weight metadata");
  json meta;
  try {
    meta = json::parse(blob);
  } catch (const json::exception& e) {
    throw IoError(std::string("weight metadata is not valid JSON: ") + e.what());
  }

  try {
    NeuralField f;
    const auto& jm = meta.at("mlp");
    f.cfg.layers = jm.at("layers").get<int>();
    f.cfg.width = jm.at("width").get<int>();
    f.cfg.out_dim = jm.at("out_dim").get<int>();
    f.cfg.leaky_slope = jm.at("leaky_slope").get<double>();
    f.cfg.seed = jm.at("seed").get<std::uint64_t>();
    f.cfg.validate();

    const auto& je = meta.at("encoding");
    EncodingConfig ec;
    ec.kind = encoding_kind_from(je.at("kind").get<std::string>());
    ec.l_xy = je.at("l_xy").get<int>();
    ec.l_z = je.at("l_z").get<int>();
    ec.thetas = je.at("thetas").get<std::vector<double>>();
    ec.gaussian_rows = je.at("gaussian_rows").get<int>();
    ec.gaussian_scale = je.at("gaussian_scale").get<double>();
    ec.seed = je.at("seed").get<std::uint64_t>();
    f.enc = make_encoder(ec);
    if (ec.kind == EncodingKind::Gaussian) {
      // The stored projection wins over the seeded draw: it is exact.
      const auto& rows = je.at("b");
      if (static_cast<int>(rows.size()) != ec.gaussian_rows)
        throw IoError("projection row count mismatch");
      for (int r = 0; r < ec.gaussian_rows; ++r) {
        f.enc.b(r, 0) = rows[r][0].get<double>();
        f.enc.b(r, 1) = rows[r][1].get<double>();
      }
    }

    const auto shapes = meta.at("shapes");
    if (static_cast<int>(shapes.size()) != f.cfg.layers)
      throw IoError("layer shape list mismatch");
    f.w.resize(f.cfg.layers);
    f.b.resize(f.cfg.layers);
    const auto expected = layer_shapes(f.cfg, f.enc.dim(), f.skip_index());
    for (int k = 0; k < f.cfg.layers; ++k) {
      const int rows = shapes[k][0].get<int>();
      const int cols = shapes[k][1].get<int>();
      if (rows != expected[k].first || cols != expected[k].second)
        throw IoError("stored layer shape disagrees with the configuration");
      f.w[k].resize(rows, cols);
      f.b[k].resize(cols);
      read_f32_array(in, f.w[k].data(), f.w[k].size(), "weights");
      read_f32_array(in, f.b[k].data(), f.b[k].size(), "biases");
    }
    return f;
  } catch (const json::exception& e) {
    throw IoError(std::string("weight metadata is incomplete: ") + e.what());
  }
}

}  // namespace decaf
