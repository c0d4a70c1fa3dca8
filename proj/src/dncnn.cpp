#include "decaf/dncnn.hpp"

#include <cmath>
#include <json.hpp>
#include <random>

#include "decaf/detail/binary_io.hpp"
#include "decaf/optimize.hpp"

namespace decaf {

using nlohmann::json;

void DncnnConfig::validate() const {
  if (layers < 1) throw ConfigError("dncnn needs at least one layer");
  if (channels < 1) throw ConfigError("dncnn channels must be positive");
}

namespace {

// Feature maps live as (h*w) x channels matrices; pixel r = j*h + i.
using Feat = Eigen::MatrixXd;

inline int reflect(int t, int n) {  // mirror without repeating the edge
  if (t < 0) return -t;
  if (t >= n) return 2 * n - 2 - t;
  return t;
}

// 3x3 neighborhoods with reflective padding. Column layout: tap*c_in + c,
// taps ordered (dy, dx) row-major over dy, dx in {-1, 0, 1}.
Feat im2col(const Feat& feat, int h, int w) {
  const int c_in = static_cast<int>(feat.cols());
  Feat cols(feat.rows(), 9 * c_in);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int tap = (dy + 1) * 3 + (dx + 1);
      for (int j = 0; j < w; ++j) {
        const int sj = reflect(j + dy, w);
        for (int i = 0; i < h; ++i) {
          const int si = reflect(i + dx, h);
          cols.row(static_cast<long>(j) * h + i).segment(tap * c_in, c_in) =
              feat.row(static_cast<long>(sj) * h + si);
        }
      }
    }
  }
  return cols;
}

// Adjoint of im2col: scatter-adds column gradients back onto the features.
Feat col2im(const Feat& d_cols, int h, int w, int c_in) {
  Feat d_feat = Feat::Zero(static_cast<long>(h) * w, c_in);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int tap = (dy + 1) * 3 + (dx + 1);
      for (int j = 0; j < w; ++j) {
        const int sj = reflect(j + dy, w);
        for (int i = 0; i < h; ++i) {
          const int si = reflect(i + dx, h);
          d_feat.row(static_cast<long>(sj) * h + si) +=
              d_cols.row(static_cast<long>(j) * h + i).segment(tap * c_in, c_in);
        }
      }
    }
  }
  return d_feat;
}

// Runs all layers; when `acts` is given it keeps each layer's input.
Feat run_net(const DncnnNet& net, const Feat& image, int h, int w,
             std::vector<Feat>* acts) {
  Feat x = image;
  if (acts) acts->clear();
  const int n = net.cfg.layers;
  for (int k = 0; k < n; ++k) {
    if (acts) acts->push_back(x);
    Feat y = im2col(x, h, w) * net.w[k];
    y.rowwise() += net.b[k].transpose();
    if (k < n - 1) y = y.cwiseMax(0.0);
    x = std::move(y);
  }
  return x;
}

}  // namespace

DncnnNet make_dncnn(const DncnnConfig& cfg) {
  cfg.validate();
  DncnnNet net{cfg, 0.0, {}, {}};
  std::mt19937_64 rng(cfg.seed);
  net.w.resize(cfg.layers);
  net.b.resize(cfg.layers);
  for (int k = 0; k < cfg.layers; ++k) {
    const int c_in = k == 0 ? 1 : cfg.channels;
    const int c_out = k == cfg.layers - 1 ? 1 : cfg.channels;
    std::normal_distribution<double> he(0.0, std::sqrt(2.0 / (9.0 * c_in)));
    net.w[k].resize(9 * c_in, c_out);
    for (double& v : net.w[k].reshaped()) v = he(rng);
    net.b[k] = Eigen::VectorXd::Zero(c_out);
  }
  return net;
}

Slice dncnn_residual(const DncnnNet& net, const Slice& img) {
  const int h = static_cast<int>(img.rows());
  const int w = static_cast<int>(img.cols());
  const Feat in = Eigen::Map<const Eigen::VectorXd>(img.data(), img.size());
  const Feat out = run_net(net, in, h, w, nullptr);
  return Eigen::Map<const Slice>(out.col(0).data(), h, w);
}

DncnnHistory train_dncnn(DncnnNet& net, const std::vector<Slice>& clean,
                         const DncnnTrainConfig& cfg) {
  if (clean.empty()) throw ConfigError("dncnn training needs textures");
  for (const auto& img : clean)
    if (img.rows() < cfg.patch || img.cols() < cfg.patch)
      throw ConfigError("texture smaller than the training patch");
  net.sigma = cfg.sigma;

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.sigma);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(clean.size()) - 1);

  AdamConfig adam_cfg;
  adam_cfg.lr0 = cfg.lr0;
  adam_cfg.decay = cfg.decay;
  adam_cfg.period = cfg.steps;
  AdamState adam;

  const int n_layers = net.cfg.layers;
  const long pix = static_cast<long>(cfg.patch) * cfg.patch;
  std::vector<Eigen::MatrixXd> gw(n_layers);
  std::vector<Eigen::VectorXd> gb(n_layers);

  DncnnHistory hist;
  double window = 0;
  int window_n = 0;
  for (int step = 0; step < cfg.steps; ++step) {
    for (int k = 0; k < n_layers; ++k) {
      gw[k] = Eigen::MatrixXd::Zero(net.w[k].rows(), net.w[k].cols());
      gb[k] = Eigen::VectorXd::Zero(net.b[k].size());
    }
    double loss = 0;
    for (int s = 0; s < cfg.batch; ++s) {
      const Slice& img = clean[static_cast<size_t>(pick(rng))];
      std::uniform_int_distribution<int> ox(0, static_cast<int>(img.rows()) - cfg.patch);
      std::uniform_int_distribution<int> oy(0, static_cast<int>(img.cols()) - cfg.patch);
      const int x0 = ox(rng), y0 = oy(rng);

      Feat target(pix, 1), noisy(pix, 1);
      for (int j = 0; j < cfg.patch; ++j) {
        for (int i = 0; i < cfg.patch; ++i) {
          const double n = cfg.sigma > 0 ? noise(rng) : 0.0;
          target(static_cast<long>(j) * cfg.patch + i, 0) = n;
          noisy(static_cast<long>(j) * cfg.patch + i, 0) = img(x0 + i, y0 + j) + n;
        }
      }

      std::vector<Feat> acts;
      const Feat r = run_net(net, noisy, cfg.patch, cfg.patch, &acts);
      const Feat err = r - target;
      loss += err.squaredNorm() / pix + err.cwiseAbs().sum() / pix;

      Feat delta = (2.0 * err + err.unaryExpr([](double v) {
                      return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
                    })) /
                   static_cast<double>(pix * cfg.batch);
      for (int k = n_layers - 1; k >= 0; --k) {
        const Feat cols = im2col(acts[k], cfg.patch, cfg.patch);
        gw[k].noalias() += cols.transpose() * delta;
        gb[k] += delta.colwise().sum().transpose();
        if (k == 0) break;
        const Feat d_cols = delta * net.w[k].transpose();
        Feat d_feat = col2im(d_cols, cfg.patch, cfg.patch,
                             static_cast<int>(acts[k].cols()));
        delta = d_feat.cwiseProduct(acts[k].unaryExpr(
            [](double v) { return v > 0 ? 1.0 : 0.0; }));
      }
    }
    loss /= cfg.batch;
    if (!std::isfinite(loss)) throw NumericError("dncnn training diverged");

    std::vector<ParamRef> refs;
    for (int k = 0; k < n_layers; ++k) {
      refs.push_back({net.w[k].data(), gw[k].data(), net.w[k].size()});
      refs.push_back({net.b[k].data(), gb[k].data(), net.b[k].size()});
    }
    adam_update(adam, refs, adam_cfg);

    window += loss;
    if (++window_n == cfg.epoch_steps || step == cfg.steps - 1) {
      hist.epoch_loss.push_back(window / window_n);
      window = 0;
      window_n = 0;
    }
  }
  return hist;
}

using namespace detail;

void write_dcdn(const std::string& path, const DncnnNet& net) {
  json meta{{"format", 1},
            {"layers", net.cfg.layers},
            {"channels", net.cfg.channels},
            {"sigma", net.sigma}};
  auto out = open_write(path);
  write_magic(out, "DCDN");
  write_scalar<std::uint16_t>(out, 1);
  const std::string blob = meta.dump();
  write_scalar<std::uint32_t>(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  for (int k = 0; k < net.cfg.layers; ++k) {
    write_f32_array(out, net.w[k].data(), net.w[k].size());
    write_f32_array(out, net.b[k].data(), net.b[k].size());
  }
  if (!out) throw IoError("write failed: " + path);
}

DncnnNet read_dcdn(const std::string& path) {
  auto in = open_read(path);
  expect_magic(in, "DCDN");
  if (read_scalar<std::uint16_t>(in, "version") != 1)
    throw IoError("unsupported denoiser version");
  const auto len = read_scalar<std::uint32_t>(in, "json length");
  std::string blob(len, '\0');
  in.read(blob.data(), len);
  if (!in) throw IoError("truncated denoiser metadata");
  DncnnConfig cfg;
  double sigma = 0;
  try {
    const json meta = json::parse(blob);
    cfg.layers = meta.at("layers").get<int>();
    cfg.channels = meta.at("channels").get<int>();
    sigma = meta.at("sigma").get<double>();
  } catch (const json::exception& e) {
    throw IoError(std::string("denoiser metadata invalid: ") + e.what());
  }
  DncnnNet net = make_dncnn(cfg);
  net.sigma = sigma;
  for (int k = 0; k < cfg.layers; ++k) {
    read_f32_array(in, net.w[k].data(), net.w[k].size(), "weights");
    read_f32_array(in, net.b[k].data(), net.b[k].size(), "biases");
  }
  return net;
}

}  // namespace decaf
