#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "decaf/encoding.hpp"
#include "decaf/grid.hpp"
#include "decaf/optimize.hpp"
#include "decaf/volume.hpp"

namespace decaf {

/// Fully-connected coordinate network: `layers` levels in total, the first
/// layers-1 of width `width` with leaky-ReLU activation, the last one
/// linear with out_dim outputs. The layer at 1-based index floor(layers/2)
/// receives the encoded features concatenated to its input (skip link).
struct MlpConfig {
  int layers = 6;
  int width = 64;
  int out_dim = 2;
  double leaky_slope = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
};

struct NeuralField {
  MlpConfig cfg;
  Encoder enc;
  std::vector<Eigen::MatrixXd> w;      // w[k]: fan_in x fan_out
  std::vector<Eigen::RowVectorXd> b;

  /// 0-based index of the layer whose input is [h, features]; -1 when the
  /// skip would target the first layer (its input already is the features).
  [[nodiscard]] int skip_index() const {
    const int s = cfg.layers / 2 - 1;
    return s <= 0 ? -1 : s;
  }
  [[nodiscard]] std::vector<ParamRef> params(const std::vector<Eigen::MatrixXd>& gw,
                                             const std::vector<Eigen::RowVectorXd>& gb);
};

/// Weights drawn from N(0, 2/fan_in) (He fan-in scaling, column-major draw
/// order from one mt19937_64), biases zero.
NeuralField make_field(const MlpConfig& cfg, const EncodingConfig& enc_cfg);

/// Forward-pass intermediates needed by the backward pass.
struct MlpCache {
  Eigen::MatrixXd input;             // n x features
  Eigen::MatrixXd skip;              // n x (width + features), empty if unused
  std::vector<Eigen::MatrixXd> h;    // post-activation output of each layer
};

/// Batch forward pass; rows are independent samples.
Eigen::MatrixXd mlp_forward(const NeuralField& f, const Eigen::MatrixXd& features,
                            MlpCache* cache = nullptr);

struct MlpGrads {
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::RowVectorXd> b;
};

/// Reverse pass: d_out is dLoss/dOutput for the cached batch.
MlpGrads mlp_backward(const NeuralField& f, const MlpCache& cache,
                      const Eigen::MatrixXd& d_out);

/// Normalized coordinates of a lateral sub-rectangle across all slices.
/// Row order: z outermost, then y, then x - matching slice memory order.
Eigen::Matrix<double, Eigen::Dynamic, 3> rect_coords(const Grid3D& g, int x0,
                                                     int y0, int w, int h);

/// Reshapes network outputs (rows ordered as rect_coords) into a volume of
/// lateral size w x h; grid metadata is copied from `like`.
PermittivityVolume rows_to_volume(const Eigen::MatrixXd& out, const Grid3D& like,
                                  int w, int h);
Eigen::MatrixXd volume_to_rows(const PermittivityVolume& v);

/// Renders the field over a full grid. Any coordinate outside [-1, 1]^3
/// counts as extrapolation (never happens for plain grid renders, which
/// span the cube exactly).
PermittivityVolume render_volume(const NeuralField& f, const Grid3D& g,
                                 long* extrapolated = nullptr);

/// Weight container, magic "DCFW": u16 version, u32 JSON length, a JSON
/// block describing encoder and layer shapes (including the exact Gaussian
/// projection), then f32 tensors W0, b0, W1, b1, ... (W in column-major
/// storage order). Weights quantize to f32 on the first save; a load/save
/// cycle after that is byte-stable.
void save_weights(const std::string& path, const NeuralField& f);
NeuralField load_weights(const std::string& path);

}  // namespace decaf
