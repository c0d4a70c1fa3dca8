#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "decaf/volume.hpp"

namespace decaf {

/// Residual denoising CNN: `layers` 3x3 convolutions with reflective
/// padding; every layer but the last is ReLU-activated. Channel counts run
/// 1 -> channels -> ... -> channels -> 1 and the network predicts the noise
/// map, so each output pixel sees a (2*layers + 1)-wide input window.
struct DncnnConfig {
  int layers = 10;
  int channels = 16;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Layer k maps c_in feature maps to c_out via w[k]: (9*c_in) x c_out in
/// im2col layout (column t = tap*c_in + c ordering documented at im2col).
struct DncnnNet {
  DncnnConfig cfg;
  double sigma = 0;  // noise std the net was trained at (intensity units)
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
};

/// He-initialized weights (N(0, 2/(9*c_in))), zero biases.
DncnnNet make_dncnn(const DncnnConfig& cfg);

/// Predicted noise map of a single-channel image.
Slice dncnn_residual(const DncnnNet& net, const Slice& img);

struct DncnnTrainConfig {
  int steps = 2000;
  int batch = 8;
  int patch = 40;
  int epoch_steps = 100;      // history granularity
  double lr0 = 1e-3;
  double decay = 0.1;         // lr = lr0 * decay^(step/steps)
  double sigma = 0.02;        // noise std in intensity units
  std::uint64_t seed = 7;
};

struct DncnnHistory {
  std::vector<double> epoch_loss;  // mean per-batch loss per epoch
};

/// Trains the residual net on clean textures with fresh Gaussian noise per
/// step. The loss is the per-pixel mean of squared plus absolute residual
/// error, so thresholds are independent of patch and batch sizes.
DncnnHistory train_dncnn(DncnnNet& net, const std::vector<Slice>& clean,
                         const DncnnTrainConfig& cfg);

/// Denoiser weight container, magic "DCDN": u16 version, u32 JSON length,
/// JSON {layers, channels, sigma}, then f32 tensors W0, b0, W1, b1, ...
void write_dcdn(const std::string& path, const DncnnNet& net);
DncnnNet read_dcdn(const std::string& path);

}  // namespace decaf
