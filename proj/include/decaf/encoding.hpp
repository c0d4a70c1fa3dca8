#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "decaf/errors.hpp"

namespace decaf {

enum class EncodingKind { Positional, Radial, Gaussian };

/// Feature map configuration for normalized coordinates in [-1, 1]^3.
/// The x-y pair is lifted by `kind`; z is always positionally encoded with
/// l_z frequencies and appended after the lateral features.
struct EncodingConfig {
  EncodingKind kind = EncodingKind::Radial;
  int l_xy = 4;                   // lateral frequencies (positional/radial)
  int l_z = 4;                    // axial frequencies
  std::vector<double> thetas;     // radial rotation angles (K of them)
  int gaussian_rows = 32;         // rows of the random projection
  double gaussian_scale = 1.0;    // std of the projection entries
  std::uint64_t seed = 1;         // projection seed

  void validate() const;
};

/// Immutable encoder. For Gaussian encodings, `b` holds the seeded random
/// projection (rows x 2, i.i.d. normal entries scaled by gaussian_scale,
/// drawn row-major from an mt19937_64).
struct Encoder {
  EncodingConfig cfg;
  Eigen::MatrixXd b;

  [[nodiscard]] int lateral_dim() const;
  [[nodiscard]] int dim() const { return lateral_dim() + 2 * cfg.l_z; }
};

Encoder make_encoder(const EncodingConfig& cfg);

/// Single-axis positional features, frequency-major:
///   (sin(2^l * pi * t), cos(2^l * pi * t)) for l = 0..L-1.
Eigen::VectorXd positional_encode(double t, int l_max);

/// Full feature vector of one normalized coordinate.
///
/// Radial lateral features rotate (x, y) by each angle theta_k (x' =
/// cos*x - sin*y, y' = sin*x + cos*y) and positionally encode the rotated
/// pair; the layout is rotation-major, then coordinate, then frequency,
/// then (sin, cos) - which makes K=1, theta=0 coincide with
/// positional(x) ++ positional(y) bit for bit.
///
/// Gaussian lateral features are (sin(2*pi*Bv), cos(2*pi*Bv)): all sines,
/// then all cosines.
Eigen::VectorXd encode(const Encoder& enc, const Eigen::Vector3d& c);

/// Row-per-coordinate batch encoding; rows follow the input order.
Eigen::MatrixXd encode_batch(const Encoder& enc,
                             const Eigen::Matrix<double, Eigen::Dynamic, 3>& coords);

const char* to_string(EncodingKind k);
EncodingKind encoding_kind_from(const std::string& name);

}  // namespace decaf
