#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decaf/blocks.hpp"
#include "decaf/denoiser.hpp"
#include "decaf/loss.hpp"
#include "decaf/mlp.hpp"
#include "decaf/optics.hpp"
#include "decaf/optimize.hpp"
#include "decaf/transfer.hpp"

namespace decaf {

/// Regularization ablation variants: full keeps both weights, AC keeps only
/// axial continuity (alpha = 0), NR keeps only slice-wise noise reduction
/// (beta = 0), Noreg drops both.
enum class Variant { Full, AC, NR, Noreg };

const char* to_string(Variant v);
Variant variant_from(const std::string& name);
LossWeights apply_variant(LossWeights w, Variant v);

struct TrainConfig {
  int iters = 5000;
  int log_every = 100;
  int blocks = 1;
  int padding = 4;
  int margin = 4;       // view enlargement beyond the padded rect
  bool full_view = false;  // make every view the whole lateral grid
  AdamConfig adam;
  LossWeights weights;
  Variant variant = Variant::Full;
  AbsorptionSign sign = AbsorptionSign::Difference;
  std::uint64_t seed = 1;  // block-pick sequence

  void validate() const;
};

/// One log row. Record 0 is written before the first update and holds the
/// full-volume objective; later records hold the block-local objective of
/// the update they follow. mae is the mean absolute mismatch between the
/// forward of a fresh full render and the measurements. The residuals
/// compare the tracked partial-measurement assembly against the forward of
/// the assembled block renders (assembly) and of a fresh render (staleness).
struct LogRecord {
  int iter = 0;
  double term1 = 0, term2 = 0, term3 = 0, total = 0;
  double mae = 0;
  double lr = 0;
  double assembly_residual = 0;
  double staleness_residual = 0;
};

struct TrainResult {
  std::vector<LogRecord> history;
  double seconds = 0;
};

/// Block-wise Adam. Per iteration: pick a block uniformly at random;
/// separate its measurement target from the tracked partials; render the
/// padded block and propagate the feather-weighted embedding through the
/// view-sized forward model; update the weights from the smoothed-l1 data
/// term plus the denoiser and continuity regularizers on the raw block
/// render; re-render and refresh the tracked partial measurement.
/// Throws NumericError when the loss stops being finite.
TrainResult train_field(NeuralField& field, const Grid3D& g,
                        const OpticalSetup& setup, const MeasurementSet& y,
                        const Denoiser& den, const TrainConfig& cfg);

/// CSV with the fixed column set (iter, term1, term2, term3, total, mae, lr).
void write_training_log(const std::string& path,
                        const std::vector<LogRecord>& history);

}  // namespace decaf
