#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace decaf {

struct SimulateOpts {
  std::string config_path;  // optional; defaults apply without it
  std::string spec_path;    // optional phantom document
  std::string setup_preset; // optional preset override
  std::optional<double> noise_std;
  std::optional<std::uint64_t> phantom_seed;
  std::string out_dir;      // optional; falls back to the config's out_dir
};
void cmd_simulate(const SimulateOpts& o);

struct ReconstructOpts {
  std::string config_path;  // required
  std::string measurements; // overrides the config's measurement path
  std::string out_dir;
  std::optional<int> iters;
  std::optional<std::string> variant;
};
void cmd_reconstruct(const ReconstructOpts& o);

struct TikhonovOpts {
  std::string config_path;  // required
  std::string measurements;
  std::string out_path;     // required, DCAF
  std::optional<double> tau;
};
void cmd_tikhonov(const TikhonovOpts& o);

struct RenderOpts {
  std::string weights;      // required, DCFW
  std::string config_path;  // optional; provides the base grid
  std::string out_path;     // required, DCAF
  std::string upsample = "1x1x1";  // per-axis density factors "FXxFYxFZ"
};
void cmd_render(const RenderOpts& o);

struct EvaluateOpts {
  std::string ref_path;  // required, DCAF
  std::string est_path;  // required, DCAF
  std::string out_path;  // optional metrics JSON
  std::optional<double> peak;
};
void cmd_evaluate(const EvaluateOpts& o);

struct AblateOpts {
  std::string config_path;  // required
  std::string out_dir;
  std::vector<double> taus;  // baseline sweep; defaults to 1e-8..1e-1
};
void cmd_ablate(const AblateOpts& o);

struct DenoiserTrainOpts {
  double sigma = 0.02;
  std::uint64_t seed = 7;
  std::string out_path;  // required, DCDN
  int steps = 2000;
  int textures = 48;
  int texture_size = 96;
};
void cmd_denoiser_train(const DenoiserTrainOpts& o);

struct ExportSliceOpts {
  std::string volume;  // required, DCAF
  std::string out_path;
  char axis = 'z';
  int index = 0;
  std::string format = "png";  // png | csv
  bool imag_channel = false;
  std::optional<std::array<int, 4>> profile;  // x0,y0,x1,y1 line profile
};
void cmd_export_slice(const ExportSliceOpts& o);

}  // namespace decaf
