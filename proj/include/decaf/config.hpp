#pragma once

#include <json.hpp>
#include <string>

#include "decaf/denoiser.hpp"
#include "decaf/grid.hpp"
#include "decaf/mlp.hpp"
#include "decaf/phantom.hpp"
#include "decaf/tikhonov.hpp"
#include "decaf/trainer.hpp"

namespace decaf {

/// One JSON document configuring a whole run. Every key is optional and
/// defaulted; unknown keys anywhere in the document are rejected.
struct RunConfig {
  Grid3D grid{64, 64, 8, 0.1625, 0.1625, 0.5, -1.75};

  // Illumination. `setup_preset` may be "custom", in which case `sources`
  // (and optionally `source_groups`) define the setup directly.
  std::string setup_preset = "annular24";
  double lambda = 0.515, na = 0.65, n0 = 1.0;
  SetupGeometry geometry;
  std::vector<IlluminationSource> sources;          // custom setups only
  std::vector<std::vector<int>> source_groups;      // custom setups only
  AbsorptionSign sign = AbsorptionSign::Difference;

  std::uint64_t phantom_seed = 11;
  int phantom_count = 10;
  double phantom_amp_re = 0.155625;  // contrast of n = 1.075 over n0 = 1
  double phantom_amp_im = 0.0;
  double phantom_softness = 0.25;
  std::vector<Ellipsoid> cells;  // explicit cells override the seeded soup

  NoiseSpec noise;
  // Two radial rotations spread over a quarter turn unless configured.
  EncodingConfig encoding{.thetas = {0.0, EIGEN_PI / 4.0}};
  MlpConfig mlp;
  TrainConfig train;  // loss weights, partition, schedule, variant, seed

  DenoiserKind denoiser_kind = DenoiserKind::Identity;
  double denoiser_sigma = 0.02;
  std::string denoiser_weights;  // DCDN path for the cnn kind

  TikhonovConfig tikhonov;

  std::string out_dir = "out";
  std::string measurements_path;  // optional DCAM input override
  std::string phantom_path;       // optional DCAF reference override

  OpticalSetup make_optical_setup() const;
  PhantomSpec make_phantom_spec() const;
  Denoiser make_denoiser() const;  // reads DCDN weights for the cnn kind

  /// Fully-populated document (all defaults materialized); parses back to
  /// an equivalent config.
  nlohmann::json resolved() const;
};

RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

/// Parses a phantom-only document ({grid, seed, count, amp_re, amp_im,
/// softness, cells}) into the corresponding RunConfig fields.
void parse_phantom_doc(const nlohmann::json& doc, RunConfig& cfg);
nlohmann::json load_json_file(const std::string& path);

}  // namespace decaf
