#include "decaf/commands.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "decaf/config.hpp"
#include "decaf/detail/binary_io.hpp"
#include "decaf/errors.hpp"
#include "decaf/export.hpp"
#include "decaf/forward.hpp"
#include "decaf/metrics.hpp"
#include "decaf/mlp.hpp"
#include "decaf/phantom.hpp"
#include "decaf/textures.hpp"
#include "decaf/tikhonov.hpp"
#include "decaf/trainer.hpp"
#include "decaf/transfer.hpp"
#include "decaf/volume_io.hpp"

namespace decaf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void ensure_parent_dir(const std::string& path) {
  ensure_dir(fs::path(path).parent_path().string());
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_json_file(const std::string& path, const json& doc) {
  auto out = detail::open_write(path);
  const std::string text = doc.dump(2);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.put('\n');
  if (!out) throw IoError("write failed: " + path);
}

/// Pooled error metrics tolerating a missing imaginary channel on one side
/// (a real-only file compares against zeros there).
std::pair<double, double> mse_mae(const PermittivityVolume& a,
                                  const PermittivityVolume& b) {
  if (a.grid.nx != b.grid.nx || a.grid.ny != b.grid.ny ||
      a.re.size() != b.re.size())
    throw ConfigError("volume dimensions differ between reference and estimate");
  double se = 0, ae = 0;
  long n = 0;
  const Slice zero = Slice::Zero(a.grid.nx, a.grid.ny);
  const bool has_im = !a.im.empty() || !b.im.empty();
  for (size_t q = 0; q < a.re.size(); ++q) {
    {
      const Slice d = a.re[q] - b.re[q];
      se += d.squaredNorm();
      ae += d.cwiseAbs().sum();
      n += d.size();
    }
    if (has_im) {
      const Slice& ai = a.im.empty() ? zero : a.im[q];
      const Slice& bi = b.im.empty() ? zero : b.im[q];
      const Slice d = ai - bi;
      se += d.squaredNorm();
      ae += d.cwiseAbs().sum();
      n += d.size();
    }
  }
  return {se / static_cast<double>(n), ae / static_cast<double>(n)};
}

json metrics_json(const PermittivityVolume& ref, const PermittivityVolume& est,
                  std::optional<double> peak_override) {
  const auto [m, a] = mse_mae(ref, est);
  const double peak = peak_override ? *peak_override : max_value(ref.re);
  const auto p = psnr_from(peak, m);
  json doc{{"mse", m},
           {"mae", a},
           {"peak", peak},
           {"identical", m == 0.0},
           {"nx", ref.grid.nx},
           {"ny", ref.grid.ny},
           {"nz", static_cast<int>(ref.re.size())}};
  if (p)
    doc["psnr_db"] = *p;
  else
    doc["psnr_db"] = nullptr;  // identical inputs: the ratio is unbounded
  return doc;
}

struct RunArtifacts {
  PermittivityVolume volume;
  TrainResult result;
};

RunArtifacts run_training(const RunConfig& cfg, const OpticalSetup& setup,
                          const MeasurementSet& y, Variant variant) {
  NeuralField field = make_field(cfg.mlp, cfg.encoding);
  const Denoiser den = cfg.make_denoiser();
  TrainConfig tc = cfg.train;
  tc.variant = variant;
  RunArtifacts out;
  out.result = train_field(field, cfg.grid, setup, y, den, tc);
  out.volume = render_volume(field, cfg.grid);
  return out;
}

}  // namespace

void cmd_simulate(const SimulateOpts& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (!o.spec_path.empty()) parse_phantom_doc(load_json_file(o.spec_path), cfg);
  if (!o.setup_preset.empty()) cfg.setup_preset = o.setup_preset;
  if (o.phantom_seed) {
    cfg.phantom_seed = *o.phantom_seed;
    cfg.cells.clear();  // a new seed asks for a fresh draw
  }
  if (o.noise_std) {
    if (*o.noise_std < 0) throw ConfigError("noise std must be >= 0");
    cfg.noise.std = *o.noise_std;
    cfg.noise.kind =
        *o.noise_std == 0 ? NoiseSpec::Kind::None : NoiseSpec::Kind::Gaussian;
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  ensure_dir(cfg.out_dir);

  const OpticalSetup setup = cfg.make_optical_setup();
  const PermittivityVolume vol = make_phantom(cfg.make_phantom_spec());
  const MeasurementSet meas = simulate_measurements(vol, setup, cfg.noise, cfg.sign);

  const std::string phantom_path = join(cfg.out_dir, "phantom.dcaf");
  const std::string meas_path = join(cfg.out_dir, "measurements.dcam");
  write_dcaf(phantom_path, vol);
  write_dcam(meas_path, meas);
  cfg.phantom_path = phantom_path;
  cfg.measurements_path = meas_path;
  write_json_file(join(cfg.out_dir, "resolved.json"), cfg.resolved());

  std::printf("simulated %d measurements (%dx%d) from %d sources on a %dx%dx%d grid\n",
              meas.count(), meas.nx, meas.ny,
              static_cast<int>(setup.sources.size()), cfg.grid.nx, cfg.grid.ny,
              cfg.grid.nz);
  std::printf("wrote %s, %s\n", phantom_path.c_str(), meas_path.c_str());
}

void cmd_reconstruct(const ReconstructOpts& o) {
  if (o.config_path.empty()) throw ConfigError("reconstruct requires --config");
  RunConfig cfg = load_run_config(o.config_path);
  if (!o.measurements.empty()) cfg.measurements_path = o.measurements;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.iters) cfg.train.iters = *o.iters;
  if (o.variant) cfg.train.variant = variant_from(*o.variant);
  if (cfg.measurements_path.empty())
    throw ConfigError("no measurements given (config paths.measurements or --measurements)");

  const MeasurementSet y = read_dcam(cfg.measurements_path);
  const OpticalSetup setup = cfg.make_optical_setup();
  ensure_dir(cfg.out_dir);

  NeuralField field = make_field(cfg.mlp, cfg.encoding);
  const Denoiser den = cfg.make_denoiser();
  const TrainResult result = train_field(field, cfg.grid, setup, y, den, cfg.train);

  const std::string weights_path = join(cfg.out_dir, "weights.dcfw");
  save_weights(weights_path, field);
  // Render from the reloaded weights so the emitted volume is bitwise
  // reproducible by `render` at the training density.
  const NeuralField saved = load_weights(weights_path);
  const PermittivityVolume vol = render_volume(saved, cfg.grid);
  const std::string volume_path = join(cfg.out_dir, "volume.dcaf");
  write_dcaf(volume_path, vol);
  write_training_log(join(cfg.out_dir, "log.csv"), result.history);
  write_json_file(join(cfg.out_dir, "resolved.json"), cfg.resolved());

  const LogRecord& last = result.history.back();
  json summary{{"iterations", cfg.train.iters},
               {"seconds", result.seconds},
               {"variant", to_string(cfg.train.variant)},
               {"denoiser", to_string(cfg.denoiser_kind)},
               {"denoiser_sigma", cfg.denoiser_sigma},
               {"final",
                {{"iter", last.iter},
                 {"term1", last.term1},
                 {"term2", last.term2},
                 {"term3", last.term3},
                 {"total", last.total},
                 {"mae", last.mae},
                 {"lr", last.lr}}}};
  if (!cfg.phantom_path.empty()) {
    const PermittivityVolume ref = read_dcaf(cfg.phantom_path);
    summary["vs_reference"] = metrics_json(ref, vol, std::nullopt);
  }
  write_json_file(join(cfg.out_dir, "summary.json"), summary);

  std::printf("trained %d iterations in %.1f s; final mae %.6g\n", cfg.train.iters,
              result.seconds, last.mae);
  std::printf("wrote %s, %s\n", weights_path.c_str(), volume_path.c_str());
}

void cmd_tikhonov(const TikhonovOpts& o) {
  if (o.config_path.empty()) throw ConfigError("tikhonov requires --config");
  if (o.out_path.empty()) throw ConfigError("tikhonov requires --out");
  RunConfig cfg = load_run_config(o.config_path);
  if (!o.measurements.empty()) cfg.measurements_path = o.measurements;
  if (o.tau) cfg.tikhonov.tau = *o.tau;
  cfg.tikhonov.validate();
  if (cfg.measurements_path.empty())
    throw ConfigError("no measurements given (config paths.measurements or --measurements)");

  const MeasurementSet y = read_dcam(cfg.measurements_path);
  const OpticalSetup setup = cfg.make_optical_setup();
  const TfStack stack = build_tf_stack(cfg.grid, setup, cfg.sign);
  const PermittivityVolume vol = tikhonov_reconstruct(stack, cfg.grid, y, cfg.tikhonov);

  ensure_parent_dir(o.out_path);
  write_dcaf(o.out_path, vol);
  write_json_file(o.out_path + ".resolved.json", cfg.resolved());
  std::printf("tikhonov (tau = %g, %s) wrote %s\n", cfg.tikhonov.tau,
              to_string(cfg.tikhonov.solver), o.out_path.c_str());
}

namespace {

std::array<int, 3> parse_upsample(const std::string& s) {
  int a = 0, b = 0, c = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%dx%dx%d%c", &a, &b, &c, &tail) != 3 || a < 1 ||
      b < 1 || c < 1)
    throw ConfigError("upsample must look like 2x2x4 (positive integer factors): " + s);
  return {a, b, c};
}

}  // namespace

void cmd_render(const RenderOpts& o) {
  if (o.weights.empty()) throw ConfigError("render requires --weights");
  if (o.out_path.empty()) throw ConfigError("render requires --out");
  const NeuralField field = load_weights(o.weights);
  const RunConfig cfg =
      o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  const auto f = parse_upsample(o.upsample);
  const Grid3D& g = cfg.grid;
  g.validate();
  // Densify each axis f-fold while keeping the physical extent and the
  // original sample locations: n -> (n-1)*f + 1 samples at pitch/f.
  const Grid3D up{(g.nx - 1) * f[0] + 1, (g.ny - 1) * f[1] + 1,
                  (g.nz - 1) * f[2] + 1, g.dx / f[0],
                  g.dy / f[1],           g.dz / f[2],
                  g.z0};
  long extrapolated = 0;
  const PermittivityVolume vol = render_volume(field, up, &extrapolated);
  ensure_parent_dir(o.out_path);
  write_dcaf(o.out_path, vol);
  json side{{"weights", o.weights},
            {"upsample", o.upsample},
            {"grid",
             {{"nx", up.nx},
              {"ny", up.ny},
              {"nz", up.nz},
              {"dx", up.dx},
              {"dy", up.dy},
              {"dz", up.dz},
              {"z0", up.z0}}},
            {"extrapolated_points", extrapolated}};
  write_json_file(o.out_path + ".resolved.json", side);
  std::printf("rendered %dx%dx%d volume to %s\n", up.nx, up.ny, up.nz,
              o.out_path.c_str());
}

void cmd_evaluate(const EvaluateOpts& o) {
  if (o.ref_path.empty() || o.est_path.empty())
    throw ConfigError("evaluate requires --ref and --est");
  const PermittivityVolume ref = read_dcaf(o.ref_path);
  const PermittivityVolume est = read_dcaf(o.est_path);
  json doc = metrics_json(ref, est, o.peak);
  doc["ref"] = o.ref_path;
  doc["est"] = o.est_path;
  if (!o.out_path.empty()) {
    ensure_parent_dir(o.out_path);
    write_json_file(o.out_path, doc);
  }
  if (doc["identical"].get<bool>())
    std::printf("identical inputs (mse = 0); psnr is undefined\n");
  else
    std::printf("psnr %.4f dB  (mse %.6g, mae %.6g, peak %.6g)\n",
                doc["psnr_db"].get<double>(), doc["mse"].get<double>(),
                doc["mae"].get<double>(), doc["peak"].get<double>());
}

void cmd_ablate(const AblateOpts& o) {
  if (o.config_path.empty()) throw ConfigError("ablate requires --config");
  RunConfig cfg = load_run_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  ensure_dir(cfg.out_dir);

  const OpticalSetup setup = cfg.make_optical_setup();
  const PermittivityVolume ref = cfg.phantom_path.empty()
                                     ? make_phantom(cfg.make_phantom_spec())
                                     : read_dcaf(cfg.phantom_path);
  const MeasurementSet y =
      cfg.measurements_path.empty()
          ? simulate_measurements(ref, setup, cfg.noise, cfg.sign)
          : read_dcam(cfg.measurements_path);
  const double peak = max_value(ref.re);

  // Baseline: scan the l2 weight and keep the best reconstruction.
  std::vector<double> taus = o.taus;
  if (taus.empty())  // decades spanning both the consistent and noisy regimes
    for (double t = 1e-8; t < 2e2; t *= 10) taus.push_back(t);
  const TfStack stack = build_tf_stack(cfg.grid, setup, cfg.sign);
  json tau_rows = json::array();
  double best_tau = taus.front();
  double best_psnr = -std::numeric_limits<double>::infinity();
  double best_mse = std::numeric_limits<double>::infinity();
  PermittivityVolume best_vol;
  for (double tau : taus) {
    TikhonovConfig tc = cfg.tikhonov;
    tc.tau = tau;
    const PermittivityVolume vol = tikhonov_reconstruct(stack, cfg.grid, y, tc);
    const auto [m, a] = mse_mae(ref, vol);
    const double p = psnr_from(peak, m).value_or(
        std::numeric_limits<double>::infinity());
    tau_rows.push_back({{"tau", tau}, {"mse", m}, {"psnr_db", p}});
    std::printf("tikhonov tau %-8g psnr %8.4f dB\n", tau, p);
    if (p > best_psnr) {
      best_psnr = p;
      best_mse = m;
      best_tau = tau;
      best_vol = vol;
    }
  }
  write_dcaf(join(cfg.out_dir, "tikhonov.dcaf"), best_vol);

  const Variant variants[] = {Variant::Full, Variant::AC, Variant::NR,
                              Variant::Noreg};
  json variant_rows = json::object();
  std::string csv = "run,psnr_db,mse,seconds\n";
  char line[160];
  for (Variant v : variants) {
    const RunArtifacts run = run_training(cfg, setup, y, v);
    const char* name = to_string(v);
    write_dcaf(join(cfg.out_dir, std::string("volume_") + name + ".dcaf"),
               run.volume);
    write_training_log(join(cfg.out_dir, std::string("log_") + name + ".csv"),
                       run.result.history);
    const auto [m, a] = mse_mae(ref, run.volume);
    const double p = psnr_from(peak, m).value_or(
        std::numeric_limits<double>::infinity());
    variant_rows[name] = {{"psnr_db", p},
                          {"mse", m},
                          {"mae", a},
                          {"seconds", run.result.seconds},
                          {"iterations", cfg.train.iters}};
    std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.3f\n", name, p, m,
                  run.result.seconds);
    csv += line;
    std::printf("variant %-5s psnr %8.4f dB  (%.1f s)\n", name, p,
                run.result.seconds);
  }
  std::snprintf(line, sizeof line, "tikhonov-best,%.17g,%.17g,\n", best_psnr,
                best_mse);
  csv += line;

  {
    auto out = detail::open_write(join(cfg.out_dir, "ablation.csv"));
    out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    if (!out) throw IoError("write failed: ablation.csv");
  }
  json doc{{"peak", peak},
           {"variants", variant_rows},
           {"tikhonov",
            {{"sweep", tau_rows}, {"tau_best", best_tau}, {"psnr_db", best_psnr}}}};
  write_json_file(join(cfg.out_dir, "ablation.json"), doc);
  write_json_file(join(cfg.out_dir, "resolved.json"), cfg.resolved());
  std::printf("ablation table written to %s\n",
              join(cfg.out_dir, "ablation.json").c_str());
}

void cmd_denoiser_train(const DenoiserTrainOpts& o) {
  if (o.out_path.empty()) throw ConfigError("denoiser-train requires --out");
  if (!(o.sigma > 0)) throw ConfigError("--sigma must be positive");
  if (o.steps < 1 || o.textures < 1 || o.texture_size < 16)
    throw ConfigError("denoiser training needs steps >= 1, textures >= 1, size >= 16");

  const std::vector<Slice> clean =
      make_texture_dataset(o.textures, o.texture_size, o.seed + 1000);
  DncnnNet net = make_dncnn(DncnnConfig{10, 16, o.seed});
  DncnnTrainConfig tc;
  tc.steps = o.steps;
  tc.sigma = o.sigma;
  tc.seed = o.seed;
  const DncnnHistory hist = train_dncnn(net, clean, tc);

  ensure_parent_dir(o.out_path);
  write_dcdn(o.out_path, net);
  json side{{"sigma", o.sigma},
            {"seed", o.seed},
            {"steps", o.steps},
            {"textures", o.textures},
            {"texture_size", o.texture_size},
            {"epoch_loss", hist.epoch_loss}};
  write_json_file(o.out_path + ".resolved.json", side);
  std::printf("trained residual denoiser (sigma %g): epoch loss %.6g -> %.6g\n",
              o.sigma, hist.epoch_loss.front(), hist.epoch_loss.back());
  std::printf("wrote %s\n", o.out_path.c_str());
}

void cmd_export_slice(const ExportSliceOpts& o) {
  if (o.volume.empty()) throw ConfigError("export-slice requires --volume");
  if (o.out_path.empty()) throw ConfigError("export-slice requires --out");
  const PermittivityVolume vol = read_dcaf(o.volume);
  const Slice img = extract_slice(vol, o.axis, o.index, o.imag_channel);
  ensure_parent_dir(o.out_path);
  if (o.profile) {
    const auto& p = *o.profile;
    write_profile_csv(o.out_path, img, p[0], p[1], p[2], p[3]);
    std::printf("wrote line profile %s\n", o.out_path.c_str());
    return;
  }
  if (o.format == "png") {
    write_png16(o.out_path, img, img.minCoeff(), img.maxCoeff());
  } else if (o.format == "csv") {
    write_slice_csv(o.out_path, img);
  } else {
    throw ConfigError("unknown export format (use png or csv): " + o.format);
  }
  std::printf("wrote %s (%ldx%ld, %s channel)\n", o.out_path.c_str(),
              static_cast<long>(img.rows()), static_cast<long>(img.cols()),
              o.imag_channel ? "imaginary" : "real");
}

}  // namespace decaf
