// decaf: intensity diffraction tomography toolkit.
//
// Subcommands cover the full loop: simulate a phantom and its measurements,
// reconstruct with the neural-field solver or the linear baseline, render
// trained weights at any density, score volumes against a reference, run the
// regularizer ablation, train the learned denoiser, and export image slices.
//
// Exit codes: 0 success, 2 configuration error (bad flags, bad config
// document), 3 I/O error (missing or malformed files), 4 numeric divergence.
// DECAF_THREADS caps the worker count (default: all hardware threads).

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "decaf/commands.hpp"
#include "decaf/errors.hpp"

namespace {

int dispatch(CLI::App& app, int argc, char** argv) {
  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    // --help/--version land here with exit code 0; real parse problems are
    // configuration errors.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const decaf::ConfigError& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return 2;
  } catch (const decaf::IoError& e) {
    std::fprintf(stderr, "error (io): %s\n", e.what());
    return 3;
  } catch (const decaf::NumericError& e) {
    std::fprintf(stderr, "error (numeric): %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intensity diffraction tomography: simulation, neural-field "
               "reconstruction, linear baseline, and tooling"};
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------------
  decaf::SimulateOpts sim;
  std::optional<double> sim_noise;
  std::optional<std::uint64_t> sim_seed;
  auto* c_sim = app.add_subcommand(
      "simulate", "generate a phantom volume and its intensity measurements");
  c_sim->add_option("--config", sim.config_path, "run configuration JSON");
  c_sim->add_option("--spec", sim.spec_path,
                    "phantom document JSON (grid/seed/count/cells)");
  c_sim->add_option("--setup", sim.setup_preset,
                    "illumination preset: dense89, annular24, multiplexed16x6, custom");
  c_sim->add_option("--noise", sim_noise,
                    "additive Gaussian noise std (0 disables noise)");
  c_sim->add_option("--seed", sim_seed, "phantom draw seed");
  c_sim->add_option("--out", sim.out_dir, "output directory");
  c_sim->callback([&] {
    sim.noise_std = sim_noise;
    sim.phantom_seed = sim_seed;
    decaf::cmd_simulate(sim);
  });

  // reconstruct ------------------------------------------------------------
  decaf::ReconstructOpts rec;
  std::optional<int> rec_iters;
  std::string rec_variant;
  auto* c_rec = app.add_subcommand(
      "reconstruct", "train the neural field against measured intensities");
  c_rec->add_option("--config", rec.config_path, "run configuration JSON")
      ->required();
  c_rec->add_option("--measurements", rec.measurements, "DCAM input override");
  c_rec->add_option("--iters", rec_iters, "iteration count override");
  c_rec->add_option("--variant", rec_variant,
                    "regularizer variant: full, AC, NR, Noreg");
  c_rec->add_option("--out", rec.out_dir, "output directory");
  c_rec->callback([&] {
    rec.iters = rec_iters;
    if (!rec_variant.empty()) rec.variant = rec_variant;
    decaf::cmd_reconstruct(rec);
  });

  // tikhonov ---------------------------------------------------------------
  decaf::TikhonovOpts tik;
  std::optional<double> tik_tau;
  auto* c_tik = app.add_subcommand(
      "tikhonov", "linear l2-regularized baseline reconstruction");
  c_tik->add_option("--config", tik.config_path, "run configuration JSON")
      ->required();
  c_tik->add_option("--measurements", tik.measurements, "DCAM input override");
  c_tik->add_option("--tau", tik_tau, "l2 weight override");
  c_tik->add_option("--out", tik.out_path, "output DCAF path")->required();
  c_tik->callback([&] {
    tik.tau = tik_tau;
    decaf::cmd_tikhonov(tik);
  });

  // render -----------------------------------------------------------------
  decaf::RenderOpts ren;
  auto* c_ren = app.add_subcommand(
      "render", "evaluate trained weights on a (possibly densified) grid");
  c_ren->add_option("--weights", ren.weights, "DCFW weight file")->required();
  c_ren->add_option("--config", ren.config_path,
                    "run configuration JSON providing the base grid");
  c_ren->add_option("--upsample", ren.upsample,
                    "per-axis density factors, e.g. 2x2x4 (default 1x1x1)");
  c_ren->add_option("--out", ren.out_path, "output DCAF path")->required();
  c_ren->callback([&] { decaf::cmd_render(ren); });

  // evaluate ---------------------------------------------------------------
  decaf::EvaluateOpts ev;
  std::optional<double> ev_peak;
  auto* c_ev = app.add_subcommand(
      "evaluate", "score an estimate against a reference volume");
  c_ev->add_option("--ref", ev.ref_path, "reference DCAF")->required();
  c_ev->add_option("--est", ev.est_path, "estimate DCAF")->required();
  c_ev->add_option("--peak", ev_peak, "psnr peak override (default: reference max)");
  c_ev->add_option("--out", ev.out_path, "metrics JSON path");
  c_ev->callback([&] {
    ev.peak = ev_peak;
    decaf::cmd_evaluate(ev);
  });

  // ablate -----------------------------------------------------------------
  decaf::AblateOpts ab;
  auto* c_ab = app.add_subcommand(
      "ablate", "run all regularizer variants plus the best-tau baseline");
  c_ab->add_option("--config", ab.config_path, "run configuration JSON")
      ->required();
  c_ab->add_option("--tau", ab.taus,
                   "baseline l2 weights to scan (repeatable; default 1e-8..1e-1)");
  c_ab->add_option("--out", ab.out_dir, "output directory");
  c_ab->callback([&] { decaf::cmd_ablate(ab); });

  // denoiser-train ---------------------------------------------------------
  decaf::DenoiserTrainOpts dn;
  auto* c_dn = app.add_subcommand(
      "denoiser-train", "train the residual CNN denoiser on procedural textures");
  c_dn->add_option("--sigma", dn.sigma, "training noise std")->required();
  c_dn->add_option("--seed", dn.seed, "initialization and sampling seed");
  c_dn->add_option("--steps", dn.steps, "optimization steps");
  c_dn->add_option("--textures", dn.textures, "training image count");
  c_dn->add_option("--size", dn.texture_size, "training image edge length");
  c_dn->add_option("--out", dn.out_path, "output DCDN path")->required();
  c_dn->callback([&] { decaf::cmd_denoiser_train(dn); });

  // export-slice -----------------------------------------------------------
  decaf::ExportSliceOpts ex;
  std::string ex_axis = "z";
  std::string ex_channel = "re";
  std::vector<int> ex_profile;
  auto* c_ex = app.add_subcommand(
      "export-slice", "cut a 2D section from a volume as PNG or CSV");
  c_ex->add_option("--volume", ex.volume, "input DCAF")->required();
  c_ex->add_option("--axis", ex_axis, "slice axis: x, y, or z (default z)");
  c_ex->add_option("--index", ex.index, "slice index along the axis");
  c_ex->add_option("--channel", ex_channel, "re or im (default re)");
  c_ex->add_option("--format", ex.format, "png or csv (default png)");
  c_ex->add_option("--profile", ex_profile,
                   "x0,y0,x1,y1 pixel endpoints: write a line profile CSV instead")
      ->delimiter(',')
      ->expected(4);
  c_ex->add_option("--out", ex.out_path, "output path")->required();
  c_ex->callback([&] {
    if (ex_axis.size() != 1) throw decaf::ConfigError("axis must be x, y, or z");
    ex.axis = ex_axis[0];
    if (ex_channel == "im")
      ex.imag_channel = true;
    else if (ex_channel == "re")
      ex.imag_channel = false;
    else
      throw decaf::ConfigError("channel must be re or im");
    if (!ex_profile.empty())
      ex.profile = std::array<int, 4>{ex_profile[0], ex_profile[1], ex_profile[2],
                                      ex_profile[3]};
    decaf::cmd_export_slice(ex);
  });

  return dispatch(app, argc, argv);
}
