#include "decaf/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <random>

#include "decaf/detail/binary_io.hpp"
#include "decaf/errors.hpp"
#include "decaf/metrics.hpp"

namespace decaf {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::AC: return "AC";
    case Variant::NR: return "NR";
    case Variant::Noreg: return "Noreg";
  }
  return "?";
}

Variant variant_from(const std::string& name) {
  if (name == "full") return Variant::Full;
  if (name == "AC") return Variant::AC;
  if (name == "NR") return Variant::NR;
  if (name == "Noreg") return Variant::Noreg;
  throw ConfigError("unknown variant: " + name);
}

LossWeights apply_variant(LossWeights w, Variant v) {
  if (v == Variant::AC || v == Variant::Noreg) w.alpha = 0;
  if (v == Variant::NR || v == Variant::Noreg) w.beta = 0;
  return w;
}

void TrainConfig::validate() const {
  if (iters < 0) throw ConfigError("iteration count must be nonnegative");
  if (log_every < 1) throw ConfigError("log interval must be positive");
  if (blocks < 1) throw ConfigError("block count must be positive");
  if (padding < 0 || margin < 0) throw ConfigError("padding and margin must be nonnegative");
  if (!(adam.lr0 > 0) || !(adam.decay > 0) || !(adam.period > 0))
    throw ConfigError("learning-rate schedule must be positive");
  weights.validate();
}

namespace {

Grid3D sub_grid(const Grid3D& g, const Rect& r) {
  Grid3D out = g;
  out.nx = r.w;
  out.ny = r.h;
  return out;
}

double frob_norm(const MeasurementSet& m) {
  double s = 0;
  for (const auto& img : m.images) s += img.squaredNorm();
  return std::sqrt(s);
}

double frob_dist(const MeasurementSet& a, const MeasurementSet& b) {
  double s = 0;
  for (size_t p = 0; p < a.images.size(); ++p)
    s += (a.images[p] - b.images[p]).squaredNorm();
  return std::sqrt(s);
}

double rel_residual(const MeasurementSet& got, const MeasurementSet& want) {
  const double num = frob_dist(got, want);
  const double den = frob_norm(want);
  if (den == 0) return num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

}  // namespace

TrainResult train_field(NeuralField& field, const Grid3D& g,
                        const OpticalSetup& setup, const MeasurementSet& y,
                        const Denoiser& den, const TrainConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  cfg.validate();
  g.validate();
  setup.validate();
  if (y.count() != setup.measurement_count() || y.nx != g.nx || y.ny != g.ny)
    throw ConfigError("measurements do not match setup and grid");
  const LossWeights w = apply_variant(cfg.weights, cfg.variant);
  const int nb = cfg.blocks;
  const int p_count = y.count();

  const BlockPartition part =
      partition_blocks(g, nb, cfg.padding, cfg.margin, cfg.full_view);
  const auto full_stack =
      std::make_shared<const TfStack>(build_tf_stack(g, setup, cfg.sign));

  // One transfer-function stack per distinct view size; views as large as
  // the whole lateral grid share the full stack.
  std::map<std::pair<int, int>, std::shared_ptr<const TfStack>> stack_by_size;
  stack_by_size[{g.nx, g.ny}] = full_stack;

  std::vector<const TfStack*> view_stack(nb);
  std::vector<Grid3D> pad_grid(nb), view_grid(nb);
  std::vector<Eigen::MatrixXd> features(nb);
  std::vector<MlpCache> cache(nb);
  std::vector<MeasurementSet> psi(nb);
  std::vector<PermittivityVolume> tracked(nb);
  for (int i = 0; i < nb; ++i) {
    const Block& blk = part.blocks[i];
    pad_grid[i] = sub_grid(g, blk.padded);
    view_grid[i] = sub_grid(g, blk.view);
    auto key = std::make_pair(blk.view.w, blk.view.h);
    auto [it, fresh] = stack_by_size.try_emplace(key, nullptr);
    if (fresh)
      it->second = std::make_shared<const TfStack>(
          build_tf_stack(view_grid[i], setup, cfg.sign));
    view_stack[i] = it->second.get();
    features[i] = encode_batch(
        field.enc, rect_coords(g, blk.padded.x0, blk.padded.y0, blk.padded.w,
                               blk.padded.h));
    psi[i] = MeasurementSet::zeros(p_count, blk.view.w, blk.view.h);
    tracked[i] = PermittivityVolume::zeros(pad_grid[i], true);
  }

  // Renders the padded block from cached features and embeds its feathered
  // weighting into a view-sized volume.
  const auto render_block = [&](int i, PermittivityVolume* x_view) {
    const Eigen::MatrixXd out = mlp_forward(field, features[i], &cache[i]);
    PermittivityVolume x_pad = rows_to_volume(out, pad_grid[i], part.blocks[i].padded.w,
                                              part.blocks[i].padded.h);
    if (x_view) {
      *x_view = PermittivityVolume::zeros(view_grid[i], true);
      add_weighted_block(*x_view, part.blocks[i].view, x_pad,
                         part.blocks[i].feather, part.blocks[i].padded);
    }
    return x_pad;
  };

  // Supplement-style measurement separation: subtract every other block's
  // tracked partial measurement from the full stack, then crop to the view.
  // A lone block receives an untouched copy of the measurements.
  const auto separate = [&](int i) {
    MeasurementSet resid = y;
    for (int j = 0; j < nb; ++j) {
      if (j == i) continue;
      for (int p = 0; p < p_count; ++p) {
        const Rect& v = part.blocks[j].view;
        resid.images[p].block(v.x0, v.y0, v.w, v.h) -= psi[j].images[p];
      }
    }
    return crop(resid, part.blocks[i].view);
  };

  const auto psi_assembly = [&]() {
    MeasurementSet sum = MeasurementSet::zeros(p_count, g.nx, g.ny);
    for (int i = 0; i < nb; ++i) embed_add(sum, part.blocks[i].view, psi[i]);
    return sum;
  };

  TrainResult result;
  std::mt19937_64 block_rng(cfg.seed);
  std::uniform_int_distribution<int> pick(0, nb - 1);
  AdamState adam;

  const auto log_record = [&](int iter, const LossBreakdown& loss, double lr) {
    LogRecord rec;
    rec.iter = iter;
    rec.term1 = loss.term1;
    rec.term2 = loss.term2;
    rec.term3 = loss.term3;
    rec.total = loss.total;
    rec.lr = lr;
    const PermittivityVolume fresh = render_volume(field, g);
    const MeasurementSet pred = forward(*full_stack, fresh);
    rec.mae = mae(pred.images, y.images);
    const MeasurementSet assembly = psi_assembly();
    rec.assembly_residual = rel_residual(
        assembly, forward(*full_stack, assemble_volume(g, part, tracked)));
    rec.staleness_residual = rel_residual(assembly, pred);
    result.history.push_back(rec);
  };

  {
    const PermittivityVolume start = render_volume(field, g);
    log_record(0, total_loss(*full_stack, y, start, den, w), adam_lr(cfg.adam, 0));
  }

  for (int iter = 1; iter <= cfg.iters; ++iter) {
    const int i = pick(block_rng);
    const Block& blk = part.blocks[i];

    PermittivityVolume x_view;
    const PermittivityVolume x_pad = render_block(i, &x_view);
    const MeasurementSet pred = forward(*view_stack[i], x_view);
    const MeasurementSet y_i = separate(i);

    MeasurementSet g_meas;
    LossBreakdown loss;
    loss.term1 = data_term(pred, y_i, w.charbonnier_eps, &g_meas);

    const PermittivityVolume g_view = adjoint(*view_stack[i], g_meas, view_grid[i]);
    PermittivityVolume g_pad = PermittivityVolume::zeros(pad_grid[i], true);
    const int ox = blk.padded.x0 - blk.view.x0;
    const int oy = blk.padded.y0 - blk.view.y0;
    for (int q = 0; q < g.nz; ++q) {
      g_pad.re[q] = blk.feather.cwiseProduct(
          g_view.re[q].block(ox, oy, blk.padded.w, blk.padded.h));
      g_pad.im[q] = blk.feather.cwiseProduct(
          g_view.im[q].block(ox, oy, blk.padded.w, blk.padded.h));
    }
    loss.term2 = denoise_term(x_pad, den, w.alpha, &g_pad);
    loss.term3 = continuity_term(x_pad, w.charbonnier_eps, w.beta, &g_pad);
    loss.total = loss.term1 + w.alpha * loss.term2 + w.beta * loss.term3;
    if (!std::isfinite(loss.total))
      throw NumericError("training loss became non-finite at iteration " +
                         std::to_string(iter));

    const MlpGrads grads = mlp_backward(field, cache[i], volume_to_rows(g_pad));
    const double lr_used = adam_lr(cfg.adam, adam.step);
    adam_update(adam, field.params(grads.w, grads.b), cfg.adam);

    PermittivityVolume x_view_new;
    tracked[i] = render_block(i, &x_view_new);
    psi[i] = forward(*view_stack[i], x_view_new);

    if (iter % cfg.log_every == 0 || iter == cfg.iters)
      log_record(iter, loss, lr_used);
  }

  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

void write_training_log(const std::string& path,
                        const std::vector<LogRecord>& history) {
  auto out = detail::open_write(path);
  out << "iter,term1,term2,term3,total,mae,lr\n";
  char line[256];
  for (const auto& r : history) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.iter, r.term1, r.term2, r.term3, r.total, r.mae, r.lr);
    out << line;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace decaf
