#include "decaf/loss.hpp"

#include <cmath>

#include "decaf/errors.hpp"

namespace decaf {

void LossWeights::validate() const {
  if (alpha < 0 || beta < 0) throw ConfigError("loss weights must be nonnegative");
  if (!(charbonnier_eps > 0)) throw ConfigError("charbonnier smoothing must be positive");
}

double data_term(const MeasurementSet& pred, const MeasurementSet& target,
                 double eps, MeasurementSet* grad) {
  if (pred.count() != target.count() || pred.nx != target.nx || pred.ny != target.ny)
    throw ConfigError("measurement shapes differ in data term");
  if (grad) *grad = MeasurementSet::zeros(pred.count(), pred.nx, pred.ny);
  const double e2 = eps * eps;
  double sum = 0;
  for (size_t p = 0; p < pred.images.size(); ++p) {
    const Slice r = pred.images[p] - target.images[p];
    const Slice smooth = (r.array().square() + e2).sqrt().matrix();
    sum += smooth.sum();
    if (grad) grad->images[p] = r.cwiseQuotient(smooth);
  }
  return sum;
}

double denoise_term(const PermittivityVolume& x, const Denoiser& d,
                    double alpha, PermittivityVolume* grad) {
  if (d.kind == DenoiserKind::Identity) return 0.0;
  double sum = 0;
  const auto channel = [&](const std::vector<Slice>& slices, std::vector<Slice>* gch) {
    for (size_t q = 0; q < slices.size(); ++q) {
      const Slice r = slices[q] - denoise(d, slices[q]);
      sum += r.squaredNorm();
      if (gch) (*gch)[q] += alpha * 2.0 * r;
    }
  };
  channel(x.re, grad ? &grad->re : nullptr);
  if (x.complex_pair()) channel(x.im, grad && grad->complex_pair() ? &grad->im : nullptr);
  return sum;
}

double continuity_term(const PermittivityVolume& x, double eps, double beta,
                       PermittivityVolume* grad) {
  const double e2 = eps * eps;
  double sum = 0;
  const auto channel = [&](const std::vector<Slice>& slices, std::vector<Slice>* gch) {
    for (size_t j = 1; j < slices.size(); ++j) {
      const Slice diff = slices[j] - slices[j - 1];
      const Slice smooth = (diff.array().square() + e2).sqrt().matrix();
      sum += smooth.sum();
      if (gch) {
        const Slice dd = beta * diff.cwiseQuotient(smooth);
        (*gch)[j] += dd;
        (*gch)[j - 1] -= dd;
      }
    }
  };
  channel(x.re, grad ? &grad->re : nullptr);
  if (x.complex_pair()) channel(x.im, grad && grad->complex_pair() ? &grad->im : nullptr);
  return sum;
}

LossBreakdown total_loss(const TfStack& stack, const MeasurementSet& y,
                         const PermittivityVolume& x, const Denoiser& d,
                         const LossWeights& w) {
  LossBreakdown out;
  const MeasurementSet pred = forward(stack, x);
  out.term1 = data_term(pred, y, w.charbonnier_eps, nullptr);
  out.term2 = denoise_term(x, d, w.alpha, nullptr);
  out.term3 = continuity_term(x, w.charbonnier_eps, w.beta, nullptr);
  out.total = out.term1 + w.alpha * out.term2 + w.beta * out.term3;
  return out;
}

}  // namespace decaf
