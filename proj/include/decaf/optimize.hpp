#pragma once

#include <Eigen/Core>
#include <vector>

namespace decaf {

/// Adam with bias correction and exponential learning-rate decay:
/// the update at 0-based step t uses lr0 * decay^(t/period).
struct AdamConfig {
  double lr0 = 1e-3;
  double decay = 1.0;
  double period = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

double adam_lr(const AdamConfig& cfg, long step);

/// One trainable span and the gradient to apply to it.
struct ParamRef {
  double* value = nullptr;
  const double* grad = nullptr;
  long n = 0;
};

struct AdamState {
  std::vector<Eigen::VectorXd> m, v;
  long step = 0;  // completed updates
};

/// In-place update of every span. Spans must keep count, order, and sizes
/// across calls; moments are allocated on first use.
void adam_update(AdamState& state, const std::vector<ParamRef>& params,
                 const AdamConfig& cfg);

}  // namespace decaf
