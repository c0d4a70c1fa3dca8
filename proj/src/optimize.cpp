#include "decaf/optimize.hpp"

#include <cmath>

#include "decaf/errors.hpp"

namespace decaf {

double adam_lr(const AdamConfig& cfg, long step) {
  return cfg.lr0 * std::pow(cfg.decay, static_cast<double>(step) / cfg.period);
}

void adam_update(AdamState& state, const std::vector<ParamRef>& params,
                 const AdamConfig& cfg) {
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
      state.m[i] = Eigen::VectorXd::Zero(params[i].n);
      state.v[i] = Eigen::VectorXd::Zero(params[i].n);
    }
  }
  if (state.m.size() != params.size())
    throw ConfigError("adam state does not match the parameter list");

  const double lr = adam_lr(cfg, state.step);
  const long t = state.step + 1;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    if (state.m[i].size() != p.n)
      throw ConfigError("adam parameter span changed size");
    Eigen::Map<Eigen::VectorXd> x(p.value, p.n);
    Eigen::Map<const Eigen::VectorXd> g(p.grad, p.n);
    auto& m = state.m[i];
    auto& v = state.v[i];
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    x.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg.eps);
  }
  ++state.step;
}

}  // namespace decaf
