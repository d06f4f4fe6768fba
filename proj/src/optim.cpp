#include "lelm/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lelm {

OptimState init_optim(Eigen::Index n, std::vector<std::uint8_t> decay_mask,
                      double base_lr, std::vector<std::int64_t> milestones) {
  if (!decay_mask.empty() && decay_mask.size() != static_cast<size_t>(n))
    throw std::invalid_argument("init_optim: decay mask length mismatch");
  OptimState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  s.base_lr = base_lr;
  s.milestones = std::move(milestones);
  if (decay_mask.empty()) decay_mask.assign(static_cast<size_t>(n), 1);
  s.decay_mask = std::move(decay_mask);
  return s;
}

double lr_at(const OptimState& state, std::int64_t epoch) {
  double lr = state.base_lr;
  for (auto milestone : state.milestones)
    if (milestone <= epoch) lr *= state.decay_factor;
  return lr;
}

void step(OptimState& state, Eigen::VectorXd& params,
          const Eigen::VectorXd& grads, std::int64_t epoch) {
  const Eigen::Index n = params.size();
  if (grads.size() != n || state.m.size() != n)
    throw std::invalid_argument("step: size mismatch between params, grads and state");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!std::isfinite(grads(i)))
      throw std::runtime_error("step: non-finite gradient at index " +
                               std::to_string(i));

  const double lr = lr_at(state, epoch);
  if (state.weight_decay != 0.0) {
    const double shrink = 1.0 - lr * state.weight_decay;
    for (Eigen::Index i = 0; i < n; ++i)
      if (state.decay_mask[static_cast<size_t>(i)]) params(i) *= shrink;
  }

  ++state.step_count;
  const double k = static_cast<double>(state.step_count);
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v.array() +
            (1.0 - state.beta2) * grads.array().square();
  const double bc1 = 1.0 - std::pow(state.beta1, k);
  const double bc2 = 1.0 - std::pow(state.beta2, k);
  params.array() -= lr * (state.m.array() / bc1) /
                    ((state.v.array() / bc2).sqrt() + state.eps);
}

}  // namespace lelm
