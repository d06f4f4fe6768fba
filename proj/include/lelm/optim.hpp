#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lelm {

/// AdamW state over a flat trainable vector (network parameters possibly
/// followed by shock-speed coordinates).  Weight decay is applied only where
/// `decay_mask` is set; biases and shock speeds stay decay-free.
struct OptimState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  std::int64_t step_count = 0;
  double base_lr = 0.01;
  std::vector<std::int64_t> milestones;  // epochs after which lr /= 10
  double decay_factor = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
  std::vector<std::uint8_t> decay_mask;
};

OptimState init_optim(Eigen::Index n, std::vector<std::uint8_t> decay_mask,
                      double base_lr = 0.01,
                      std::vector<std::int64_t> milestones = {});

/// base_lr * decay_factor^(number of milestones <= epoch)
double lr_at(const OptimState& state, std::int64_t epoch);

/// One AdamW update in place: decoupled decay on masked coordinates, then the
/// bias-corrected Adam step with learning rate lr_at(state, epoch).
void step(OptimState& state, Eigen::VectorXd& params,
          const Eigen::VectorXd& grads, std::int64_t epoch);

}  // namespace lelm
