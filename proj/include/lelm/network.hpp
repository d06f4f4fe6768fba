#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace lelm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using RowVec = Eigen::RowVectorXd;

/// One linear layer inside the flat parameter vector.
struct LayerShape {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index weight_offset = 0;
  Eigen::Index bias_offset = 0;
};

/// Fully-connected tanh surrogate u(x, t, phi; theta) with a single scalar output.
/// `depth` counts hidden layers; the flat vector theta stores D+1 linear maps
/// (weights then biases, layer by layer).
struct Network {
  int depth = 0;
  int width = 0;
  int input_dim = 0;
  Vec theta;
  std::vector<LayerShape> layers;

  Eigen::Map<const Mat> weight(int layer) const {
    const auto& s = layers[static_cast<size_t>(layer)];
    return {theta.data() + s.weight_offset, s.rows, s.cols};
  }
  Eigen::Map<Mat> weight(int layer) {
    const auto& s = layers[static_cast<size_t>(layer)];
    return {theta.data() + s.weight_offset, s.rows, s.cols};
  }
  Eigen::Map<const Vec> bias(int layer) const {
    const auto& s = layers[static_cast<size_t>(layer)];
    return {theta.data() + s.bias_offset, s.rows};
  }
  Eigen::Map<Vec> bias(int layer) {
    const auto& s = layers[static_cast<size_t>(layer)];
    return {theta.data() + s.bias_offset, s.rows};
  }
  int num_linear_layers() const { return depth + 1; }
};

/// Value of the surrogate together with its gradient in the network inputs.
struct EvalWithDerivs {
  double value = 0.0;
  Vec input_grad;
};

Eigen::Index network_param_count(int depth, int width, int input_dim);

/// Weights ~ U(-1,1)/sqrt(fan_in), biases zero; deterministic per seed.
Network init_network(int depth, int width, int input_dim, std::uint64_t seed);

double forward(const Network& net, const Eigen::Ref<const Vec>& input);

EvalWithDerivs forward_with_input_grad(const Network& net,
                                       const Eigen::Ref<const Vec>& input);

/// Mask over theta marking coordinates that receive weight decay
/// (weight matrices yes, biases no).
std::vector<std::uint8_t> weight_decay_mask(const Network& net);

}  // namespace lelm
