#include "lelm/network.hpp"

#include "lelm/autodiff.hpp"

#include <random>
#include <stdexcept>

namespace lelm {

namespace {

std::vector<LayerShape> make_layout(int depth, int width, int input_dim) {
  std::vector<LayerShape> layers;
  layers.reserve(static_cast<size_t>(depth) + 1);
  Eigen::Index off = 0;
  int fan_in = input_dim;
  for (int l = 0; l < depth; ++l) {
    LayerShape s;
    s.rows = width;
    s.cols = fan_in;
    s.weight_offset = off;
    off += s.rows * s.cols;
    s.bias_offset = off;
    off += s.rows;
    layers.push_back(s);
    fan_in = width;
  }
  LayerShape out;
  out.rows = 1;
  out.cols = fan_in;
  out.weight_offset = off;
  off += out.cols;
  out.bias_offset = off;
  layers.push_back(out);
  return layers;
}

}  // namespace

Eigen::Index network_param_count(int depth, int width, int input_dim) {
  Eigen::Index n = 0;
  int fan_in = input_dim;
  for (int l = 0; l < depth; ++l) {
    n += static_cast<Eigen::Index>(width) * fan_in + width;
    fan_in = width;
  }
  return n + fan_in + 1;
}

Network init_network(int depth, int width, int input_dim, std::uint64_t seed) {
  if (depth < 1 || width < 1 || input_dim < 2)
    throw std::invalid_argument("init_network: need depth >= 1, width >= 1, input_dim >= 2");
  Network net;
  net.depth = depth;
  net.width = width;
  net.input_dim = input_dim;
  net.layers = make_layout(depth, width, input_dim);
  net.theta = Vec::Zero(network_param_count(depth, width, input_dim));

  std::mt19937_64 rng(seed);
  auto unit = [&rng]() {
    // uniform in [0,1) with fixed bit layout, independent of libstdc++ internals
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  for (int l = 0; l <= depth; ++l) {
    auto w = net.weight(l);
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        w(i, j) = (2.0 * unit() - 1.0) * scale;
  }
  return net;
}

double forward(const Network& net, const Eigen::Ref<const Vec>& input) {
  if (input.size() != net.input_dim)
    throw std::invalid_argument("forward: input dimension mismatch");
  BatchWork work;
  eval_batch(net, input, false, work);
  return work.value(0);
}

EvalWithDerivs forward_with_input_grad(const Network& net,
                                       const Eigen::Ref<const Vec>& input) {
  if (input.size() != net.input_dim)
    throw std::invalid_argument("forward_with_input_grad: input dimension mismatch");
  BatchWork work;
  eval_batch(net, input, true, work);
  EvalWithDerivs out;
  out.value = work.value(0);
  out.input_grad = work.input_grad.col(0);
  return out;
}

std::vector<std::uint8_t> weight_decay_mask(const Network& net) {
  std::vector<std::uint8_t> mask(static_cast<size_t>(net.theta.size()), 0);
  for (const auto& s : net.layers) {
    for (Eigen::Index i = 0; i < s.rows * s.cols; ++i)
      mask[static_cast<size_t>(s.weight_offset + i)] = 1;
  }
  return mask;
}

}  // namespace lelm
