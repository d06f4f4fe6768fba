#pragma once

#include "lelm/network.hpp"

#include <cstdint>

namespace lelm {

/// Scratch space for a batched network evaluation.  Columns of the input
/// matrix are points.  When tangents are requested, `tangent[l]` holds the
/// derivative of layer-l activations with respect to all input coordinates,
/// stored as width x (N * input_dim) with columns grouped per point.
struct BatchWork {
  std::vector<Mat> act;          // act[0] = input (n0 x N), act[l] = hidden activations
  std::vector<Mat> tangent;      // tangent[l] for l = 1..D (post-activation)
  std::vector<Mat> pre_tangent;  // pre-activation tangent, kept for the reverse pass
  RowVec value;                  // 1 x N
  Mat input_grad;                // n0 x N (only when tangents requested)
  bool has_tangents = false;
};

/// Forward pass over a batch; fills `work`.  With `with_tangents` the exact
/// input gradient of every output is propagated alongside the values.
void eval_batch(const Network& net, const Eigen::Ref<const Mat>& inputs,
                bool with_tangents, BatchWork& work);

/// Reverse pass accumulating dL/dtheta into `grad` given per-point adjoints
/// of the value (`value_bar`) and, optionally, of the input gradient
/// (`grad_bar`, n0 x N; pass nullptr for value-only losses).  Requires the
/// matching eval_batch call to have populated `work` (with tangents whenever
/// grad_bar is non-null).
void backward_batch(const Network& net, const BatchWork& work,
                    const Eigen::Ref<const RowVec>& value_bar,
                    const Mat* grad_bar, Vec& grad);

/// Number of point evaluations performed so far (test instrumentation).
std::uint64_t eval_count();
void reset_eval_count();

/// A scalar loss of theta built from forward / forward_with_input_grad calls
/// over a fixed batch, exposing its exact parameter gradient.
class LossEvaluator {
 public:
  virtual ~LossEvaluator() = default;
  virtual double value(const Network& net) const = 0;
  virtual void add_gradient(const Network& net, Vec& grad) const = 0;
};

Vec loss_param_grad(const Network& net, const LossEvaluator& loss);

}  // namespace lelm
