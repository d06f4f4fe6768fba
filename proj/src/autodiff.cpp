#include "lelm/autodiff.hpp"

#include <stdexcept>

namespace lelm {

namespace {
std::uint64_t g_eval_count = 0;
}

std::uint64_t eval_count() { return g_eval_count; }
void reset_eval_count() { g_eval_count = 0; }

void eval_batch(const Network& net, const Eigen::Ref<const Mat>& inputs,
                bool with_tangents, BatchWork& work) {
  if (inputs.rows() != net.input_dim)
    throw std::invalid_argument("eval_batch: input dimension mismatch");
  const int D = net.depth;
  const Eigen::Index n0 = net.input_dim;
  const Eigen::Index N = inputs.cols();
  g_eval_count += static_cast<std::uint64_t>(N);

  work.has_tangents = with_tangents;
  work.act.resize(static_cast<size_t>(D) + 1);
  work.act[0] = inputs;
  if (with_tangents) {
    work.tangent.resize(static_cast<size_t>(D) + 1);
    work.pre_tangent.resize(static_cast<size_t>(D) + 1);
  }

  for (int l = 1; l <= D; ++l) {
    const auto w = net.weight(l - 1);
    const auto b = net.bias(l - 1);
    Mat a = (w * work.act[static_cast<size_t>(l - 1)]).colwise() + b;
    if (with_tangents) {
      Mat& s = work.pre_tangent[static_cast<size_t>(l)];
      if (l == 1) {
        // tangent of the input is the identity, so the pre-activation
        // tangent of the first layer is a copy of its weights per point
        s.resize(net.width, N * n0);
        for (Eigen::Index p = 0; p < N; ++p) s.middleCols(p * n0, n0) = w;
      } else {
        s.resize(net.width, N * n0);
        s.noalias() = w * work.tangent[static_cast<size_t>(l - 1)];
      }
      Mat z = a.array().tanh();
      Mat& t = work.tangent[static_cast<size_t>(l)];
      t = s;
      for (Eigen::Index p = 0; p < N; ++p) {
        const auto sech2 = (1.0 - z.col(p).array().square());
        t.middleCols(p * n0, n0).array().colwise() *= sech2;
      }
      work.act[static_cast<size_t>(l)] = std::move(z);
    } else {
      work.act[static_cast<size_t>(l)] = a.array().tanh();
    }
  }

  const auto w_out = net.weight(D);
  const double b_out = net.bias(D)(0);
  work.value = (w_out * work.act[static_cast<size_t>(D)]).array() + b_out;
  if (with_tangents) {
    work.input_grad.resize(n0, N);
    const Mat& t = work.tangent[static_cast<size_t>(D)];
    for (Eigen::Index p = 0; p < N; ++p)
      work.input_grad.col(p) = (w_out * t.middleCols(p * n0, n0)).transpose();
  }
}

void backward_batch(const Network& net, const BatchWork& work,
                    const Eigen::Ref<const RowVec>& value_bar,
                    const Mat* grad_bar, Vec& grad) {
  const int D = net.depth;
  const Eigen::Index n0 = net.input_dim;
  const Eigen::Index N = work.act[0].cols();
  if (grad.size() != net.theta.size())
    throw std::invalid_argument("backward_batch: gradient buffer size mismatch");
  if (grad_bar && !work.has_tangents)
    throw std::invalid_argument("backward_batch: tangents were not recorded");

  auto gw = [&](int l) {
    const auto& s = net.layers[static_cast<size_t>(l)];
    return Eigen::Map<Mat>(grad.data() + s.weight_offset, s.rows, s.cols);
  };
  auto gb = [&](int l) {
    const auto& s = net.layers[static_cast<size_t>(l)];
    return Eigen::Map<Vec>(grad.data() + s.bias_offset, s.rows);
  };

  const auto w_out = net.weight(D);

  Mat z_bar = w_out.transpose() * value_bar;  // width x N
  gw(D).noalias() += value_bar * work.act[static_cast<size_t>(D)].transpose();
  gb(D)(0) += value_bar.sum();

  Mat t_bar;  // adjoint of tangent[l], width x (N*n0)
  if (grad_bar) {
    t_bar.resize(net.width, N * n0);
    for (Eigen::Index p = 0; p < N; ++p) {
      t_bar.middleCols(p * n0, n0).noalias() =
          w_out.transpose() * grad_bar->col(p).transpose();
      gw(D).noalias() +=
          (work.tangent[static_cast<size_t>(D)].middleCols(p * n0, n0) *
           grad_bar->col(p))
              .transpose();
    }
  }

  for (int l = D; l >= 1; --l) {
    const Mat& z = work.act[static_cast<size_t>(l)];
    const Mat& z_prev = work.act[static_cast<size_t>(l - 1)];
    const auto w = net.weight(l - 1);

    // a_bar collects the pre-activation adjoint from the value path (sech^2)
    // and, when tangents flow, from the row scaling of the tangent, whose
    // derivative in a is tanh'' = -2 z sech^2.
    Mat a_bar(net.width, N);
    Mat s_bar;  // adjoint of the pre-activation tangent
    if (grad_bar) {
      const Mat& s = work.pre_tangent[static_cast<size_t>(l)];
      s_bar.resize(net.width, N * n0);
      for (Eigen::Index p = 0; p < N; ++p) {
        const auto zc = z.col(p).array();
        const auto sech2 = (1.0 - zc.square());
        const auto tb = t_bar.middleCols(p * n0, n0);
        const Vec d_bar =
            (tb.array() * s.middleCols(p * n0, n0).array()).rowwise().sum();
        a_bar.col(p) = (z_bar.col(p).array() * sech2 +
                        d_bar.array() * (-2.0 * zc * sech2))
                           .matrix();
        s_bar.middleCols(p * n0, n0) = tb.array().colwise() * sech2;
      }
    } else {
      a_bar = z_bar.array() * (1.0 - z.array().square());
    }

    gw(l - 1).noalias() += a_bar * z_prev.transpose();
    gb(l - 1).noalias() += a_bar.rowwise().sum();
    if (grad_bar) {
      if (l == 1) {
        for (Eigen::Index p = 0; p < N; ++p)
          gw(0).noalias() += s_bar.middleCols(p * n0, n0);
      } else {
        gw(l - 1).noalias() +=
            s_bar * work.tangent[static_cast<size_t>(l - 1)].transpose();
        Mat next(net.width, N * n0);
        next.noalias() = w.transpose() * s_bar;
        t_bar = std::move(next);
      }
    }
    if (l > 1) z_bar = w.transpose() * a_bar;
  }
}

Vec loss_param_grad(const Network& net, const LossEvaluator& loss) {
  Vec grad = Vec::Zero(net.theta.size());
  loss.add_gradient(net, grad);
  return grad;
}

}  // namespace lelm
