#include "lelm/autodiff.hpp"
#include "lelm/network.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using lelm::Mat;
using lelm::Network;
using lelm::Vec;

namespace {

// Central finite differences of forward() in the inputs.
Vec fd_input_grad(const Network& net, const Vec& input, double h) {
  Vec g(input.size());
  for (Eigen::Index i = 0; i < input.size(); ++i) {
    Vec p = input, m = input;
    p(i) += h;
    m(i) -= h;
    g(i) = (forward(net, p) - forward(net, m)) / (2 * h);
  }
  return g;
}

double rel_vec_err(const Vec& a, const Vec& b) {
  const double den = std::max(a.norm(), 1e-12);
  return (a - b).norm() / den;
}

}  // namespace

TEST_CASE("parameter vector size matches the layer shapes") {
  // depth 3, width 40, 5 inputs: 40*5+40, two 40*40+40 blocks, 1*40+1.
  CHECK(lelm::network_param_count(3, 40, 5) == 240 + 2 * 1640 + 41);
  const Network net = lelm::init_network(3, 40, 5, 7);
  CHECK(net.theta.size() == lelm::network_param_count(3, 40, 5));
  CHECK(net.num_linear_layers() == 4);
  Eigen::Index covered = 0;
  for (int l = 0; l < net.num_linear_layers(); ++l)
    covered += net.weight(l).size() + net.bias(l).size();
  CHECK(covered == net.theta.size());
}

TEST_CASE("initialization: zero biases, fan-in bound, deterministic per seed") {
  const Network a = lelm::init_network(2, 20, 3, 42);
  const Network b = lelm::init_network(2, 20, 3, 42);
  const Network c = lelm::init_network(2, 20, 3, 43);
  CHECK(a.theta == b.theta);
  CHECK(a.theta != c.theta);
  for (int l = 0; l < a.num_linear_layers(); ++l) {
    CHECK(a.bias(l).norm() == 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(a.weight(l).cols()));
    CHECK(a.weight(l).cwiseAbs().maxCoeff() <= bound);
    CHECK(a.weight(l).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("zero parameters evaluate to zero with zero input gradient") {
  Network net = lelm::init_network(2, 8, 3, 1);
  net.theta.setZero();
  const Vec x = Vec::Random(3);
  CHECK(forward(net, x) == 0.0);
  const auto ed = forward_with_input_grad(net, x);
  CHECK(ed.value == 0.0);
  CHECK(ed.input_grad.norm() == 0.0);
}

TEST_CASE("only the final bias set: constant output") {
  Network net = lelm::init_network(1, 4, 2, 1);
  net.theta.setZero();
  net.bias(net.num_linear_layers() - 1)(0) = 2.5;
  CHECK(forward(net, Vec::Zero(2)) == 2.5);
  CHECK(forward(net, Vec::Random(2)) == 2.5);
}

TEST_CASE("single hidden unit, all weights one: tanh chain by hand") {
  Network net = lelm::init_network(1, 1, 2, 1);
  net.theta.setZero();
  net.weight(0).setOnes();
  net.weight(1).setOnes();
  Vec x(2);
  x << 0.5, 0.25;
  const double expected = std::tanh(0.75);
  CHECK(forward(net, x) == doctest::Approx(expected).epsilon(1e-15));
  const auto ed = forward_with_input_grad(net, x);
  const double sech2 = 1.0 - std::tanh(0.75) * std::tanh(0.75);
  CHECK(ed.value == forward(net, x));
  CHECK(ed.input_grad(0) == doctest::Approx(sech2).epsilon(1e-14));
  CHECK(ed.input_grad(1) == doctest::Approx(sech2).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.635149).epsilon(1e-6));
}

TEST_CASE("output-layer linearity: doubling the last weight doubles the value") {
  Network net = lelm::init_network(2, 10, 3, 5);
  const Vec x = Vec::Random(3);
  const double u = forward(net, x);
  net.weight(net.num_linear_layers() - 1) *= 2.0;
  CHECK(forward(net, x) == 2.0 * u);
}

TEST_CASE("repeated evaluation is bitwise identical") {
  const Network net = lelm::init_network(3, 12, 4, 9);
  const Vec x = Vec::Random(4);
  CHECK(forward(net, x) == forward(net, x));
  const auto a = forward_with_input_grad(net, x);
  const auto b = forward_with_input_grad(net, x);
  CHECK(a.value == b.value);
  CHECK(a.input_grad == b.input_grad);
  CHECK(a.value == forward(net, x));
}

TEST_CASE("batched evaluation matches single-point evaluation") {
  const Network net = lelm::init_network(2, 16, 3, 11);
  const Mat inputs = Mat::Random(3, 17);
  lelm::BatchWork work;
  eval_batch(net, inputs, true, work);
  // Batched and single-point paths use different BLAS kernels, so agreement
  // is to rounding, not bitwise.
  for (Eigen::Index k = 0; k < inputs.cols(); ++k) {
    const double u = forward(net, inputs.col(k));
    CHECK(work.value(k) == doctest::Approx(u).epsilon(1e-14));
    const auto ed = forward_with_input_grad(net, inputs.col(k));
    CHECK((work.input_grad.col(k) - ed.input_grad).norm() <=
          1e-14 * (1.0 + ed.input_grad.norm()));
  }
}

TEST_CASE("input gradients match finite differences across sizes") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  const int depths[] = {1, 2, 3};
  const int widths[] = {1, 5, 20};
  int checks = 0;
  double worst = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int depth = depths[rep % 3];
    const int width = widths[(rep / 3) % 3];
    const int n_in = 2 + static_cast<int>(rng() % 3);
    const Network net = lelm::init_network(depth, width, n_in, rng());
    Vec x(n_in);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = unif(rng);
    const auto ed = forward_with_input_grad(net, x);
    const Vec fd = fd_input_grad(net, x, 1e-5);
    worst = std::max(worst, rel_vec_err(ed.input_grad, fd));
    ++checks;
  }
  CHECK(checks == 100);
  CHECK(worst <= 1e-5);
}

TEST_CASE("weight decay mask marks weights only") {
  const Network net = lelm::init_network(2, 6, 3, 3);
  const auto mask = lelm::weight_decay_mask(net);
  CHECK(mask.size() == static_cast<size_t>(net.theta.size()));
  Eigen::Index marked = 0;
  for (auto v : mask) marked += v;
  Eigen::Index weights = 0;
  for (int l = 0; l < net.num_linear_layers(); ++l) weights += net.weight(l).size();
  CHECK(marked == weights);
  for (int l = 0; l < net.num_linear_layers(); ++l) {
    const auto& shape = net.layers[static_cast<size_t>(l)];
    for (Eigen::Index i = 0; i < shape.rows; ++i)
      CHECK(mask[static_cast<size_t>(shape.bias_offset + i)] == 0);
  }
}

TEST_CASE("parameter gradient of a squared value is zero at zero parameters") {
  // L = u(p)^2 has gradient 2 u grad(u) = 0 when u = 0.
  Network net = lelm::init_network(2, 6, 3, 4);
  net.theta.setZero();
  const Mat inputs = Mat::Random(3, 1);
  lelm::BatchWork work;
  eval_batch(net, inputs, false, work);
  Vec grad = Vec::Zero(net.theta.size());
  lelm::RowVec vbar(1);
  vbar(0) = 2.0 * work.value(0);
  backward_batch(net, work, vbar, nullptr, grad);
  CHECK(grad.norm() == 0.0);
}

TEST_CASE("parameter gradients match finite differences, value and derivative terms") {
  // Losses built from values and input derivatives of the network, including
  // the mixed quasi-linear residual; this exercises the reverse pass through
  // the tangent propagation.
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    const int depth = 1 + rep % 3;
    const int width = 4 + (rep % 4);
    const int n_in = 3;
    Network net = lelm::init_network(depth, width, n_in, 1000 + rng() % 1000);
    Mat inputs(n_in, 10);
    for (Eigen::Index j = 0; j < inputs.size(); ++j) inputs.data()[j] = unif(rng);
    const int kind = rep % 3;  // 0: values, 1: derivatives, 2: mixed residual

    auto loss_of = [&](const Network& n) {
      double acc = 0;
      for (Eigen::Index k = 0; k < inputs.cols(); ++k) {
        const auto ed = forward_with_input_grad(n, inputs.col(k));
        double r = 0;
        if (kind == 0) r = ed.value;
        else if (kind == 1) r = ed.input_grad(0);
        else r = ed.input_grad(1) + ed.value * ed.input_grad(0);  // Burgers residual
        acc += r * r;
      }
      return acc / static_cast<double>(inputs.cols());
    };

    // analytic gradient via the batched reverse pass
    lelm::BatchWork work;
    eval_batch(net, inputs, true, work);
    const Eigen::Index m = inputs.cols();
    lelm::RowVec vbar = lelm::RowVec::Zero(m);
    Mat gbar = Mat::Zero(n_in, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double w = 2.0 / static_cast<double>(m);
      if (kind == 0) {
        vbar(k) = w * work.value(k);
      } else if (kind == 1) {
        gbar(0, k) = w * work.input_grad(0, k);
      } else {
        const double r = work.input_grad(1, k) + work.value(k) * work.input_grad(0, k);
        vbar(k) = w * r * work.input_grad(0, k);
        gbar(0, k) = w * r * work.value(k);
        gbar(1, k) = w * r;
      }
    }
    Vec grad = Vec::Zero(net.theta.size());
    backward_batch(net, work, vbar, kind == 0 ? nullptr : &gbar, grad);

    Vec fd(net.theta.size());
    const double h = 1e-4;
    for (Eigen::Index i = 0; i < net.theta.size(); ++i) {
      const double keep = net.theta(i);
      net.theta(i) = keep + h;
      const double lp = loss_of(net);
      net.theta(i) = keep - h;
      const double lm = loss_of(net);
      net.theta(i) = keep;
      fd(i) = (lp - lm) / (2 * h);
    }
    CHECK(rel_vec_err(grad, fd) <= 1e-5);
  }
}

TEST_CASE("evaluation counter counts points") {
  const Network net = lelm::init_network(1, 4, 3, 2);
  lelm::reset_eval_count();
  const Mat inputs = Mat::Random(3, 13);
  lelm::BatchWork work;
  eval_batch(net, inputs, false, work);
  CHECK(lelm::eval_count() == 13);
  forward(net, inputs.col(0));
  CHECK(lelm::eval_count() == 14);
  lelm::reset_eval_count();
  CHECK(lelm::eval_count() == 0);
}
