#include "lelm/loss.hpp"
#include "lelm/shock_infer.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

using lelm::CollocationBatch;
using lelm::EvalWithDerivs;
using lelm::InverseGridTerm;
using lelm::LossWeights;
using lelm::Mat;
using lelm::Vec;

namespace {

// Closed-form stand-in for the network: value plus analytic input gradient.
struct FnEval : lelm::PointEvaluator {
  std::function<double(const Vec&)> f;
  std::function<Vec(const Vec&)> g;

  double value(const Eigen::Ref<const Vec>& in) const override { return f(in); }
  EvalWithDerivs value_and_grad(const Eigen::Ref<const Vec>& in) const override {
    return {f(in), g(in)};
  }
};

FnEval constant(double c) {
  FnEval e;
  e.f = [c](const Vec&) { return c; };
  e.g = [](const Vec& in) { return Vec::Zero(in.size()).eval(); };
  return e;
}

// u(x, t, phi) = 2 - 2 phi: the lifted exact solution of burgers_shock.
FnEval plateau() {
  FnEval e;
  e.f = [](const Vec& in) { return 2.0 - 2.0 * in(in.size() - 1); };
  e.g = [](const Vec& in) {
    Vec g = Vec::Zero(in.size());
    g(in.size() - 1) = -2.0;
    return g;
  };
  return e;
}

double rel_vec_err(const Vec& a, const Vec& b) {
  return (a - b).norm() / std::max(a.norm(), 1e-12);
}

}  // namespace

TEST_CASE("interior residual") {
  const auto& conv = lelm::get_problem("convection_unit");
  const auto& burg = lelm::get_problem("burgers_shock");
  const CollocationBatch cb =
      sample_batch(conv, lelm::build_geometry(conv), {500, 10, 10, 10}, 1);
  const CollocationBatch bb =
      sample_batch(burg, lelm::build_geometry(burg), {500, 10, 10, 10}, 1);

  CHECK(interior_loss(constant(3.0), burg, bb.interior) == 0.0);

  FnEval xt;  // u = x + t rides the convection characteristics
  xt.f = [](const Vec& in) { return in(0) + in(1); };
  xt.g = [](const Vec& in) {
    Vec g = Vec::Zero(in.size());
    g(0) = 1;
    g(1) = 1;
    return g;
  };
  CHECK(interior_loss(xt, conv, cb.interior) == doctest::Approx(0.0).epsilon(1e-14));

  FnEval ux;  // u = x gives the Burgers residual u * u_x = x
  ux.f = [](const Vec& in) { return in(0); };
  ux.g = [](const Vec& in) {
    Vec g = Vec::Zero(in.size());
    g(0) = 1;
    return g;
  };
  double expected = 0;
  for (Eigen::Index k = 0; k < bb.interior.cols(); ++k)
    expected += bb.interior(0, k) * bb.interior(0, k);
  expected /= static_cast<double>(bb.interior.cols());
  CHECK(interior_loss(ux, burg, bb.interior) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("shock residual") {
  const auto& burg = lelm::get_problem("burgers_shock");
  const auto& conv = lelm::get_problem("convection_unit");
  const auto bpts = sample_shock_points(burg, lelm::build_geometry(burg), 100, 2);
  const auto cpts = sample_shock_points(conv, lelm::build_geometry(conv), 100, 2);

  CHECK(shock_loss(constant(5.0), burg, bpts) == 0.0);
  CHECK(shock_loss(plateau(), burg, bpts) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(shock_loss(constant(0.0), conv, cpts) == doctest::Approx(1.0).epsilon(1e-14));

  FnEval phi_free;  // no phi dependence: RH residual collapses exactly
  phi_free.f = [](const Vec& in) { return in(0) + in(1); };
  phi_free.g = [](const Vec& in) {
    Vec g = Vec::Zero(in.size());
    g(0) = 1;
    g(1) = 1;
    return g;
  };
  CHECK(shock_loss(phi_free, burg, bpts) == 0.0);
  CHECK(shock_loss(phi_free, conv, cpts) == 1.0);
}

TEST_CASE("shock residual costs exactly two evaluations per point") {
  const auto& burg = lelm::get_problem("burgers_shock");
  const auto pts = sample_shock_points(burg, lelm::build_geometry(burg), 73, 3);
  const lelm::Network net = lelm::init_network(2, 8, 3, 1);
  const lelm::NetworkEvaluator eval(net);
  lelm::reset_eval_count();
  shock_loss(eval, burg, pts);
  CHECK(lelm::eval_count() == 2 * 73);
  lelm::reset_eval_count();
}

TEST_CASE("boundary and initial mismatches") {
  const auto& burg = lelm::get_problem("burgers_shock");
  const auto& conv = lelm::get_problem("convection_unit");
  const auto& merge = lelm::get_problem("burgers_merging");
  const CollocationBatch bb =
      sample_batch(burg, lelm::build_geometry(burg), {10, 10, 200, 200}, 4);
  const CollocationBatch cb =
      sample_batch(conv, lelm::build_geometry(conv), {10, 10, 200, 200}, 4);
  const CollocationBatch mb =
      sample_batch(merge, lelm::build_geometry(merge), {10, 10, 10, 5000}, 4);

  CHECK(boundary_loss(constant(1.0), bb) == 1.0);
  CHECK(boundary_loss(constant(7.0), cb) == 0.0);  // periodic pairs agree

  FnEval trace;  // reproduces the Dirichlet data exactly
  trace.f = [&burg](const Vec& in) {
    double x[2] = {in(0), 0};
    return exact(burg, x, in(1));
  };
  trace.g = [](const Vec& in) { return Vec::Zero(in.size()).eval(); };
  CHECK(boundary_loss(trace, bb) == 0.0);

  CHECK(initial_loss(constant(1.0), bb) == 1.0);
  // mean of u0^2 over (0,3): (1/3 + 0 + 4) / 3, Monte-Carlo tolerance 3 SE
  CHECK(initial_loss(constant(0.0), mb) == doctest::Approx(13.0 / 9.0).epsilon(0.06));
  CHECK(initial_loss(plateau(), bb) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("lifted exact solution zeroes every term on burgers_shock") {
  const auto& burg = lelm::get_problem("burgers_shock");
  const CollocationBatch batch =
      sample_batch(burg, lelm::build_geometry(burg), {1000, 200, 200, 200}, 5);
  const auto report = eval_losses(plateau(), burg, batch, {400, 1, 400, 1});
  CHECK(report.interior == 0.0);
  CHECK(report.shock == 0.0);
  CHECK(report.boundary == 0.0);
  CHECK(report.initial == 0.0);
  CHECK(report.total == 0.0);
}

TEST_CASE("inverse grid term") {
  const auto& burg = lelm::get_problem("burgers_inverse_const");
  InverseGridTerm grid;
  grid.c = 0;
  const Eigen::Index n = 11;
  grid.points.xt.resize(2, n);
  grid.points.phi_minus = Vec::Zero(n);
  grid.points.phi_plus = Vec::Ones(n);
  grid.points.s = Vec::Zero(n);
  grid.points.jump = Vec::Zero(n);
  grid.points.nu = Mat::Ones(1, n);
  grid.points.constraint.assign(n, lelm::ConstraintKind::rankine_hugoniot);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = 0.1 * static_cast<double>(i);
    grid.points.xt(0, i) = t;  // on the true curve gamma = t
    grid.points.xt(1, i) = t;
  }
  lelm::ShockPoints empty = grid.points;  // reuse layout for the sampled set
  empty.s = Vec::Ones(n);                 // sampled set carries the true speed
  Vec sigma1 = Vec::Ones(1), sigma0 = Vec::Zero(1);
  grid.speed_index.assign(n, 0);

  CHECK(inverse_shock_loss(plateau(), burg, empty, grid, sigma1) ==
        doctest::Approx(0.0).epsilon(1e-14));
  // s = 0 with plateau states: each grid residual is 0*(-2) - (-2) = 2
  const double with_zero = inverse_shock_loss(plateau(), burg, empty, grid, sigma0);
  const double sampled = shock_loss(plateau(), burg, empty);
  CHECK(with_zero - sampled == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(inverse_shock_loss(constant(2.0), burg, empty, grid, sigma0) == 0.0);
}

TEST_CASE("weighted totals") {
  lelm::LossReport r;
  r.interior = r.shock = r.boundary = r.initial = 1.0;
  CHECK(total_loss(r, {400, 1, 400, 1}) == 802.0);
  CHECK(total_loss(r, {400, 1, 400, 300}) == 1101.0);
  r.shock_grid = 1.0;
  CHECK(total_loss(r, {400, 1, 400, 1}) == 1202.0);
}

TEST_CASE("gradient path agrees with the value path and finite differences") {
  const auto& burg = lelm::get_problem("burgers_shock");
  const CollocationBatch batch =
      sample_batch(burg, lelm::build_geometry(burg), {40, 20, 16, 16}, 6);
  const LossWeights weights{400, 1, 400, 1};
  lelm::Network net = lelm::init_network(2, 8, 3, 21);

  Vec grad = Vec::Zero(net.theta.size());
  const auto report = loss_and_grad(net, burg, batch, weights, grad);
  const lelm::NetworkEvaluator eval(net);
  const auto by_value = eval_losses(eval, burg, batch, weights);
  CHECK(report.interior == doctest::Approx(by_value.interior).epsilon(1e-12));
  CHECK(report.shock == doctest::Approx(by_value.shock).epsilon(1e-12));
  CHECK(report.boundary == doctest::Approx(by_value.boundary).epsilon(1e-12));
  CHECK(report.initial == doctest::Approx(by_value.initial).epsilon(1e-12));
  CHECK(report.total == doctest::Approx(by_value.total).epsilon(1e-12));

  Vec fd(net.theta.size());
  const double h = 1e-4;
  for (Eigen::Index i = 0; i < net.theta.size(); ++i) {
    const double keep = net.theta(i);
    net.theta(i) = keep + h;
    const double lp = eval_losses(lelm::NetworkEvaluator(net), burg, batch, weights).total;
    net.theta(i) = keep - h;
    const double lm = eval_losses(lelm::NetworkEvaluator(net), burg, batch, weights).total;
    net.theta(i) = keep;
    fd(i) = (lp - lm) / (2 * h);
  }
  CHECK(rel_vec_err(grad, fd) <= 1e-5);
}

TEST_CASE("speed gradients of the inverse loss match finite differences") {
  const auto& prob = lelm::get_problem("burgers_inverse_const");
  lelm::SpeedGrid speeds = make_speed_grid(prob, 0.8);
  const auto curve = integrate_curve(speeds);
  const auto geometry = refresh_geometry(prob, curve);
  CollocationBatch batch = sample_batch(prob, geometry, {40, 20, 16, 16}, 7);

  InverseGridTerm grid;
  grid.c = speeds.c;
  const Eigen::Index n = 6;
  grid.points.xt.resize(2, n);
  grid.points.phi_minus = Vec::Zero(n);
  grid.points.phi_plus = Vec::Ones(n);
  grid.points.s = Vec::Zero(n);
  grid.points.jump = Vec::Zero(n);
  grid.points.nu = Mat::Ones(1, n);
  grid.points.constraint.assign(n, lelm::ConstraintKind::rankine_hugoniot);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = 0.15 * static_cast<double>(i);
    grid.points.xt(0, i) = curve.position(t);
    grid.points.xt(1, i) = t;
    grid.speed_index.push_back(0);
  }

  lelm::Network net = lelm::init_network(2, 8, 3, 22);
  const LossWeights weights{400, 1, 400, 1};
  Vec sigma = speeds.values;
  Vec grad = Vec::Zero(net.theta.size() + 1);
  loss_and_grad(net, prob, batch, weights, grad, &grid, &sigma);

  const double h = 1e-6;
  Vec sp = sigma, sm = sigma;
  sp(0) += h;
  sm(0) -= h;
  const lelm::NetworkEvaluator eval(net);
  const double lp = eval_losses(eval, prob, batch, weights, &grid, &sp).total;
  const double lm = eval_losses(eval, prob, batch, weights, &grid, &sm).total;
  const double fd = (lp - lm) / (2 * h);
  CHECK(grad(net.theta.size()) == doctest::Approx(fd).epsilon(1e-4));
}

TEST_CASE("non-finite residuals abort with a diagnostic") {
  const auto& burg = lelm::get_problem("burgers_shock");
  const CollocationBatch batch =
      sample_batch(burg, lelm::build_geometry(burg), {10, 5, 5, 5}, 8);
  FnEval bad;
  bad.f = [](const Vec&) { return std::numeric_limits<double>::quiet_NaN(); };
  bad.g = [](const Vec& in) { return Vec::Zero(in.size()).eval(); };
  CHECK_THROWS(interior_loss(bad, burg, batch.interior));
  CHECK_THROWS(initial_loss(bad, batch));
}
