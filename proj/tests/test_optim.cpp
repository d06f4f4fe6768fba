#include "lelm/optim.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using Eigen::VectorXd;

TEST_CASE("scalar recurrence oracle over 100 steps") {
  // Hand-rolled Adam (no decay) replayed coordinate-free on one parameter.
  lelm::OptimState st = lelm::init_optim(1, {0});
  VectorXd p(1);
  p(0) = 0.3;
  double q = 0.3, m = 0, v = 0;
  const double lr = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int k = 1; k <= 100; ++k) {
    const double g = std::sin(0.7 * k) + 0.1 * k / 100.0;
    VectorXd gv(1);
    gv(0) = g;
    lelm::step(st, p, gv, 0);

    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mhat = m / (1 - std::pow(b1, k));
    const double vhat = v / (1 - std::pow(b2, k));
    q -= lr * mhat / (std::sqrt(vhat) + eps);
    CHECK(std::abs(p(0) - q) <= 1e-14);
  }
}

TEST_CASE("one-step updates with zero gradient") {
  SUBCASE("no decay: parameters are a fixed point") {
    lelm::OptimState st = lelm::init_optim(1, {0});
    VectorXd p(1), g = VectorXd::Zero(1);
    p(0) = 1.0;
    lelm::step(st, p, g, 0);
    CHECK(p(0) == 1.0);
  }
  SUBCASE("decayed coordinate shrinks by (1 - lr * lambda)") {
    lelm::OptimState st = lelm::init_optim(1, {1});
    VectorXd p(1), g = VectorXd::Zero(1);
    p(0) = 1.0;
    lelm::step(st, p, g, 0);
    CHECK(p(0) == doctest::Approx(0.9999).epsilon(1e-15));
  }
}

TEST_CASE("first Adam step magnitude") {
  lelm::OptimState st = lelm::init_optim(1, {0});
  VectorXd p(1), g(1);
  p(0) = 1.0;
  g(0) = 1.0;
  lelm::step(st, p, g, 0);
  // bias-corrected mhat = vhat = 1 on the first step
  CHECK(p(0) == doctest::Approx(1.0 - 0.01 / (1.0 + 1e-8)).epsilon(1e-14));
}

TEST_CASE("exempt coordinates never decay") {
  // Shock speeds and biases carry mask 0: with zero gradient they stay put.
  lelm::OptimState st = lelm::init_optim(2, {1, 0});
  VectorXd p(2), g = VectorXd::Zero(2);
  p << 2.0, -5.0;
  for (int k = 0; k < 50; ++k) lelm::step(st, p, g, k);
  CHECK(p(1) == -5.0);
  CHECK(p(0) < 2.0);
}

TEST_CASE("learning-rate schedule") {
  lelm::OptimState st = lelm::init_optim(1, {0}, 0.01, {8000, 14000});
  CHECK(lelm::lr_at(st, 0) == 0.01);
  CHECK(lelm::lr_at(st, 7999) == 0.01);
  CHECK(lelm::lr_at(st, 8000) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(lelm::lr_at(st, 14000) == doctest::Approx(0.0001).epsilon(1e-15));
  double prev = std::numeric_limits<double>::infinity();
  for (int e = 0; e < 20000; e += 500) {
    CHECK(lelm::lr_at(st, e) <= prev);
    prev = lelm::lr_at(st, e);
  }
  lelm::OptimState flat = lelm::init_optim(1, {0});
  CHECK(lelm::lr_at(flat, 123456) == 0.01);
}

TEST_CASE("non-finite gradients are rejected") {
  lelm::OptimState st = lelm::init_optim(2, {0, 0});
  VectorXd p = VectorXd::Zero(2), g(2);
  g << 0.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(lelm::step(st, p, g, 0));
}

TEST_CASE("second-moment estimates stay non-negative") {
  lelm::OptimState st = lelm::init_optim(3, {0, 0, 0});
  VectorXd p = VectorXd::Random(3);
  for (int k = 0; k < 25; ++k) {
    VectorXd g = VectorXd::Random(3);
    lelm::step(st, p, g, k);
    CHECK(st.v.minCoeff() >= 0.0);
  }
}
