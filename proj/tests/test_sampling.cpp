#include "lelm/sampling.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using lelm::BatchSizes;
using lelm::CollocationBatch;

namespace {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("counts, determinism, and point invariants on burgers_shock") {
  const auto& p = lelm::get_problem("burgers_shock");
  const auto geo = lelm::build_geometry(p);
  const BatchSizes sizes{10000, 1000, 1000, 1000};
  const CollocationBatch a = sample_batch(p, geo, sizes, 1);
  const CollocationBatch b = sample_batch(p, geo, sizes, 1);
  const CollocationBatch c = sample_batch(p, geo, sizes, 2);

  CHECK(a.interior.cols() == 10000);
  CHECK(a.shock.size() == 1000);
  CHECK(a.boundary.cols() == 1000);
  CHECK(a.initial.cols() == 1000);

  CHECK(same_matrix(a.interior, b.interior));
  CHECK(same_matrix(a.shock.xt, b.shock.xt));
  CHECK(same_matrix(a.boundary, b.boundary));
  CHECK(same_matrix(a.initial, b.initial));
  CHECK(!same_matrix(a.interior, c.interior));

  // interior rows: x, t, phi; points stay clear of the sheet and in range
  for (Eigen::Index k = 0; k < a.interior.cols(); ++k) {
    const double x = a.interior(0, k), t = a.interior(1, k), ph = a.interior(2, k);
    CHECK(x >= -1.0);
    CHECK(x <= 1.0);
    CHECK(t > 0.0);
    CHECK(t <= 1.0);
    CHECK(std::abs(x - t) > 1e-12);
    CHECK(ph == (x >= t ? 1.0 : 0.0));
  }
  // shock points sit on the sheet with both side levels attached
  for (Eigen::Index k = 0; k < a.shock.size(); ++k) {
    CHECK(std::abs(a.shock.xt(0, k) - a.shock.xt(1, k)) <= 1e-12);
    CHECK(a.shock.phi_minus(k) == 0.0);
    CHECK(a.shock.phi_plus(k) == 1.0);
    CHECK(a.shock.s(k) == 1.0);
  }
  // Dirichlet boundary points carry the exact trace
  for (Eigen::Index k = 0; k < a.boundary.cols(); ++k) {
    const double x = a.boundary(0, k);
    CHECK((x == -1.0 || x == 1.0));
    double xt[2] = {x, 0};
    CHECK(a.boundary_value(k) == exact(p, xt, a.boundary(1, k)));
  }
  // initial points at t = 0 carry u0
  for (Eigen::Index k = 0; k < a.initial.cols(); ++k) {
    CHECK(a.initial(1, k) == 0.0);
    double xt[2] = {a.initial(0, k), 0};
    CHECK(a.initial_value(k) == p.initial(xt));
  }
}

TEST_CASE("interior sampling is uniform (half-domain frequency)") {
  const auto& p = lelm::get_problem("burgers_shock");
  const auto geo = lelm::build_geometry(p);
  const CollocationBatch batch = sample_batch(p, geo, {100000, 10, 10, 10}, 3);
  Eigen::Index left = 0;
  for (Eigen::Index k = 0; k < batch.interior.cols(); ++k)
    if (batch.interior(0, k) < 0) ++left;
  const double frac = static_cast<double>(left) / 100000.0;
  CHECK(std::abs(frac - 0.5) < 0.01);
}

TEST_CASE("periodic problems emit boundary pairs sharing t") {
  const auto& p = lelm::get_problem("convection_unit");
  const auto geo = lelm::build_geometry(p);
  const CollocationBatch batch = sample_batch(p, geo, {100, 100, 200, 50}, 4);
  CHECK(batch.periodic);
  CHECK(batch.boundary.cols() == 200);
  CHECK(batch.boundary_pair.cols() == 200);
  for (Eigen::Index k = 0; k < 200; ++k) {
    CHECK(batch.boundary(0, k) == p.x_min[0]);
    CHECK(batch.boundary_pair(0, k) == p.x_max[0]);
    CHECK(batch.boundary(1, k) == batch.boundary_pair(1, k));
  }
}

TEST_CASE("merging shock samples avoid the intersection instant") {
  const auto& p = lelm::get_problem("burgers_merging");
  const auto geo = lelm::build_geometry(p);
  const auto pts = sample_shock_points(p, geo, 300, 5);
  const double t_star = geo.degenerate_t;
  CHECK(pts.size() == 300);
  for (Eigen::Index k = 0; k < pts.size(); ++k) {
    CHECK(std::abs(pts.xt(1, k) - t_star) >= 1e-9);
    const int lo = static_cast<int>(pts.phi_minus(k));
    const int hi = static_cast<int>(pts.phi_plus(k));
    const bool known = (lo == 0 && hi == 1) || (lo == 1 && hi == 2) || (lo == 0 && hi == 2);
    CHECK(known);
  }
}

TEST_CASE("two-dimensional shock planes carry the transverse coordinate") {
  const auto& p = lelm::get_problem("burgers_2d");
  const auto geo = lelm::build_geometry(p);
  const auto pts = sample_shock_points(p, geo, 500, 6);
  for (Eigen::Index k = 0; k < pts.size(); ++k) {
    CHECK(pts.xt.rows() == 3);  // x, y, t
    CHECK(pts.xt(1, k) >= 0.0);
    CHECK(pts.xt(1, k) <= 1.0);
    const double x = pts.xt(0, k), t = pts.xt(2, k);
    const bool on_fast = std::abs(x - (1 + 3 * t)) <= 1e-12;
    const bool on_slow = std::abs(x - (2 + 0.5 * t)) <= 1e-12;
    CHECK((on_fast || on_slow));
  }
}

TEST_CASE("mini-batching") {
  const auto& p = lelm::get_problem("burgers_shock");
  const auto geo = lelm::build_geometry(p);
  const CollocationBatch batch = sample_batch(p, geo, {1000, 200, 100, 100}, 7);

  SUBCASE("fraction one is the identity") {
    const CollocationBatch view = minibatch(batch, 1.0, 7, 3);
    CHECK(same_matrix(view.interior, batch.interior));
    CHECK(same_matrix(view.shock.xt, batch.shock.xt));
  }
  SUBCASE("fraction half subsamples without replacement") {
    const CollocationBatch half = minibatch(batch, 0.5, 7, 3);
    CHECK(half.interior.cols() == 500);
    CHECK(half.shock.size() == 100);
    CHECK(half.boundary.cols() == 50);
    CHECK(half.initial.cols() == 50);
    // distinct source columns: the (x, t) pairs are almost surely unique
    std::set<std::pair<double, double>> seen;
    for (Eigen::Index k = 0; k < half.interior.cols(); ++k)
      seen.insert({half.interior(0, k), half.interior(1, k)});
    CHECK(seen.size() == 500);
    const CollocationBatch again = minibatch(batch, 0.5, 7, 3);
    CHECK(same_matrix(again.interior, half.interior));
    const CollocationBatch other = minibatch(batch, 0.5, 7, 4);
    CHECK(!same_matrix(other.interior, half.interior));
  }
  SUBCASE("invalid fraction is rejected") {
    CHECK_THROWS(minibatch(batch, 0.0, 7, 0));
    CHECK_THROWS(minibatch(batch, 1.5, 7, 0));
  }
}
