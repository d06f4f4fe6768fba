#include "lelm/shock_infer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lelm {
namespace {

// Degree-(p-1) Lagrange interpolation through the p grid nodes nearest to t.
// p = 10 resolves the curved-shock speeds well past the accuracy of the
// integrator itself; smaller grids fall back to using every node.
double local_lagrange(const Eigen::VectorXd& t_nodes, const Eigen::VectorXd& v, double t) {
  const Eigen::Index n = t_nodes.size();
  const Eigen::Index p = std::min<Eigen::Index>(10, n);
  const double h = t_nodes(1) - t_nodes(0);
  auto i = static_cast<Eigen::Index>(std::floor((t - t_nodes(0)) / h));
  Eigen::Index lo = std::max<Eigen::Index>(0, std::min(n - p, i - (p - 1) / 2));
  double sum = 0;
  for (Eigen::Index j = lo; j < lo + p; ++j) {
    double lj = 1;
    for (Eigen::Index k = lo; k < lo + p; ++k) {
      if (k == j) continue;
      lj *= (t - t_nodes(k)) / (t_nodes(j) - t_nodes(k));
    }
    sum += lj * v(j);
  }
  return sum;
}

}  // namespace

SpeedGrid make_speed_grid(const ProblemSpec& problem, double s_init) {
  if (!problem.inverse)
    throw std::invalid_argument("speed grid requested for a forward problem");
  SpeedGrid grid;
  grid.c = problem.inverse_hypothesis_slope;
  grid.x0 = problem.inverse_x0;
  grid.constant_mode = problem.inverse_constant_speed;
  const double h = problem.inverse_mesh_h > 0 ? problem.inverse_mesh_h : 1.0 / 50;
  const auto n = static_cast<Eigen::Index>(std::llround(problem.horizon / h)) + 1;
  grid.t_nodes = Eigen::VectorXd::LinSpaced(n, 0.0, problem.horizon);
  grid.values = Eigen::VectorXd::Constant(grid.constant_mode ? 1 : n, s_init);
  return grid;
}

double CurveEstimate::speed(double t) const {
  if (constant_mode) return c + offset_values(0);
  return c + local_lagrange(t_nodes, offset_values, t);
}

double CurveEstimate::position(double t) const {
  if (constant_mode) return x0 + (c + offset_values(0)) * t;
  const Eigen::Index n = t_nodes.size();
  const double h = t_nodes(1) - t_nodes(0);
  auto i = static_cast<Eigen::Index>(std::floor((t - t_nodes(0)) / h));
  i = std::max<Eigen::Index>(0, std::min(n - 2, i));
  // cubic Hermite on the offset integral; its slopes are the offsets themselves
  const double u = (t - t_nodes(i)) / h;
  const double y0 = offset_integral(i), y1 = offset_integral(i + 1);
  const double m0 = offset_values(i) * h, m1 = offset_values(i + 1) * h;
  const double u2 = u * u, u3 = u2 * u;
  const double bar = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
                     (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
  return x0 + c * t + bar;
}

CurveEstimate integrate_curve(const SpeedGrid& grid) {
  CurveEstimate curve;
  curve.t_nodes = grid.t_nodes;
  curve.c = grid.c;
  curve.x0 = grid.x0;
  curve.constant_mode = grid.constant_mode;
  curve.offset_values = grid.values;

  const Eigen::Index n = grid.t_nodes.size();
  curve.gamma_nodes.resize(n);
  if (grid.constant_mode) {
    const double s = grid.c + grid.values(0);
    for (Eigen::Index i = 0; i < n; ++i)
      curve.gamma_nodes(i) = grid.x0 + s * grid.t_nodes(i);
    return curve;
  }

  auto sigma = [&](double t) { return local_lagrange(grid.t_nodes, grid.values, t); };
  curve.offset_integral.resize(n);
  curve.offset_integral(0) = 0;
  double acc = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    // two classical RK4 steps per interval; for a t-only right-hand side
    // each step reduces to Simpson's rule
    const double d = (grid.t_nodes(i + 1) - grid.t_nodes(i)) / 2;
    for (int k = 0; k < 2; ++k) {
      const double a = grid.t_nodes(i) + k * d;
      acc += d / 6 * (sigma(a) + 4 * sigma(a + d / 2) + sigma(a + d));
    }
    curve.offset_integral(i + 1) = acc;
    curve.gamma_nodes(i + 1) =
        grid.x0 + grid.c * grid.t_nodes(i + 1) + acc;
  }
  curve.gamma_nodes(0) = grid.x0;
  return curve;
}

namespace {

// First time at which the curve touches the boundary of [x_min, x_max],
// or a negative value if it stays strictly inside through T.
double find_exit_time(const ProblemSpec& problem, const CurveEstimate& curve) {
  const double lo = problem.x_min[0], hi = problem.x_max[0];
  auto outside = [&](double t) {
    const double x = curve.position(t);
    return x < lo || x > hi;  // touching the boundary is still in the closure
  };
  const double T = problem.horizon;
  const int scan = 4096;
  double prev = 0;
  if (outside(0)) return 0;
  for (int i = 1; i <= scan; ++i) {
    double t = T * i / scan;
    if (outside(t)) {
      double a = prev, b = t;
      for (int k = 0; k < 80; ++k) {
        double m = 0.5 * (a + b);
        (outside(m) ? b : a) = m;
      }
      return 0.5 * (a + b);
    }
    prev = t;
  }
  return -1;
}

ShockGeometry curve_geometry(const CurveEstimate& curve, double t_b) {
  ShockGeometry geo;
  geo.dim = 1;
  ShockSheet sheet;
  sheet.gamma = [curve](double t) { return curve.position(t); };
  sheet.speed = [curve](double t) { return curve.speed(t); };
  sheet.t_a = 0;
  sheet.t_b = t_b;
  sheet.phi_t_a = 0;
  sheet.phi_t_b = curve.t_nodes(curve.t_nodes.size() - 1);
  geo.sheets = {sheet};
  return geo;
}

}  // namespace

ShockGeometry refresh_geometry(const ProblemSpec& problem, const CurveEstimate& curve) {
  const double t_exit = find_exit_time(problem, curve);
  if (t_exit >= 0) {
    std::ostringstream msg;
    msg << "inferred shock curve leaves the spatial domain at t = " << t_exit
        << " (diverged inference)";
    throw std::runtime_error(msg.str());
  }
  return curve_geometry(curve, problem.horizon);
}

ShockGeometry refresh_geometry_clipped(const ProblemSpec& problem,
                                       const CurveEstimate& curve,
                                       double* exit_time) {
  const double t_exit = find_exit_time(problem, curve);
  if (exit_time) *exit_time = t_exit;
  if (t_exit < 0) return curve_geometry(curve, problem.horizon);
  return curve_geometry(curve, t_exit);
}

Eigen::Index speeds_as_trainables(const SpeedGrid& grid) { return grid.values.size(); }

}  // namespace lelm
