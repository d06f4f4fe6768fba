#include "lelm/loss.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lelm {
namespace {

constexpr Eigen::Index kChunk = 2048;

double check(double r, const char* term, double x0, double t) {
  if (!std::isfinite(r)) {
    std::ostringstream msg;
    msg << "non-finite " << term << " residual at x = " << x0 << ", t = " << t;
    throw std::runtime_error(msg.str());
  }
  return r;
}

// Residual of the quasi-linear interior equation at one point:
// du/dt + sum_j f_j'(u) du/dx_j, with the phi channel held fixed.
double interior_residual(const ProblemSpec& problem, double y, const double* g,
                         double x0, double t) {
  double r = g[problem.dim];
  for (int j = 0; j < problem.dim; ++j) r += problem.flux_prime(j, y) * g[j];
  return check(r, "interior", x0, t);
}

double jump_residual(const ProblemSpec& problem, const ShockPoints& pts,
                     Eigen::Index i, double s, double y_minus, double y_plus) {
  double r;
  if (pts.constraint[static_cast<size_t>(i)] == ConstraintKind::prescribed_jump) {
    r = (y_plus - y_minus) - pts.jump(i);
  } else {
    r = s * (y_plus - y_minus);
    for (int j = 0; j < problem.dim; ++j)
      r -= pts.nu(j, i) * (problem.flux(j, y_plus) - problem.flux(j, y_minus));
  }
  return check(r, "shock", pts.xt(0, i), pts.xt(problem.dim, i));
}

// d(residual)/dy on the given side (+1 for y_plus, -1 for y_minus)
double jump_residual_dy(const ProblemSpec& problem, const ShockPoints& pts,
                        Eigen::Index i, double s, double y_side, double side) {
  if (pts.constraint[static_cast<size_t>(i)] == ConstraintKind::prescribed_jump)
    return side;
  double d = s;
  for (int j = 0; j < problem.dim; ++j)
    d -= pts.nu(j, i) * problem.flux_prime(j, y_side);
  return side * d;
}

Vec shock_input(const ShockPoints& pts, Eigen::Index i, double phi_value) {
  Vec in(pts.xt.rows() + 1);
  in.head(pts.xt.rows()) = pts.xt.col(i);
  in(pts.xt.rows()) = phi_value;
  return in;
}

// Paired (phi-, phi+) network inputs for a range of shock points.
Mat shock_inputs(const ShockPoints& pts, Eigen::Index lo, Eigen::Index m) {
  const Eigen::Index rows = pts.xt.rows() + 1;
  Mat in(rows, 2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    in.col(2 * k).head(rows - 1) = pts.xt.col(lo + k);
    in(rows - 1, 2 * k) = pts.phi_minus(lo + k);
    in.col(2 * k + 1).head(rows - 1) = pts.xt.col(lo + k);
    in(rows - 1, 2 * k + 1) = pts.phi_plus(lo + k);
  }
  return in;
}

}  // namespace

double total_loss(const LossReport& report, const LossWeights& weights) {
  return weights.interior_weight * report.interior +
         weights.beta_shock * (report.shock + report.shock_grid) +
         weights.beta_boundary * report.boundary +
         weights.beta_initial * report.initial;
}

double interior_loss(const PointEvaluator& eval, const ProblemSpec& problem,
                     const Eigen::Ref<const Mat>& interior) {
  const Eigen::Index n = interior.cols();
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const EvalWithDerivs e = eval.value_and_grad(interior.col(i));
    const double r = interior_residual(problem, e.value, e.input_grad.data(),
                                       interior(0, i), interior(problem.dim, i));
    sum += r * r;
  }
  return sum / static_cast<double>(n);
}

double shock_loss(const PointEvaluator& eval, const ProblemSpec& problem,
                  const ShockPoints& points) {
  const Eigen::Index n = points.size();
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ym = eval.value(shock_input(points, i, points.phi_minus(i)));
    const double yp = eval.value(shock_input(points, i, points.phi_plus(i)));
    const double r = jump_residual(problem, points, i, points.s(i), ym, yp);
    sum += r * r;
  }
  return sum / static_cast<double>(n);
}

double boundary_loss(const PointEvaluator& eval, const CollocationBatch& batch) {
  const Eigen::Index n = batch.boundary.cols();
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r;
    if (batch.periodic)
      r = eval.value(batch.boundary.col(i)) - eval.value(batch.boundary_pair.col(i));
    else
      r = eval.value(batch.boundary.col(i)) - batch.boundary_value(i);
    sum += check(r, "boundary", batch.boundary(0, i), batch.boundary(batch.boundary.rows() - 2, i)) * r;
  }
  return sum / static_cast<double>(n);
}

double initial_loss(const PointEvaluator& eval, const CollocationBatch& batch) {
  const Eigen::Index n = batch.initial.cols();
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = eval.value(batch.initial.col(i)) - batch.initial_value(i);
    sum += check(r, "initial", batch.initial(0, i), 0.0) * r;
  }
  return sum / static_cast<double>(n);
}

double inverse_shock_loss(const PointEvaluator& eval, const ProblemSpec& problem,
                          const ShockPoints& shock, const InverseGridTerm& grid,
                          const Eigen::Ref<const Vec>& sigma) {
  double value = shock_loss(eval, problem, shock);
  const Eigen::Index n = grid.points.size();
  double sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ym = eval.value(shock_input(grid.points, i, grid.points.phi_minus(i)));
    const double yp = eval.value(shock_input(grid.points, i, grid.points.phi_plus(i)));
    const double s = grid.c + sigma(grid.speed_index[static_cast<size_t>(i)]);
    const double r = jump_residual(problem, grid.points, i, s, ym, yp);
    sum += r * r;
  }
  return value + sum / static_cast<double>(n);
}

LossReport eval_losses(const PointEvaluator& eval, const ProblemSpec& problem,
                       const CollocationBatch& batch, const LossWeights& weights,
                       const InverseGridTerm* grid, const Vec* sigma) {
  LossReport report;
  report.interior = interior_loss(eval, problem, batch.interior);
  report.shock = shock_loss(eval, problem, batch.shock);
  if (grid)
    report.shock_grid =
        inverse_shock_loss(eval, problem, batch.shock, *grid, *sigma) - report.shock;
  report.boundary = boundary_loss(eval, batch);
  report.initial = initial_loss(eval, batch);
  report.total = total_loss(report, weights);
  return report;
}

namespace {

// Weighted-total gradient of the interior term, chunked to bound the tangent
// workspace; returns the unweighted mean-square loss.
double interior_grad(const Network& net, const ProblemSpec& problem,
                     const Eigen::Ref<const Mat>& interior, double coef, Vec& grad,
                     BatchWork& work) {
  const Eigen::Index n = interior.cols();
  const int dim = problem.dim;
  double sum = 0;
  for (Eigen::Index lo = 0; lo < n; lo += kChunk) {
    const Eigen::Index m = std::min(kChunk, n - lo);
    eval_batch(net, interior.middleCols(lo, m), true, work);
    RowVec vbar(m);
    Mat gbar = Mat::Zero(net.input_dim, m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double y = work.value(k);
      const double* g = work.input_grad.col(k).data();
      const double r = interior_residual(problem, y, g, interior(0, lo + k),
                                         interior(dim, lo + k));
      sum += r * r;
      const double w = 2.0 * coef * r / static_cast<double>(n);
      double curv = 0;
      for (int j = 0; j < dim; ++j) {
        curv += problem.flux_second(j, y) * g[j];
        gbar(j, k) = w * problem.flux_prime(j, y);
      }
      vbar(k) = w * curv;
      gbar(dim, k) = w;  // time channel; phi channel stays zero
    }
    backward_batch(net, work, vbar, &gbar, grad);
  }
  return sum / static_cast<double>(n);
}

// Shared by the collocation shock term and the inverse grid term. s_of(i)
// supplies the speed; dsigma, when non-null, receives the residual's
// derivative with respect to the trainable speed of point i.
template <typename SpeedFn, typename SigmaAccum>
double jump_grad(const Network& net, const ProblemSpec& problem, const ShockPoints& pts,
                 double coef, Vec& grad, BatchWork& work, SpeedFn s_of, SigmaAccum accum) {
  const Eigen::Index n = pts.size();
  double sum = 0;
  for (Eigen::Index lo = 0; lo < n; lo += kChunk / 2) {
    const Eigen::Index m = std::min(kChunk / 2, n - lo);
    const Mat inputs = shock_inputs(pts, lo, m);
    eval_batch(net, inputs, false, work);
    RowVec vbar(2 * m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const Eigen::Index i = lo + k;
      const double ym = work.value(2 * k), yp = work.value(2 * k + 1);
      const double s = s_of(i);
      const double r = jump_residual(problem, pts, i, s, ym, yp);
      sum += r * r;
      const double w = 2.0 * coef * r / static_cast<double>(n);
      vbar(2 * k) = w * jump_residual_dy(problem, pts, i, s, ym, -1.0);
      vbar(2 * k + 1) = w * jump_residual_dy(problem, pts, i, s, yp, +1.0);
      accum(i, w * (yp - ym));
    }
    backward_batch(net, work, vbar, nullptr, grad);
  }
  return sum / static_cast<double>(n);
}

double boundary_grad(const Network& net, const CollocationBatch& batch, double coef,
                     Vec& grad, BatchWork& work) {
  const Eigen::Index n = batch.boundary.cols();
  double sum = 0;
  for (Eigen::Index lo = 0; lo < n; lo += kChunk / 2) {
    const Eigen::Index m = std::min(kChunk / 2, n - lo);
    if (batch.periodic) {
      Mat inputs(batch.boundary.rows(), 2 * m);
      for (Eigen::Index k = 0; k < m; ++k) {
        inputs.col(2 * k) = batch.boundary.col(lo + k);
        inputs.col(2 * k + 1) = batch.boundary_pair.col(lo + k);
      }
      eval_batch(net, inputs, false, work);
      RowVec vbar(2 * m);
      for (Eigen::Index k = 0; k < m; ++k) {
        const double r = work.value(2 * k) - work.value(2 * k + 1);
        sum += check(r, "boundary", inputs(0, 2 * k), inputs(1, 2 * k)) * r;
        const double w = 2.0 * coef * r / static_cast<double>(n);
        vbar(2 * k) = w;
        vbar(2 * k + 1) = -w;
      }
      backward_batch(net, work, vbar, nullptr, grad);
    } else {
      eval_batch(net, batch.boundary.middleCols(lo, m), false, work);
      RowVec vbar(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        const double r = work.value(k) - batch.boundary_value(lo + k);
        sum += check(r, "boundary", batch.boundary(0, lo + k), 0.0) * r;
        vbar(k) = 2.0 * coef * r / static_cast<double>(n);
      }
      backward_batch(net, work, vbar, nullptr, grad);
    }
  }
  return sum / static_cast<double>(n);
}

double initial_grad(const Network& net, const CollocationBatch& batch, double coef,
                    Vec& grad, BatchWork& work) {
  const Eigen::Index n = batch.initial.cols();
  double sum = 0;
  for (Eigen::Index lo = 0; lo < n; lo += kChunk) {
    const Eigen::Index m = std::min(kChunk, n - lo);
    eval_batch(net, batch.initial.middleCols(lo, m), false, work);
    RowVec vbar(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double r = work.value(k) - batch.initial_value(lo + k);
      sum += check(r, "initial", batch.initial(0, lo + k), 0.0) * r;
      vbar(k) = 2.0 * coef * r / static_cast<double>(n);
    }
    backward_batch(net, work, vbar, nullptr, grad);
  }
  return sum / static_cast<double>(n);
}

}  // namespace

LossReport loss_and_grad(const Network& net, const ProblemSpec& problem,
                         const CollocationBatch& batch, const LossWeights& weights,
                         Vec& grad, const InverseGridTerm* grid, const Vec* sigma) {
  const Eigen::Index n_theta = net.theta.size();
  LossReport report;
  BatchWork work;

  Eigen::Ref<Vec> theta_grad = grad.head(n_theta);
  Vec theta_grad_local = Vec::Zero(n_theta);

  report.interior = interior_grad(net, problem, batch.interior,
                                  weights.interior_weight, theta_grad_local, work);
  report.shock = jump_grad(
      net, problem, batch.shock, weights.beta_shock, theta_grad_local, work,
      [&](Eigen::Index i) { return batch.shock.s(i); }, [](Eigen::Index, double) {});
  if (grid) {
    report.shock_grid = jump_grad(
        net, problem, grid->points, weights.beta_shock, theta_grad_local, work,
        [&](Eigen::Index i) {
          return grid->c + (*sigma)(grid->speed_index[static_cast<size_t>(i)]);
        },
        [&](Eigen::Index i, double w_jump) {
          grad(n_theta + grid->speed_index[static_cast<size_t>(i)]) += w_jump;
        });
  }
  report.boundary = boundary_grad(net, batch, weights.beta_boundary, theta_grad_local, work);
  report.initial = initial_grad(net, batch, weights.beta_initial, theta_grad_local, work);
  report.total = total_loss(report, weights);
  theta_grad += theta_grad_local;
  return report;
}

}  // namespace lelm
