#include "lelm/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lelm {
namespace {

constexpr double kDivergedLoss = 1e6;
constexpr int kDivergedPatience = 100;

std::vector<std::int64_t> schedule_milestones(const TrainConfig& config) {
  if (!config.milestones.empty()) return config.milestones;
  return {(config.epochs * 2) / 5, (config.epochs * 7) / 10};
}

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void check_diverged(double total, std::int64_t epoch, int& streak) {
  if (!std::isfinite(total)) {
    std::ostringstream msg;
    msg << "non-finite total loss at epoch " << epoch;
    throw std::runtime_error(msg.str());
  }
  streak = total > kDivergedLoss ? streak + 1 : 0;
  if (streak >= kDivergedPatience) {
    std::ostringstream msg;
    msg << "training diverged: total loss above " << kDivergedLoss << " for "
        << kDivergedPatience << " consecutive epochs (epoch " << epoch << ")";
    throw std::runtime_error(msg.str());
  }
}

// Recomputes the phi input row of the fixed datasets against new geometry
// (inverse mode moves the sheet every epoch).
void update_phi(Mat& inputs, const ShockGeometry& geometry) {
  const Eigen::Index dim = inputs.rows() - 2;
  for (Eigen::Index i = 0; i < inputs.cols(); ++i) {
    double x[2] = {inputs(0, i), dim == 2 ? inputs(1, i) : 0.0};
    inputs(dim + 1, i) = phi(geometry, x, inputs(dim, i));
  }
}

// Grid residual points (gamma_hat(t_i), t_i) for nodes still inside the
// clipped sheet validity.
InverseGridTerm make_grid_term(const SpeedGrid& grid, const CurveEstimate& curve,
                               double t_max) {
  const Eigen::Index n_nodes = grid.t_nodes.size();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n_nodes; ++i)
    if (grid.t_nodes(i) <= t_max) keep.push_back(i);

  InverseGridTerm term;
  term.c = grid.c;
  const auto n = static_cast<Eigen::Index>(keep.size());
  term.points.xt.resize(2, n);
  term.points.phi_minus = Vec::Zero(n);
  term.points.phi_plus = Vec::Ones(n);
  term.points.s = Vec::Zero(n);  // superseded by the trainable speed
  term.points.jump = Vec::Zero(n);
  term.points.nu = Mat::Ones(1, n);
  term.points.constraint.assign(static_cast<size_t>(n), ConstraintKind::rankine_hugoniot);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double t = grid.t_nodes(keep[static_cast<size_t>(k)]);
    term.points.xt(0, k) = curve.position(t);
    term.points.xt(1, k) = t;
    term.speed_index.push_back(grid.constant_mode ? 0 : keep[static_cast<size_t>(k)]);
  }
  return term;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

TrainConfig default_config(const std::string& problem_name) {
  const ProblemSpec& problem = get_problem(problem_name);
  const ProblemDefaults& d = problem.defaults;
  TrainConfig config;
  config.problem = problem_name;
  config.depth = d.depth;
  config.width = d.width;
  config.weights = {d.beta_shock, d.beta_boundary, d.beta_initial, d.interior_weight};
  config.sizes = {d.n_interior, d.n_shock, d.n_boundary, d.n_initial};
  config.epochs = d.epochs;
  config.test_nx = d.test_nx;
  config.test_nt = d.test_nt;
  config.s_init = problem.inverse_s_init;
  return config;
}

namespace {

TrainConfig resolve(const TrainConfig& raw) {
  TrainConfig config = default_config(raw.problem);
  const TrainConfig blank;
  if (raw.depth > 0) config.depth = raw.depth;
  if (raw.width > 0) config.width = raw.width;
  if (raw.weights.beta_shock != blank.weights.beta_shock ||
      raw.weights.beta_boundary != blank.weights.beta_boundary ||
      raw.weights.beta_initial != blank.weights.beta_initial ||
      raw.weights.interior_weight != blank.weights.interior_weight)
    config.weights = raw.weights;
  if (raw.sizes.n_interior > 0) config.sizes = raw.sizes;
  if (raw.epochs >= 0) config.epochs = raw.epochs;
  config.base_lr = raw.base_lr;
  config.milestones = raw.milestones;
  config.minibatch_fraction = raw.minibatch_fraction;
  config.seed = raw.seed;
  if (raw.test_nx > 0) config.test_nx = raw.test_nx;
  if (raw.test_nt > 0) config.test_nt = raw.test_nt;
  if (raw.s_init_set) config.s_init = raw.s_init;
  config.strict_determinism = raw.strict_determinism;
  return config;
}

}  // namespace

TrainResult train_forward(const TrainConfig& raw) {
  const double t_start = now_seconds();
  const TrainConfig config = resolve(raw);
  const ProblemSpec& problem = get_problem(config.problem);
  if (problem.inverse)
    throw std::invalid_argument("'" + config.problem + "' needs train_inverse");

  const ShockGeometry geometry = build_geometry(problem);
  const CollocationBatch batch =
      sample_batch(problem, geometry, config.sizes, mix_seed(config.seed, 100));
  Network net = init_network(config.depth, config.width, problem.dim + 2, config.seed);

  OptimState optim = init_optim(net.theta.size(), weight_decay_mask(net),
                                config.base_lr, schedule_milestones(config));

  TrainResult result;
  result.best_loss = std::numeric_limits<double>::infinity();
  Vec best_theta = net.theta;
  Vec grad(net.theta.size());
  int streak = 0;
  for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    const CollocationBatch* data = &batch;
    CollocationBatch sub;
    if (config.minibatch_fraction < 1) {
      sub = minibatch(batch, config.minibatch_fraction, config.seed, epoch);
      data = &sub;
    }
    grad.setZero();
    const LossReport report = loss_and_grad(net, problem, *data, config.weights, grad);
    check_diverged(report.total, epoch, streak);
    if (report.total < result.best_loss) {
      result.best_loss = report.total;
      result.best_epoch = epoch;
      best_theta = net.theta;
    }
    result.history.push_back({epoch, report.interior, report.shock, report.boundary,
                              report.initial, report.total, lr_at(optim, epoch)});
    step(optim, net.theta, grad, epoch);
  }
  net.theta = best_theta;
  if (config.epochs == 0) {
    NetworkEvaluator eval(net);
    result.best_loss = eval_losses(eval, problem, batch, config.weights).total;
  }
  result.net = net;
  result.relative_l2 = relative_l2(net, geometry, problem, config.test_nx, config.test_nt);
  result.wall_clock_s = now_seconds() - t_start;
  return result;
}

TrainResult train_inverse(const TrainConfig& raw) {
  const double t_start = now_seconds();
  const TrainConfig config = resolve(raw);
  const ProblemSpec& problem = get_problem(config.problem);
  if (!problem.inverse)
    throw std::invalid_argument("'" + config.problem + "' needs train_forward");

  SpeedGrid speeds = make_speed_grid(problem, config.s_init);
  Network net = init_network(config.depth, config.width, problem.dim + 2, config.seed);
  const Eigen::Index n_theta = net.theta.size();
  const Eigen::Index n_speed = speeds_as_trainables(speeds);

  Vec params(n_theta + n_speed);
  params.head(n_theta) = net.theta;
  params.tail(n_speed) = speeds.values;

  std::vector<std::uint8_t> mask = weight_decay_mask(net);
  mask.resize(static_cast<size_t>(params.size()), 0);  // no decay on speeds
  OptimState optim =
      init_optim(params.size(), mask, config.base_lr, schedule_milestones(config));

  // the boundary/initial/interior datasets are sampled once against an
  // initial curve; only their phi row is refreshed as the curve moves
  CurveEstimate curve = integrate_curve(speeds);
  ShockGeometry geometry = refresh_geometry_clipped(problem, curve);
  CollocationBatch batch =
      sample_batch(problem, geometry, config.sizes, mix_seed(config.seed, 100));

  TrainResult result;
  result.inverse = true;
  result.best_loss = std::numeric_limits<double>::infinity();
  Vec best_params = params;
  Vec grad(params.size());
  int streak = 0;
  for (std::int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    net.theta = params.head(n_theta);
    speeds.values = params.tail(n_speed);

    curve = integrate_curve(speeds);
    double t_exit = -1;
    geometry = refresh_geometry_clipped(problem, curve, &t_exit);
    const double t_max = t_exit < 0 ? problem.horizon : t_exit;
    update_phi(batch.interior, geometry);
    update_phi(batch.boundary, geometry);
    update_phi(batch.initial, geometry);
    batch.shock = sample_shock_points(problem, geometry, config.sizes.n_shock,
                                      mix_seed(config.seed, 200 + static_cast<std::uint64_t>(epoch)));
    const InverseGridTerm grid_term = make_grid_term(speeds, curve, t_max);

    grad.setZero();
    const Vec sigma = speeds.values;
    const LossReport report =
        loss_and_grad(net, problem, batch, config.weights, grad, &grid_term, &sigma);
    check_diverged(report.total, epoch, streak);
    if (report.total < result.best_loss) {
      result.best_loss = report.total;
      result.best_epoch = epoch;
      best_params = params;
    }
    result.history.push_back({epoch, report.interior, report.shock + report.shock_grid,
                              report.boundary, report.initial, report.total,
                              lr_at(optim, epoch)});
    step(optim, params, grad, epoch);
  }

  result.final_s_hat = speeds.c + params(n_theta + 0);

  net.theta = best_params.head(n_theta);
  speeds.values = best_params.tail(n_speed);
  result.net = net;
  result.best_speeds = speeds;
  result.best_curve = integrate_curve(speeds);
  geometry = refresh_geometry_clipped(problem, result.best_curve);
  result.relative_l2 = relative_l2(net, geometry, problem, config.test_nx, config.test_nt);
  result.wall_clock_s = now_seconds() - t_start;
  return result;
}

TrainResult train(const TrainConfig& config) {
  return get_problem(config.problem).inverse ? train_inverse(config)
                                             : train_forward(config);
}

double project(const Network& net, const ShockGeometry& geometry,
               const ProblemSpec& problem, const double* x, double t) {
  if (!problem.in_domain(x, t))
    throw std::invalid_argument("projection point outside the domain closure");
  Vec input(problem.dim + 2);
  for (int a = 0; a < problem.dim; ++a) input(a) = x[a];
  input(problem.dim) = t;
  input(problem.dim + 1) = phi(geometry, x, t);
  return forward(net, input);
}

double relative_l2(const Network& net, const ShockGeometry& geometry,
                   const ProblemSpec& problem, int nx, int nt) {
  const int dim = problem.dim;
  const int ny = dim == 2 ? nx : 1;
  const auto total = static_cast<Eigen::Index>(nx) * ny * nt;
  constexpr Eigen::Index kChunk = 8192;

  BatchWork work;
  Mat inputs(dim + 2, kChunk);
  Vec u_exact(kChunk);
  double num = 0, den = 0;
  Eigen::Index filled = 0;
  auto flush = [&]() {
    if (filled == 0) return;
    eval_batch(net, inputs.leftCols(filled), false, work);
    for (Eigen::Index k = 0; k < filled; ++k) {
      const double d = u_exact(k) - work.value(k);
      num += d * d;
      den += u_exact(k) * u_exact(k);
    }
    filled = 0;
  };

  for (int it = 0; it < nt; ++it) {
    const double t = problem.horizon * it / (nt - 1);
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        double x[2] = {
            problem.x_min[0] + (problem.x_max[0] - problem.x_min[0]) * ix / (nx - 1),
            dim == 2
                ? problem.x_min[1] + (problem.x_max[1] - problem.x_min[1]) * iy / (ny - 1)
                : 0.0};
        for (int a = 0; a < dim; ++a) inputs(a, filled) = x[a];
        inputs(dim, filled) = t;
        inputs(dim + 1, filled) = phi(geometry, x, t);
        u_exact(filled) = exact(problem, x, t);
        ++filled;
        if (filled == kChunk) flush();
      }
    }
  }
  flush();
  (void)total;
  if (den == 0) throw std::runtime_error("exact solution has zero norm on the grid");
  return std::sqrt(num / den);
}

}  // namespace lelm
