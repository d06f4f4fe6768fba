#pragma once

#include "lelm/lifting.hpp"
#include "lelm/loss.hpp"
#include "lelm/network.hpp"
#include "lelm/optim.hpp"
#include "lelm/problems.hpp"
#include "lelm/sampling.hpp"
#include "lelm/shock_infer.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace lelm {

struct TrainConfig {
  std::string problem;
  int depth = 0;  // 0 picks the problem default
  int width = 0;
  LossWeights weights;
  BatchSizes sizes;
  std::int64_t epochs = -1;  // negative picks the problem default
  double base_lr = 0.01;
  std::vector<std::int64_t> milestones;  // empty: 40% and 70% of the budget
  double minibatch_fraction = 1.0;
  std::uint64_t seed = 1;
  int test_nx = 0, test_nt = 0;
  double s_init = 0;        // inverse initial speed guess
  bool s_init_set = false;  // false picks the problem default
  bool strict_determinism = true;
};

/// Table defaults for a problem name; every field can be overridden before
/// the run.
TrainConfig default_config(const std::string& problem_name);

struct HistoryRow {
  std::int64_t epoch = 0;
  double interior = 0, shock = 0, boundary = 0, initial = 0, total = 0, lr = 0;
};

struct TrainResult {
  Network net;  // best-loss parameters
  double best_loss = 0;
  std::int64_t best_epoch = 0;
  std::vector<HistoryRow> history;
  double relative_l2 = 0;
  double wall_clock_s = 0;

  // inverse mode
  bool inverse = false;
  SpeedGrid best_speeds;     // speeds at the best-loss epoch
  CurveEstimate best_curve;  // curve integrated from them
  double final_s_hat = 0;    // total speed after the last step (constant mode)
};

TrainResult train_forward(const TrainConfig& config);
TrainResult train_inverse(const TrainConfig& config);

/// Runs whichever of the two algorithms the named problem requires.
TrainResult train(const TrainConfig& config);

/// User-facing solution: the network evaluated at (x, t, phi(x, t)).
double project(const Network& net, const ShockGeometry& geometry,
               const ProblemSpec& problem, const double* x, double t);

/// || u - u_check ||_2 / || u ||_2 on a uniform grid with nx points per
/// spatial axis and nt time slices, endpoints included.
double relative_l2(const Network& net, const ShockGeometry& geometry,
                   const ProblemSpec& problem, int nx, int nt);

}  // namespace lelm
