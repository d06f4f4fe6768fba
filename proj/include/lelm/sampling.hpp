#pragma once

#include "lelm/lifting.hpp"
#include "lelm/problems.hpp"

#include <Eigen/Core>

#include <cstdint>

namespace lelm {

struct BatchSizes {
  Eigen::Index n_interior = 0;
  Eigen::Index n_shock = 0;
  Eigen::Index n_boundary = 0;
  Eigen::Index n_initial = 0;
};

/// On-sheet collocation points with the data the jump constraint needs.
/// xt rows are the spatial coordinates followed by t; evaluating the network
/// requires appending phi_minus or phi_plus as the last input.
struct ShockPoints {
  Eigen::MatrixXd xt;
  Eigen::VectorXd phi_minus, phi_plus, s, jump;
  Eigen::MatrixXd nu;  // dim x N
  std::vector<ConstraintKind> constraint;

  Eigen::Index size() const { return xt.cols(); }
};

/// The four collocation datasets. Input matrices hold full network inputs
/// (x[, y], t, phi) column per point.
struct CollocationBatch {
  Eigen::MatrixXd interior;
  ShockPoints shock;
  Eigen::MatrixXd boundary;
  Eigen::VectorXd boundary_value;  // Dirichlet data; empty when periodic
  Eigen::MatrixXd boundary_pair;   // periodic partner inputs; empty otherwise
  bool periodic = false;
  Eigen::MatrixXd initial;
  Eigen::VectorXd initial_value;
};

CollocationBatch sample_batch(const ProblemSpec& problem, const ShockGeometry& geometry,
                              const BatchSizes& sizes, std::uint64_t seed);

/// Regenerates only the on-sheet dataset (inverse mode refreshes it each
/// epoch against the current curve estimate).
ShockPoints sample_shock_points(const ProblemSpec& problem, const ShockGeometry& geometry,
                                Eigen::Index n, std::uint64_t seed);

/// Uniform subsample without replacement of each dataset; fraction 1 returns
/// the batch unchanged.
CollocationBatch minibatch(const CollocationBatch& batch, double fraction,
                           std::uint64_t seed, std::int64_t epoch);

}  // namespace lelm
