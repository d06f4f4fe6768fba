#pragma once

#include "lelm/lifting.hpp"
#include "lelm/problems.hpp"

#include <Eigen/Core>

namespace lelm {

/// Trainable shock-speed representation on a uniform time grid. In affine
/// mode the total speed is s_hat(t) = c + sigma(t) with the trainable values
/// holding only the offset sigma, so a zero initialization reproduces the
/// hypothesis line x0 + c t. Constant mode stores a single trainable scalar.
struct SpeedGrid {
  Eigen::VectorXd t_nodes;  // uniform, t_nodes(0) = 0, t_nodes(n-1) = T
  Eigen::VectorXd values;   // trainable offsets; length 1 in constant mode
  double c = 0;             // hypothesis slope
  double x0 = 0;            // anchor gamma_hat(0)
  bool constant_mode = false;

  double total_speed_at_node(Eigen::Index i) const {
    return c + (constant_mode ? values(0) : values(i));
  }
};

SpeedGrid make_speed_grid(const ProblemSpec& problem, double s_init);

/// Reconstructed shock curve: node values of gamma_hat plus smooth
/// interpolants for gamma_hat(t) and s_hat(t) on [0, T].
struct CurveEstimate {
  Eigen::VectorXd t_nodes;
  Eigen::VectorXd gamma_nodes;
  double c = 0;
  double x0 = 0;
  bool constant_mode = false;
  Eigen::VectorXd offset_values;      // sigma at nodes
  Eigen::VectorXd offset_integral;    // accumulated integral of sigma at nodes

  double speed(double t) const;
  double position(double t) const;
};

/// Integrates d(gamma_hat)/dt = s_hat(t) over the grid. The right-hand side
/// between nodes comes from local polynomial interpolation of the node
/// speeds; each interval is covered by two fourth-order Runge-Kutta steps.
CurveEstimate integrate_curve(const SpeedGrid& grid);

/// Single-sheet geometry for the current curve estimate. Throws a
/// runtime_error naming the exit time if the curve leaves the closed spatial
/// domain before T (diverged inference).
ShockGeometry refresh_geometry(const ProblemSpec& problem, const CurveEstimate& curve);

/// As refresh_geometry, but instead of failing it clips the sheet's sampling
/// validity to the in-domain part of the curve. Used inside the training
/// loop, where early speed guesses routinely shoot past the domain.
ShockGeometry refresh_geometry_clipped(const ProblemSpec& problem,
                                       const CurveEstimate& curve,
                                       double* exit_time = nullptr);

/// Number of trainable speed values appended to the parameter vector.
Eigen::Index speeds_as_trainables(const SpeedGrid& grid);

}  // namespace lelm
