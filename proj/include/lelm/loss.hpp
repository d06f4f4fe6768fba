#pragma once

#include "lelm/autodiff.hpp"
#include "lelm/network.hpp"
#include "lelm/problems.hpp"
#include "lelm/sampling.hpp"

#include <Eigen/Core>

namespace lelm {

struct LossWeights {
  double beta_shock = 1;
  double beta_boundary = 1;
  double beta_initial = 1;
  double interior_weight = 1;
};

struct LossReport {
  double interior = 0;
  double shock = 0;       // collocation shock term
  double shock_grid = 0;  // inverse-mode grid residual; 0 in forward mode
  double boundary = 0;
  double initial = 0;
  double total = 0;
};

double total_loss(const LossReport& report, const LossWeights& weights);

/// Evaluation interface the loss terms consume; Network is the production
/// implementation and tests may substitute closed-form stubs.
class PointEvaluator {
 public:
  virtual ~PointEvaluator() = default;
  virtual double value(const Eigen::Ref<const Vec>& input) const = 0;
  virtual EvalWithDerivs value_and_grad(const Eigen::Ref<const Vec>& input) const = 0;
};

class NetworkEvaluator : public PointEvaluator {
 public:
  explicit NetworkEvaluator(const Network& net) : net_(&net) {}
  double value(const Eigen::Ref<const Vec>& input) const override {
    return forward(*net_, input);
  }
  EvalWithDerivs value_and_grad(const Eigen::Ref<const Vec>& input) const override {
    return forward_with_input_grad(*net_, input);
  }

 private:
  const Network* net_;
};

/// Shock-curve grid residual of the inverse mode: points at (gamma_hat(t_i),
/// t_i) whose speed is the trainable value c + sigma(speed_index[i]).
struct InverseGridTerm {
  ShockPoints points;
  std::vector<Eigen::Index> speed_index;
  double c = 0;
};

double interior_loss(const PointEvaluator& eval, const ProblemSpec& problem,
                     const Eigen::Ref<const Mat>& interior);
double shock_loss(const PointEvaluator& eval, const ProblemSpec& problem,
                  const ShockPoints& points);
double boundary_loss(const PointEvaluator& eval, const CollocationBatch& batch);
double initial_loss(const PointEvaluator& eval, const CollocationBatch& batch);
double inverse_shock_loss(const PointEvaluator& eval, const ProblemSpec& problem,
                          const ShockPoints& shock, const InverseGridTerm& grid,
                          const Eigen::Ref<const Vec>& sigma);

LossReport eval_losses(const PointEvaluator& eval, const ProblemSpec& problem,
                       const CollocationBatch& batch, const LossWeights& weights,
                       const InverseGridTerm* grid = nullptr,
                       const Vec* sigma = nullptr);

/// Loss report plus the gradient of the weighted total, accumulated into
/// `grad` (network parameters first, then the sigma slice in inverse mode).
LossReport loss_and_grad(const Network& net, const ProblemSpec& problem,
                         const CollocationBatch& batch, const LossWeights& weights,
                         Vec& grad, const InverseGridTerm* grid = nullptr,
                         const Vec* sigma = nullptr);

}  // namespace lelm
