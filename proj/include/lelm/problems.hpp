#pragma once

#include <Eigen/Core>

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace lelm {

enum class BoundaryKind { dirichlet, periodic };

/// Table-driven default hyper-parameters of a benchmark problem.
struct ProblemDefaults {
  int depth = 0;
  int width = 0;
  double beta_shock = 0;
  double beta_boundary = 0;
  double beta_initial = 0;
  double interior_weight = 1.0;
  Eigen::Index n_interior = 0;
  Eigen::Index n_shock = 0;
  Eigen::Index n_boundary = 0;
  Eigen::Index n_initial = 0;
  int test_nx = 1000;
  int test_nt = 1000;
  std::int64_t epochs = 20000;
};

/// One registered benchmark: domain, flux, data, exact-solution oracle and
/// the hyper-parameter defaults for it.
struct ProblemSpec {
  std::string name;
  int dim = 1;  // spatial dimension d
  std::array<double, 2> x_min{0, 0};
  std::array<double, 2> x_max{0, 0};
  double horizon = 0;  // T

  // flux component j and its first/second derivative in u
  std::function<double(int, double)> flux;
  std::function<double(int, double)> flux_prime;
  std::function<double(int, double)> flux_second;

  std::function<double(const double*)> initial;            // u0(x)
  std::function<double(const double*, double)> exact_fn;   // u(x, t), right limit on shocks
  BoundaryKind boundary = BoundaryKind::dirichlet;

  ProblemDefaults defaults;

  // inverse-mode problems (unknown shock trajectory)
  bool inverse = false;
  double inverse_x0 = 0;                // gamma(0)
  double inverse_hypothesis_slope = 0;  // c in gamma_hat(t) = c t + gamma_bar(t)
  double inverse_mesh_h = 0.02;         // speed-grid meshwidth (0 => constant speed)
  double inverse_s_init = 0;            // initial trainable speed value
  bool inverse_constant_speed = false;

  bool in_domain(const double* x, double t, double pad = 1e-12) const {
    if (t < -pad || t > horizon + pad) return false;
    for (int j = 0; j < dim; ++j)
      if (x[j] < x_min[static_cast<size_t>(j)] - pad ||
          x[j] > x_max[static_cast<size_t>(j)] + pad)
        return false;
    return true;
  }
};

const std::vector<std::string>& problem_names();

/// Lookup by registered name; throws listing valid names on failure.
const ProblemSpec& get_problem(const std::string& name);

double exact(const ProblemSpec& problem, const double* x, double t);

/// Componentwise flux values and derivatives at u.
void flux_and_prime(const ProblemSpec& problem, double u,
                    Eigen::VectorXd& f, Eigen::VectorXd& f_prime);

}  // namespace lelm
