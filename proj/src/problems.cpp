#include "lelm/problems.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace lelm {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Step 1_{x >= a}. Right limits at jumps throughout this registry.
double heavi(double x) { return x >= 0.0 ? 1.0 : 0.0; }

ProblemSpec make_convection_unit() {
  ProblemSpec p;
  p.name = "convection_unit";
  p.dim = 1;
  p.x_min = {0, 0};
  p.x_max = {2 * kPi, 0};
  p.horizon = 2 * kPi;
  p.flux = [](int, double u) { return -u; };
  p.flux_prime = [](int, double) { return -1.0; };
  p.flux_second = [](int, double) { return 0.0; };
  p.initial = [](const double* x) {
    return heavi(x[0] - 2 * kPi / 3) - heavi(x[0] - 4 * kPi / 3);
  };
  p.exact_fn = [](const double* x, double t) {
    double y = std::fmod(x[0] + t, 2 * kPi);
    if (y < 0) y += 2 * kPi;
    return (y >= 2 * kPi / 3 && y < 4 * kPi / 3) ? 1.0 : 0.0;
  };
  p.boundary = BoundaryKind::periodic;
  p.defaults = {2, 40, 400, 1, 400, 1.0, 10000, 4000, 2000, 1000, 1000, 1000, 20000};
  return p;
}

ProblemSpec make_convection_alt_phi() {
  ProblemSpec p = make_convection_unit();
  p.name = "convection_alt_phi";
  return p;
}

ProblemSpec make_convection_fast() {
  ProblemSpec p;
  p.name = "convection_fast";
  p.dim = 1;
  p.x_min = {0, 0};
  p.x_max = {2 * kPi, 0};
  p.horizon = kPi / 5;
  p.flux = [](int, double u) { return -50.0 * u; };
  p.flux_prime = [](int, double) { return -50.0; };
  p.flux_second = [](int, double) { return 0.0; };
  p.initial = [](const double* x) {
    return heavi(x[0] - 2 * kPi / 3) - heavi(x[0] - 4 * kPi / 3);
  };
  p.exact_fn = [](const double* x, double t) {
    double y = std::fmod(x[0] + 50.0 * t, 2 * kPi);
    if (y < 0) y += 2 * kPi;
    return (y >= 2 * kPi / 3 && y < 4 * kPi / 3) ? 1.0 : 0.0;
  };
  p.boundary = BoundaryKind::periodic;
  p.defaults = {6, 40, 400, 10, 400, 1.0, 80000, 60000, 5000, 5000, 1000, 1000, 50000};
  return p;
}

ProblemSpec make_burgers_shock() {
  ProblemSpec p;
  p.name = "burgers_shock";
  p.dim = 1;
  p.x_min = {-1, 0};
  p.x_max = {1, 0};
  p.horizon = 1;
  p.flux = [](int, double u) { return 0.5 * u * u; };
  p.flux_prime = [](int, double u) { return u; };
  p.flux_second = [](int, double) { return 1.0; };
  p.initial = [](const double* x) { return x[0] < 0 ? 2.0 : 0.0; };
  p.exact_fn = [](const double* x, double t) { return x[0] < t ? 2.0 : 0.0; };
  p.boundary = BoundaryKind::dirichlet;
  p.defaults = {3, 40, 400, 1, 400, 1.0, 10000, 1000, 1000, 1000, 1000, 1000, 20000};
  return p;
}

ProblemSpec make_burgers_merging() {
  ProblemSpec p;
  p.name = "burgers_merging";
  p.dim = 1;
  p.x_min = {0, 0};
  p.x_max = {3, 0};
  p.horizon = 2;
  p.flux = [](int, double u) { return 0.5 * u * u; };
  p.flux_prime = [](int, double u) { return u; };
  p.flux_second = [](int, double) { return 1.0; };
  p.initial = [](const double* x) {
    if (x[0] < 1) return x[0];
    if (x[0] < 2) return 0.0;
    return -2.0;
  };
  p.exact_fn = [](const double* x, double t) {
    const double t_merge = (5.0 - std::sqrt(13.0)) / 2.0;
    if (t <= t_merge) {
      double g1 = std::sqrt(1 + t);
      double g2 = 2 - t;
      if (x[0] < g1) return x[0] / (1 + t);
      if (x[0] < g2) return 0.0;
      return -2.0;
    }
    double g3 = std::sqrt(13.0 * (1 + t)) - 2 * (1 + t);
    if (x[0] < g3) return x[0] / (1 + t);
    return -2.0;
  };
  p.boundary = BoundaryKind::dirichlet;
  p.defaults = {6, 40, 400, 1, 400, 1.0, 80000, 15000, 5000, 5000, 1000, 1000, 50000};
  return p;
}

ProblemSpec make_burgers_rarefaction() {
  ProblemSpec p;
  p.name = "burgers_rarefaction";
  p.dim = 1;
  p.x_min = {-1, 0};
  p.x_max = {6, 0};
  p.horizon = 10;
  p.flux = [](int, double u) { return 0.25 * u * u; };
  p.flux_prime = [](int, double u) { return 0.5 * u; };
  p.flux_second = [](int, double) { return 0.5; };
  p.initial = [](const double* x) { return (x[0] >= 0 && x[0] < 1) ? 1.0 : 0.0; };
  p.exact_fn = [](const double* x, double t) {
    double gamma = t <= 4 ? t / 4 + 1 : std::sqrt(t);
    if (x[0] >= gamma) return 0.0;
    if (x[0] <= 0) return 0.0;
    // fan occupies 0 < x < t/2; plateau u = 1 between fan and shock
    if (t > 0 && x[0] < t / 2) return 2 * x[0] / t;
    return 1.0;
  };
  p.boundary = BoundaryKind::dirichlet;
  p.defaults = {6, 40, 400, 1, 400, 300.0, 80000, 10000, 10000, 5000, 1000, 1000, 50000};
  return p;
}

ProblemSpec make_burgers_2d() {
  ProblemSpec p;
  p.name = "burgers_2d";
  p.dim = 2;
  p.x_min = {0, 0};
  p.x_max = {3, 1};
  p.horizon = 0.4;
  p.flux = [](int, double u) { return 0.5 * u * u; };
  p.flux_prime = [](int, double u) { return u; };
  p.flux_second = [](int, double) { return 1.0; };
  p.initial = [](const double* x) {
    if (x[0] < 1) return 4.0;
    if (x[0] < 2) return 2.0;
    return -1.0;
  };
  p.exact_fn = [](const double* x, double t) {
    if (x[0] < 1 + 3 * t) return 4.0;
    if (x[0] < 2 + 0.5 * t) return 2.0;
    return -1.0;
  };
  p.boundary = BoundaryKind::dirichlet;
  p.defaults = {4, 80, 50, 1, 400, 1.0, 80000, 20000, 30000, 10000, 1000, 17, 50000};
  return p;
}

ProblemSpec make_burgers_inverse_const() {
  ProblemSpec p = make_burgers_shock();
  p.name = "burgers_inverse_const";
  p.defaults.depth = 4;
  p.inverse = true;
  p.inverse_x0 = 0;
  p.inverse_hypothesis_slope = 0;
  p.inverse_mesh_h = 0;
  p.inverse_s_init = -5;
  p.inverse_constant_speed = true;
  return p;
}

ProblemSpec make_burgers_inverse_curved() {
  ProblemSpec p;
  p.name = "burgers_inverse_curved";
  p.dim = 1;
  p.x_min = {0, 0};
  p.x_max = {2, 0};
  p.horizon = 0.5;
  p.flux = [](int, double u) { return 0.5 * u * u; };
  p.flux_prime = [](int, double u) { return u; };
  p.flux_second = [](int, double) { return 1.0; };
  p.initial = [](const double* x) { return x[0] < 1 ? 4 * x[0] : 0.0; };
  p.exact_fn = [](const double* x, double t) {
    double gamma = std::sqrt(1 + 4 * t);
    return x[0] < gamma ? 4 * x[0] / (1 + 4 * t) : 0.0;
  };
  p.boundary = BoundaryKind::dirichlet;
  p.defaults = {6, 40, 50, 1, 400, 100.0, 80000, 5000, 5000, 5000, 1000, 1000, 50000};
  p.inverse = true;
  p.inverse_x0 = 1;
  p.inverse_hypothesis_slope = 0.5;
  p.inverse_mesh_h = 0.02;
  p.inverse_s_init = 0;  // offset relative to the hypothesis slope
  return p;
}

const std::vector<ProblemSpec>& registry() {
  static const std::vector<ProblemSpec> problems = {
      make_convection_unit(),     make_convection_alt_phi(),
      make_convection_fast(),     make_burgers_shock(),
      make_burgers_merging(),     make_burgers_rarefaction(),
      make_burgers_2d(),          make_burgers_inverse_const(),
      make_burgers_inverse_curved()};
  return problems;
}

}  // namespace

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : registry()) out.push_back(p.name);
    return out;
  }();
  return names;
}

const ProblemSpec& get_problem(const std::string& name) {
  for (const auto& p : registry())
    if (p.name == name) return p;
  std::string msg = "unknown problem '" + name + "'; valid:";
  for (const auto& n : problem_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

double exact(const ProblemSpec& problem, const double* x, double t) {
  return problem.exact_fn(x, t);
}

void flux_and_prime(const ProblemSpec& problem, double u,
                    Eigen::VectorXd& f, Eigen::VectorXd& f_prime) {
  f.resize(problem.dim);
  f_prime.resize(problem.dim);
  for (int j = 0; j < problem.dim; ++j) {
    f(j) = problem.flux(j, u);
    f_prime(j) = problem.flux_prime(j, u);
  }
}

}  // namespace lelm
