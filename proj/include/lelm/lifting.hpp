#pragma once

#include "lelm/problems.hpp"

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace lelm {

enum class ConstraintKind { rankine_hugoniot, prescribed_jump };

/// One discontinuity surface: a curve x = gamma(t) in d=1, or the plane
/// {x = gamma(t), y in [y0,y1]} in d=2. The sheet's contribution to phi is
/// weight * H(nu.x - gamma(t)), active while t lies in [phi_t_a, phi_t_b];
/// outside that window an exited sheet still contributes through the
/// extrapolated line position, which is how wrapped convection sheets keep
/// phi consistent in time.
struct ShockSheet {
  int id = 0;
  double t_a = 0, t_b = 0;          // sampling validity (sheet inside the domain)
  double phi_t_a = 0, phi_t_b = 0;  // activity window for the phi sum
  std::function<double(double)> gamma;
  std::function<double(double)> speed;
  Eigen::Vector2d nu{1, 0};  // spatial unit normal (second entry unused for d=1)
  int level_lo = 0, level_hi = 1;  // one-sided phi values (phi-, phi+)
  ConstraintKind constraint = ConstraintKind::rankine_hugoniot;
  double jump = 0;  // prescribed value of [[u]], used by prescribed_jump only
  double y0 = 0, y1 = 0;  // plane extent in the second spatial axis (d=2)

  int weight() const { return level_hi - level_lo; }
};

struct ShockGeometry {
  enum class Variant { heaviside_sum, transported_initial_data };
  Variant variant = Variant::heaviside_sum;
  int dim = 1;
  std::vector<ShockSheet> sheets;

  // transported_initial_data only: phi(x,t) = sum_{k=0}^{wraps} profile(x - st - 2k pi)
  std::function<double(double)> profile;
  double transport_speed = 0;
  int wraps = 0;

  double degenerate_t = -1;  // sheet-intersection instant excluded from queries, if any
};

/// Known-geometry construction for the forward problems; inverse problems
/// must go through the speed-inference refresh instead.
ShockGeometry build_geometry(const ProblemSpec& problem);

double phi(const ShockGeometry& geometry, const double* x, double t);

struct SheetSides {
  double phi_minus = 0, phi_plus = 0;
  double s = 0;
  Eigen::Vector2d nu{1, 0};
  ConstraintKind constraint = ConstraintKind::rankine_hugoniot;
  double jump = 0;
};

/// One-sided phi values and constraint data at a point on the sheet.
/// The point must satisfy |nu.x - gamma(t)| <= 1e-12 with t in [t_a, t_b].
SheetSides phi_limits(const ShockGeometry& geometry, const ShockSheet& sheet,
                      const double* x, double t);

}  // namespace lelm
