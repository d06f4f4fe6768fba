#include "lelm/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lelm {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOnSheetTol = 1e-12;

double heavi(double d) { return d >= 0.0 ? 1.0 : 0.0; }

// Wrapped convection lines x = s t + x_i + 2k pi, ordered by offset so each
// sheet's side levels equal the count of lines below it (lines never cross:
// all move at the same speed).
ShockGeometry convection_geometry(const ProblemSpec& problem, double s, bool transported) {
  const double T = problem.horizon;
  const double x1 = 2 * kPi / 3, x2 = 4 * kPi / 3;
  const int n1 = static_cast<int>(std::ceil(-(s * T + x1) / (2 * kPi)));
  const int n2 = static_cast<int>(std::ceil(-(s * T + x2) / (2 * kPi)));

  struct Line {
    double offset;
    double jump;  // [[u0]] at the seed point: +1 at x1, -1 at x2
  };
  std::vector<Line> lines;
  for (int k = 0; k <= n1; ++k) lines.push_back({x1 + 2 * kPi * k, 1.0});
  for (int k = 0; k <= n2; ++k) lines.push_back({x2 + 2 * kPi * k, -1.0});
  std::sort(lines.begin(), lines.end(),
            [](const Line& a, const Line& b) { return a.offset < b.offset; });

  ShockGeometry geo;
  geo.dim = 1;
  if (transported) {
    geo.variant = ShockGeometry::Variant::transported_initial_data;
    geo.profile = [x1, x2](double y) { return heavi(y - x1) - heavi(y - x2); };
    geo.transport_speed = s;
    geo.wraps = n1;
  }
  int id = 0;
  for (const auto& line : lines) {
    ShockSheet sheet;
    sheet.id = id;
    const double c = line.offset;
    sheet.gamma = [s, c](double t) { return s * t + c; };
    sheet.speed = [s](double) { return s; };
    // in-domain window of the (moving) line, clipped to [0, T]
    sheet.t_a = std::max(0.0, (c - 2 * kPi) / (-s));
    sheet.t_b = std::min(T, c / (-s));
    sheet.phi_t_a = 0;
    sheet.phi_t_b = T;
    sheet.constraint = ConstraintKind::prescribed_jump;
    if (transported) {
      // phi follows the transported plateaus {0,1}; orient the normal so the
      // higher-phi side is always phi+ = 1
      sheet.nu = {line.jump > 0 ? 1.0 : -1.0, 0.0};
      sheet.level_lo = 0;
      sheet.level_hi = 1;
      sheet.jump = 1.0;
    } else {
      sheet.nu = {1, 0};
      sheet.level_lo = id;
      sheet.level_hi = id + 1;
      sheet.jump = line.jump;
    }
    geo.sheets.push_back(std::move(sheet));
    ++id;
  }
  return geo;
}

ShockGeometry merging_geometry() {
  const double t_star = (5.0 - std::sqrt(13.0)) / 2.0;
  ShockGeometry geo;
  geo.dim = 1;
  geo.degenerate_t = t_star;

  ShockSheet g1;
  g1.id = 0;
  g1.gamma = [](double t) { return std::sqrt(1 + t); };
  g1.speed = [](double t) { return 0.5 / std::sqrt(1 + t); };
  g1.t_a = 0;
  g1.t_b = t_star;
  g1.phi_t_a = 0;
  g1.phi_t_b = t_star;
  g1.level_lo = 0;
  g1.level_hi = 1;

  ShockSheet g2;
  g2.id = 1;
  g2.gamma = [](double t) { return 2 - t; };
  g2.speed = [](double) { return -1.0; };
  g2.t_a = 0;
  g2.t_b = t_star;
  g2.phi_t_a = 0;
  g2.phi_t_b = t_star;
  g2.level_lo = 1;
  g2.level_hi = 2;

  ShockSheet g3;
  g3.id = 2;
  g3.gamma = [](double t) { return std::sqrt(13 * (1 + t)) - 2 * (1 + t); };
  g3.speed = [](double t) { return 0.5 * std::sqrt(13.0 / (1 + t)) - 2.0; };
  g3.t_a = t_star;
  g3.t_b = 2;
  g3.phi_t_a = std::nextafter(t_star, 2.0);
  g3.phi_t_b = 2;
  g3.level_lo = 0;
  g3.level_hi = 2;

  geo.sheets = {g1, g2, g3};
  return geo;
}

}  // namespace

ShockGeometry build_geometry(const ProblemSpec& problem) {
  if (problem.inverse)
    throw std::invalid_argument(
        "geometry of '" + problem.name + "' is unknown; run speed inference");

  if (problem.name == "convection_unit" || problem.name == "convection_fast")
    return convection_geometry(problem, problem.flux_prime(0, 0.0), false);
  if (problem.name == "convection_alt_phi")
    return convection_geometry(problem, -1.0, true);

  if (problem.name == "burgers_shock") {
    ShockGeometry geo;
    geo.dim = 1;
    ShockSheet sheet;
    sheet.gamma = [](double t) { return t; };
    sheet.speed = [](double) { return 1.0; };
    sheet.t_a = sheet.phi_t_a = 0;
    sheet.t_b = sheet.phi_t_b = 1;
    geo.sheets = {sheet};
    return geo;
  }

  if (problem.name == "burgers_merging") return merging_geometry();

  if (problem.name == "burgers_rarefaction") {
    ShockGeometry geo;
    geo.dim = 1;
    ShockSheet sheet;
    sheet.gamma = [](double t) { return t <= 4 ? t / 4 + 1 : std::sqrt(t); };
    sheet.speed = [](double t) { return t <= 4 ? 0.25 : 0.5 / std::sqrt(t); };
    sheet.t_a = sheet.phi_t_a = 0;
    sheet.t_b = sheet.phi_t_b = 10;
    geo.sheets = {sheet};
    return geo;
  }

  if (problem.name == "burgers_2d") {
    ShockGeometry geo;
    geo.dim = 2;
    ShockSheet a;  // faster left shock
    a.id = 0;
    a.gamma = [](double t) { return 1 + 3 * t; };
    a.speed = [](double) { return 3.0; };
    a.t_a = a.phi_t_a = 0;
    a.t_b = a.phi_t_b = 0.4;
    a.level_lo = 0;
    a.level_hi = 1;
    a.y0 = 0;
    a.y1 = 1;
    ShockSheet b;
    b.id = 1;
    b.gamma = [](double t) { return 2 + 0.5 * t; };
    b.speed = [](double) { return 0.5; };
    b.t_a = b.phi_t_a = 0;
    b.t_b = b.phi_t_b = 0.4;
    b.level_lo = 1;
    b.level_hi = 2;
    b.y0 = 0;
    b.y1 = 1;
    geo.sheets = {a, b};
    return geo;
  }

  throw std::invalid_argument("no registered geometry for '" + problem.name + "'");
}

double phi(const ShockGeometry& geometry, const double* x, double t) {
  if (geometry.variant == ShockGeometry::Variant::transported_initial_data) {
    double sum = 0;
    for (int k = 0; k <= geometry.wraps; ++k)
      sum += geometry.profile(x[0] - geometry.transport_speed * t - 2 * kPi * k);
    return sum;
  }
  double sum = 0;
  for (const auto& sheet : geometry.sheets) {
    if (t < sheet.phi_t_a || t > sheet.phi_t_b) continue;
    // registered normals lie along the first spatial axis, so the signed
    // distance along nu is nu_1 (x_1 - gamma(t))
    const double dist = sheet.nu(0) * (x[0] - sheet.gamma(t));
    sum += sheet.weight() * heavi(dist);
  }
  return sum;
}

SheetSides phi_limits(const ShockGeometry& geometry, const ShockSheet& sheet,
                      const double* x, double t) {
  if (t == geometry.degenerate_t)
    throw std::invalid_argument("degenerate query at the sheet-intersection instant");
  if (t < sheet.t_a || t > sheet.t_b)
    throw std::invalid_argument("time outside the sheet's validity interval");
  const double dist = sheet.nu(0) * (x[0] - sheet.gamma(t));
  if (std::abs(dist) > kOnSheetTol)
    throw std::invalid_argument("point is not on the sheet");

  SheetSides sides;
  sides.phi_minus = sheet.level_lo;
  sides.phi_plus = sheet.level_hi;
  sides.s = sheet.speed(t);
  sides.nu = sheet.nu;
  sides.constraint = sheet.constraint;
  sides.jump = sheet.jump;
  return sides;
}

}  // namespace lelm
