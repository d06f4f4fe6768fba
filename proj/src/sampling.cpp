#include "lelm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lelm {
namespace {

// Explicit bit-to-double conversion keeps streams identical across standard
// library implementations.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double sheet_distance(const ShockSheet& sheet, const double* x, double t) {
  return std::abs(x[0] - sheet.gamma(t));
}

}  // namespace

ShockPoints sample_shock_points(const ProblemSpec& problem, const ShockGeometry& geometry,
                                Eigen::Index n, std::uint64_t seed) {
  const int dim = problem.dim;
  ShockPoints pts;
  pts.xt.resize(dim + 1, n);
  pts.phi_minus.resize(n);
  pts.phi_plus.resize(n);
  pts.s.resize(n);
  pts.jump.resize(n);
  pts.nu.resize(dim, n);
  pts.constraint.resize(static_cast<size_t>(n));

  // allocation proportional to each sheet's temporal extent, remainders to
  // the largest fractional parts
  const auto n_sheets = static_cast<Eigen::Index>(geometry.sheets.size());
  double total_extent = 0;
  for (const auto& sheet : geometry.sheets) total_extent += sheet.t_b - sheet.t_a;
  if (!(total_extent > 0)) throw std::invalid_argument("geometry has no sampleable sheets");
  std::vector<Eigen::Index> counts(static_cast<size_t>(n_sheets));
  std::vector<std::pair<double, Eigen::Index>> frac;
  Eigen::Index assigned = 0;
  for (Eigen::Index j = 0; j < n_sheets; ++j) {
    const auto& sheet = geometry.sheets[static_cast<size_t>(j)];
    double share = n * (sheet.t_b - sheet.t_a) / total_extent;
    counts[static_cast<size_t>(j)] = static_cast<Eigen::Index>(std::floor(share));
    assigned += counts[static_cast<size_t>(j)];
    frac.push_back({share - std::floor(share), j});
  }
  std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  for (Eigen::Index r = 0; r < n - assigned; ++r)
    ++counts[static_cast<size_t>(frac[static_cast<size_t>(r)].second)];

  std::mt19937_64 rng(mix(seed, 1));
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < n_sheets; ++j) {
    const auto& sheet = geometry.sheets[static_cast<size_t>(j)];
    for (Eigen::Index k = 0; k < counts[static_cast<size_t>(j)]; ++k) {
      double t;
      do {
        t = sheet.t_a + (sheet.t_b - sheet.t_a) * unit_uniform(rng);
      } while (geometry.degenerate_t >= 0 && std::abs(t - geometry.degenerate_t) < 1e-9);
      double x[2] = {sheet.gamma(t), 0};
      if (dim == 2) x[1] = sheet.y0 + (sheet.y1 - sheet.y0) * unit_uniform(rng);
      const SheetSides sides = phi_limits(geometry, sheet, x, t);
      pts.xt(0, col) = x[0];
      if (dim == 2) pts.xt(1, col) = x[1];
      pts.xt(dim, col) = t;
      pts.phi_minus(col) = sides.phi_minus;
      pts.phi_plus(col) = sides.phi_plus;
      pts.s(col) = sides.s;
      pts.jump(col) = sides.jump;
      for (int a = 0; a < dim; ++a) pts.nu(a, col) = sides.nu(a);
      pts.constraint[static_cast<size_t>(col)] = sides.constraint;
      ++col;
    }
  }
  return pts;
}

CollocationBatch sample_batch(const ProblemSpec& problem, const ShockGeometry& geometry,
                              const BatchSizes& sizes, std::uint64_t seed) {
  if (geometry.dim != problem.dim)
    throw std::invalid_argument("geometry does not belong to this problem");
  const int dim = problem.dim;
  const int in_dim = dim + 2;
  const double T = problem.horizon;
  CollocationBatch batch;

  {
    std::mt19937_64 rng(mix(seed, 0));
    batch.interior.resize(in_dim, sizes.n_interior);
    for (Eigen::Index i = 0; i < sizes.n_interior; ++i) {
      double x[2] = {0, 0};
      double t = 0;
      bool clear = false;
      while (!clear) {
        for (int a = 0; a < dim; ++a)
          x[a] = problem.x_min[static_cast<size_t>(a)] +
                 (problem.x_max[static_cast<size_t>(a)] - problem.x_min[static_cast<size_t>(a)]) *
                     unit_uniform(rng);
        t = T * (1.0 - unit_uniform(rng));
        clear = true;
        for (const auto& sheet : geometry.sheets)
          if (t >= sheet.t_a && t <= sheet.t_b && sheet_distance(sheet, x, t) <= 1e-12)
            clear = false;
      }
      for (int a = 0; a < dim; ++a) batch.interior(a, i) = x[a];
      batch.interior(dim, i) = t;
      batch.interior(dim + 1, i) = phi(geometry, x, t);
    }
  }

  batch.shock = sample_shock_points(problem, geometry, sizes.n_shock, seed);

  {
    std::mt19937_64 rng(mix(seed, 2));
    batch.periodic = problem.boundary == BoundaryKind::periodic;
    if (batch.periodic) {
      batch.boundary.resize(in_dim, sizes.n_boundary);
      batch.boundary_pair.resize(in_dim, sizes.n_boundary);
      const double xl = problem.x_min[0], xr = problem.x_max[0];
      for (Eigen::Index i = 0; i < sizes.n_boundary; ++i) {
        const double t = T * (1.0 - unit_uniform(rng));
        const double pl[1] = {xl}, pr[1] = {xr};
        batch.boundary.col(i) << xl, t, phi(geometry, pl, t);
        batch.boundary_pair.col(i) << xr, t, phi(geometry, pr, t);
      }
    } else {
      const int faces = 2 * dim;
      batch.boundary.resize(in_dim, sizes.n_boundary);
      batch.boundary_value.resize(sizes.n_boundary);
      for (Eigen::Index i = 0; i < sizes.n_boundary; ++i) {
        const int face = static_cast<int>(i % faces);
        const int axis = face / 2;
        double x[2] = {0, 0};
        for (int a = 0; a < dim; ++a)
          x[a] = problem.x_min[static_cast<size_t>(a)] +
                 (problem.x_max[static_cast<size_t>(a)] - problem.x_min[static_cast<size_t>(a)]) *
                     unit_uniform(rng);
        x[axis] = (face % 2 == 0) ? problem.x_min[static_cast<size_t>(axis)]
                                  : problem.x_max[static_cast<size_t>(axis)];
        const double t = T * (1.0 - unit_uniform(rng));
        for (int a = 0; a < dim; ++a) batch.boundary(a, i) = x[a];
        batch.boundary(dim, i) = t;
        batch.boundary(dim + 1, i) = phi(geometry, x, t);
        batch.boundary_value(i) = exact(problem, x, t);
      }
    }
  }

  {
    std::mt19937_64 rng(mix(seed, 3));
    batch.initial.resize(in_dim, sizes.n_initial);
    batch.initial_value.resize(sizes.n_initial);
    for (Eigen::Index i = 0; i < sizes.n_initial; ++i) {
      double x[2] = {0, 0};
      for (int a = 0; a < dim; ++a)
        x[a] = problem.x_min[static_cast<size_t>(a)] +
               (problem.x_max[static_cast<size_t>(a)] - problem.x_min[static_cast<size_t>(a)]) *
                   unit_uniform(rng);
      for (int a = 0; a < dim; ++a) batch.initial(a, i) = x[a];
      batch.initial(dim, i) = 0;
      batch.initial(dim + 1, i) = phi(geometry, x, 0);
      batch.initial_value(i) = problem.initial(x);
    }
  }

  return batch;
}

namespace {

std::vector<Eigen::Index> pick_indices(Eigen::Index n, double fraction, std::mt19937_64& rng) {
  const auto m = static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
  std::vector<Eigen::Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto j = i + static_cast<Eigen::Index>(
                           unit_uniform(rng) * static_cast<double>(n - i));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Eigen::MatrixXd gather_cols(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(idx[i]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
  return out;
}

}  // namespace

CollocationBatch minibatch(const CollocationBatch& batch, double fraction,
                           std::uint64_t seed, std::int64_t epoch) {
  if (!(fraction > 0) || fraction > 1)
    throw std::invalid_argument("mini-batch fraction must be in (0, 1]");
  if (fraction == 1) return batch;
  std::mt19937_64 rng(mix(seed, 16 + static_cast<std::uint64_t>(epoch)));
  CollocationBatch out;
  out.periodic = batch.periodic;

  auto ii = pick_indices(batch.interior.cols(), fraction, rng);
  out.interior = gather_cols(batch.interior, ii);

  auto si = pick_indices(batch.shock.size(), fraction, rng);
  out.shock.xt = gather_cols(batch.shock.xt, si);
  out.shock.phi_minus = gather(batch.shock.phi_minus, si);
  out.shock.phi_plus = gather(batch.shock.phi_plus, si);
  out.shock.s = gather(batch.shock.s, si);
  out.shock.jump = gather(batch.shock.jump, si);
  out.shock.nu = gather_cols(batch.shock.nu, si);
  for (auto k : si) out.shock.constraint.push_back(batch.shock.constraint[static_cast<size_t>(k)]);

  auto bi = pick_indices(batch.boundary.cols(), fraction, rng);
  out.boundary = gather_cols(batch.boundary, bi);
  if (batch.periodic)
    out.boundary_pair = gather_cols(batch.boundary_pair, bi);
  else
    out.boundary_value = gather(batch.boundary_value, bi);

  auto ni = pick_indices(batch.initial.cols(), fraction, rng);
  out.initial = gather_cols(batch.initial, ni);
  out.initial_value = gather(batch.initial_value, ni);
  return out;
}

}  // namespace lelm
