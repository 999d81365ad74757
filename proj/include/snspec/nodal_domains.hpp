#pragma once

// Nodal-domain counting on a uniform grid: sign field of u sampled at interior
// grid points, near-zero values dropped, 4-connected components by union-find.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "snspec/geometry.hpp"
#include "snspec/parallel.hpp"
#include "snspec/trefftz_solver.hpp"
#include "snspec/union_find.hpp"

namespace snspec {

struct NodalOptions {
  int grid = 256;
  double zero_tol = 1e-6;   // relative to max |u| over the sampled points
  int boundary_band = 2;    // excluded cells next to either boundary curve
};

struct NodalReport {
  int grid = 0;
  int count = 0;
  std::vector<std::size_t> component_sizes;  // descending
  double zero_tol = 0.0;
  int boundary_band = 0;
  std::size_t sampled = 0;                   // interior grid points used
  std::size_t zero_band = 0;                 // points dropped as |u| <= tol max|u|
};

namespace detail {

struct NodalGrid {
  int n = 0;
  double x0 = 0.0, y0 = 0.0, h = 0.0;
  std::vector<std::uint8_t> interior;  // row-major n x n
};

// Grid over the bounding square of the outer curve. A point is kept when its
// radial gap to the hole exceeds band*h and its radial gap to the outer curve
// exceeds band*h*sqrt(1 + a) (the radial gap over-estimates the normal
// distance by at most that factor).
inline NodalGrid interior_grid(const DoublyConnectedDomain& domain, const NodalOptions& opts) {
  if (opts.grid < 16) throw std::invalid_argument("count_nodal_domains: grid too coarse");
  NodalGrid g;
  g.n = opts.grid;
  const Point c = domain.center();
  const double R = domain.R_M();
  g.h = 2.0 * R / (g.n - 1);
  g.x0 = c.x - R;
  g.y0 = c.y - R;
  const double inner_gap = opts.boundary_band * g.h;
  const double outer_gap = opts.boundary_band * g.h * std::sqrt(1.0 + domain.a());
  g.interior.assign(static_cast<std::size_t>(g.n) * g.n, 0);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      const Point q{g.x0 + j * g.h - c.x, g.y0 + i * g.h - c.y};
      const double r = norm(q);
      if (r <= domain.R1() + inner_gap) continue;
      if (r >= domain.outer_radius(std::atan2(q.y, q.x)) - outer_gap) continue;
      g.interior[static_cast<std::size_t>(i) * g.n + j] = 1;
    }
  }
  return g;
}

inline NodalReport label_sign_field(const NodalGrid& g, const std::vector<double>& field,
                                    const NodalOptions& opts) {
  NodalReport rep;
  rep.grid = g.n;
  rep.zero_tol = opts.zero_tol;
  rep.boundary_band = opts.boundary_band;
  const std::size_t total = field.size();
  double umax = 0.0;
  for (std::size_t k = 0; k < total; ++k)
    if (g.interior[k]) {
      umax = std::max(umax, std::abs(field[k]));
      ++rep.sampled;
    }
  if (rep.sampled == 0) throw std::invalid_argument("count_nodal_domains: no interior grid points");

  std::vector<int> sign(total, 0);
  const double band = opts.zero_tol * umax;
  for (std::size_t k = 0; k < total; ++k) {
    if (!g.interior[k]) continue;
    if (std::abs(field[k]) <= band) {
      ++rep.zero_band;
      continue;
    }
    sign[k] = field[k] > 0.0 ? 1 : -1;
  }

  UnionFind uf(total);
  const auto n = static_cast<std::size_t>(g.n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      if (sign[k] == 0) continue;
      if (j + 1 < n && sign[k + 1] == sign[k]) uf.unite(k, k + 1);
      if (i + 1 < n && sign[k + n] == sign[k]) uf.unite(k, k + n);
    }
  }
  for (std::size_t k = 0; k < total; ++k)
    if (sign[k] != 0 && uf.find(k) == k) rep.component_sizes.push_back(uf.component_size(k));
  std::sort(rep.component_sizes.rbegin(), rep.component_sizes.rend());
  rep.count = static_cast<int>(rep.component_sizes.size());
  return rep;
}

}  // namespace detail

/// Nodal domains of several trial-space functions (columns of `coefficients`)
/// on one grid. Basis values are computed once per grid point.
inline std::vector<NodalReport> count_nodal_domains(const DoublyConnectedDomain& domain, const HarmonicBasis& basis,
                                                    const Eigen::MatrixXd& coefficients,
                                                    const NodalOptions& opts = {}) {
  if (coefficients.rows() != basis.dimension())
    throw std::invalid_argument("count_nodal_domains: coefficient size does not match the basis");
  const detail::NodalGrid g = detail::interior_grid(domain, opts);
  const auto nf = static_cast<std::size_t>(coefficients.cols());
  const auto n = static_cast<std::size_t>(g.n);
  std::vector<std::vector<double>> fields(nf, std::vector<double>(n * n, 0.0));

  parallel_for(n, [&](std::size_t i) {
    const int dim = basis.dimension();
    Eigen::VectorXd v(dim);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = i * n + j;
      if (!g.interior[k]) continue;
      basis.evaluate({g.x0 + static_cast<double>(j) * g.h, g.y0 + static_cast<double>(i) * g.h},
                     std::span<double>(v.data(), static_cast<std::size_t>(dim)));
      const Eigen::VectorXd u = coefficients.transpose() * v;
      for (std::size_t f = 0; f < nf; ++f) fields[f][k] = u(static_cast<Eigen::Index>(f));
    }
  });

  std::vector<NodalReport> out;
  out.reserve(nf);
  for (const auto& field : fields) out.push_back(detail::label_sign_field(g, field, opts));
  return out;
}

inline NodalReport count_nodal_domains(const DoublyConnectedDomain& domain, const Eigenfunction& f,
                                       const NodalOptions& opts = {}) {
  return count_nodal_domains(domain, f.basis(), f.coefficients(), opts).front();
}

/// Coefficient vectors of the given eigenspace members followed by `random`
/// unit combinations (Gaussian weights, fixed seed).
inline Eigen::MatrixXd eigenspace_samples(const EigenSolution& sol, const std::vector<std::size_t>& space,
                                          int random, std::uint64_t seed = 20240601) {
  if (space.empty()) throw std::invalid_argument("eigenspace_samples: empty eigenspace");
  const auto k = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd out(sol.coefficients.rows(), k + random);
  for (Eigen::Index j = 0; j < k; ++j) out.col(j) = sol.coefficients.col(static_cast<Eigen::Index>(space[j]));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int r = 0; r < random; ++r) {
    Eigen::VectorXd w(k);
    for (Eigen::Index j = 0; j < k; ++j) w(j) = gauss(rng);
    w.normalize();
    out.col(k + r) = out.leftCols(k) * w;
  }
  return out;
}

}  // namespace snspec
