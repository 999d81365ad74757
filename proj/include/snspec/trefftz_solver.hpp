#pragma once

// Galerkin discretization of the Steklov-Neumann (or classical Steklov) problem
// on a harmonic trial space. All integrals reduce to boundary quadrature:
//   K_ij = sum over boundary pieces of \oint phi_i d(phi_j)/dn ds,
//   M_ij = \oint_{Steklov part} phi_i phi_j ds,
// and the eigenpairs solve K c = mu M c.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snspec/geometry.hpp"
#include "snspec/harmonic_basis.hpp"

namespace snspec {

enum class ProblemMode { steklov_neumann, steklov };

/// Raised when a numerical diagnostic indicates the discretization cannot be
/// trusted (under-resolved quadrature, missing constant mode, indefiniteness).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class D>
concept SolverDomain = requires(const D& d) {
  { d.center() } -> std::convertible_to<Point>;
  { d.outer() } -> std::convertible_to<const BoundaryCurve&>;
  { d.R_M() } -> std::convertible_to<double>;
  { d.boundary_pieces(true) } -> std::convertible_to<std::vector<BoundaryPiece>>;
  { d.contains(Point{}, 0.0) } -> std::convertible_to<bool>;
};

struct SolverOptions {
  int N = 24;
  int m_out = 0;  // 0: keep the domain's discretization
  int m_in = 0;
  double tau_M = 1e-12;
  double tau_0 = 1e-8;
  ProblemMode mode = ProblemMode::steklov_neumann;
  double asymmetry_threshold = 1e-6;
  double flux_threshold = 1e-6;
  bool self_convergence = false;
};

/// Basis values and normal derivatives at the nodes of one boundary curve.
struct BoundaryTraces {
  Eigen::MatrixXd values;   // m x dim
  Eigen::MatrixXd normal;   // m x dim
  Eigen::VectorXd weights;  // m
};

inline BoundaryTraces boundary_traces(const BoundaryCurve& curve, const HarmonicBasis& basis) {
  const int m = static_cast<int>(curve.size());
  const int dim = basis.dimension();
  BoundaryTraces t{Eigen::MatrixXd(m, dim), Eigen::MatrixXd(m, dim), Eigen::VectorXd(m)};
  std::vector<double> v(dim);
  std::vector<Point> g(dim);
  for (int j = 0; j < m; ++j) {
    basis.evaluate(curve.points[j], v, g);
    const Point n = curve.normals[j];
    for (int i = 0; i < dim; ++i) {
      t.values(j, i) = v[i];
      t.normal(j, i) = dot(g[i], n);
    }
    t.weights(j) = curve.weights[j];
  }
  return t;
}

struct StiffnessMatrix {
  Eigen::MatrixXd K;          // symmetrized
  double asymmetry = 0.0;     // ||K_raw - K_raw^T||_F / ||K_raw||_F
};

template <SolverDomain D>
StiffnessMatrix assemble_stiffness(const D& domain, const HarmonicBasis& basis) {
  const int dim = basis.dimension();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& piece : domain.boundary_pieces(false)) {
    const BoundaryTraces t = boundary_traces(*piece.curve, basis);
    K.noalias() += t.values.transpose() * t.weights.asDiagonal() * t.normal;
  }
  StiffnessMatrix out;
  const double scale = K.norm();
  out.asymmetry = scale > 0.0 ? (K - K.transpose()).norm() / scale : 0.0;
  out.K = 0.5 * (K + K.transpose());
  return out;
}

enum class BoundaryPart { steklov_part, full_boundary };

template <SolverDomain D>
Eigen::MatrixXd assemble_boundary_mass(const D& domain, const HarmonicBasis& basis, BoundaryPart part) {
  const int dim = basis.dimension();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& piece : domain.boundary_pieces(part == BoundaryPart::full_boundary)) {
    if (!piece.steklov) continue;
    const BoundaryTraces t = boundary_traces(*piece.curve, basis);
    M.noalias() += t.values.transpose() * t.weights.asDiagonal() * t.values;
  }
  return 0.5 * (M + M.transpose());
}

struct PencilOptions {
  double tau_M = 1e-12;
  double tau_0 = 1e-8;
  /// Stiffness eigen-directions below energy_floor * ||K|| are treated as
  /// numerically null (constant mode or redundant trial functions).
  double energy_floor = 1e-13;
};

struct PencilSolution {
  std::vector<double> eigenvalues;  // ascending; zero modes first
  Eigen::MatrixXd vectors;          // columns, normalized c^T M c = 1
  int zero_modes = 0;
  int mass_rank = 0;                // eigenvalues of M above tau_M ||M||
  int retained = 0;                 // finite eigenpairs reported
  double stiffness_norm = 0.0;
  double mass_norm = 0.0;
};

/// Solves K c = mu M c for symmetric positive semidefinite K, M.
///
/// The reduction works on the stiffness side: K = U diag(l) U^T; in the
/// energy-orthonormal coordinates y = diag(l)^{1/2} U^T c of the non-null part,
/// the constant (zero-energy) directions are eliminated by the Schur complement
/// of M, and the remaining symmetric problem S y = (1/mu) y is solved densely.
/// Directions with negligible mass correspond to infinite eigenvalues and are
/// dropped.
inline PencilSolution solve_pencil(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M,
                                   const PencilOptions& opts = {}) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
    throw std::invalid_argument("solve_pencil: K and M must be square and of equal size");
  const Eigen::Index dim = K.rows();

  Eigen::SelfAdjointEigenSolver<MatrixXd> mass_eig(M, Eigen::EigenvaluesOnly);
  const double mnorm = mass_eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(mnorm > 0.0)) throw SolverError("solve_pencil: boundary mass matrix is numerically zero");

  Eigen::SelfAdjointEigenSolver<MatrixXd> stiff_eig(K);
  const VectorXd& lam = stiff_eig.eigenvalues();
  const MatrixXd& U = stiff_eig.eigenvectors();
  const double knorm = lam.cwiseAbs().maxCoeff();
  if (!(knorm > 0.0)) throw SolverError("solve_pencil: stiffness matrix is numerically zero");
  if (lam.minCoeff() < -opts.tau_0 * knorm)
    throw SolverError("solve_pencil: stiffness matrix is indefinite (quadrature under-resolved)");

  PencilSolution out;
  out.stiffness_norm = knorm;
  out.mass_norm = mnorm;
  out.mass_rank = static_cast<int>((mass_eig.eigenvalues().array() > opts.tau_M * mnorm).count());
  const double zero_tol = opts.tau_0 * knorm / mnorm;

  std::vector<Eigen::Index> kept, null;
  for (Eigen::Index i = 0; i < dim; ++i) (lam(i) > opts.energy_floor * knorm ? kept : null).push_back(i);

  // Zero-energy directions that carry boundary mass: the constant mode(s).
  MatrixXd Z(dim, 0);
  if (!null.empty()) {
    MatrixXd Un(dim, static_cast<Eigen::Index>(null.size()));
    for (std::size_t j = 0; j < null.size(); ++j) Un.col(static_cast<Eigen::Index>(j)) = U.col(null[j]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> zeig(Un.transpose() * M * Un);
    std::vector<Eigen::Index> massive;
    for (Eigen::Index j = 0; j < zeig.eigenvalues().size(); ++j)
      if (zeig.eigenvalues()(j) > opts.tau_M * mnorm) massive.push_back(j);
    Z.resize(dim, static_cast<Eigen::Index>(massive.size()));
    for (std::size_t j = 0; j < massive.size(); ++j)
      Z.col(static_cast<Eigen::Index>(j)) = Un * zeig.eigenvectors().col(massive[j]);
  }
  if (Z.cols() == 0) throw SolverError("solve_pencil: no zero mode found (constant member missing)");

  MatrixXd Q(dim, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j)
    Q.col(static_cast<Eigen::Index>(j)) = U.col(kept[j]) / std::sqrt(lam(kept[j]));

  const MatrixXd MQ = M * Q;
  const MatrixXd A = Q.transpose() * MQ;
  const MatrixXd B = MQ.transpose() * Z;
  const MatrixXd C = Z.transpose() * M * Z;
  const Eigen::LDLT<MatrixXd> Cf(C);
  const MatrixXd CinvBt = Cf.solve(B.transpose());
  MatrixXd S = A - B * CinvBt;
  S = 0.5 * (S + S.transpose());

  Eigen::SelfAdjointEigenSolver<MatrixXd> seig(S);
  const VectorXd& sigma = seig.eigenvalues();
  const double smax = sigma.size() > 0 ? sigma.maxCoeff() : 0.0;

  struct Pair {
    double mu;
    VectorXd c;
  };
  std::vector<Pair> pairs;
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    VectorXd c = Z.col(j);
    c /= std::sqrt(c.dot(M * c));
    const double rq = c.dot(K * c);
    if (rq > zero_tol) throw SolverError("solve_pencil: zero-energy direction has non-negligible energy");
    pairs.push_back({rq, std::move(c)});
  }
  int extra_zero = 0;
  for (Eigen::Index j = sigma.size() - 1; j >= 0; --j) {
    if (!(sigma(j) > opts.tau_M * smax)) break;
    const VectorXd y = seig.eigenvectors().col(j);
    VectorXd c = Q * y - Z * (CinvBt * y);
    c /= std::sqrt(sigma(j));
    const double mu = 1.0 / sigma(j);
    if (mu <= zero_tol) ++extra_zero;
    pairs.push_back({mu, std::move(c)});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.mu < b.mu; });

  out.zero_modes = static_cast<int>(Z.cols()) + extra_zero;
  out.retained = static_cast<int>(pairs.size());
  out.vectors.resize(dim, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    out.eigenvalues.push_back(pairs[j].mu);
    out.vectors.col(static_cast<Eigen::Index>(j)) = pairs[j].c;
  }
  return out;
}

/// A function in the trial space: sum_i c_i phi_i.
class Eigenfunction {
 public:
  Eigenfunction(HarmonicBasis basis, Eigen::VectorXd coefficients)
      : basis_(std::move(basis)), c_(std::move(coefficients)) {}

  [[nodiscard]] double value(Point p) const {
    std::vector<double> v(c_.size());
    basis_.evaluate(p, v);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), c_.size()).dot(c_);
  }

  [[nodiscard]] Point gradient(Point p) const {
    const auto dim = static_cast<std::size_t>(c_.size());
    std::vector<double> v(dim);
    std::vector<Point> g(dim);
    basis_.evaluate(p, v, g);
    Point out;
    for (std::size_t i = 0; i < dim; ++i) out = out + c_(static_cast<Eigen::Index>(i)) * g[i];
    return out;
  }

  [[nodiscard]] const HarmonicBasis& basis() const { return basis_; }
  [[nodiscard]] const Eigen::VectorXd& coefficients() const { return c_; }

 private:
  HarmonicBasis basis_;
  Eigen::VectorXd c_;
};

struct SolverDiagnostics {
  int basis_dimension = 0;
  int mass_rank = 0;
  int retained = 0;
  int zero_modes = 0;
  double stiffness_asymmetry = 0.0;
  /// Per reported mode: max |du/dn| on the Neumann boundary over max |u| on
  /// the Steklov boundary. Empty when there is no Neumann boundary.
  std::vector<double> neumann_flux_residual;
  /// |mu_1(N) - mu_1(N + 8)| when requested, NaN otherwise.
  double self_convergence_delta = std::numeric_limits<double>::quiet_NaN();
};

struct EigenSolution {
  HarmonicBasis basis;
  ProblemMode mode = ProblemMode::steklov_neumann;
  std::vector<double> eigenvalues;
  Eigen::MatrixXd coefficients;  // columns, c^T M c = 1
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
  SolverDiagnostics diagnostics;

  [[nodiscard]] std::size_t size() const { return eigenvalues.size(); }
  [[nodiscard]] std::size_t first_nonzero() const { return static_cast<std::size_t>(diagnostics.zero_modes); }
  /// First non-trivial eigenvalue (mu_1 or sigma_1).
  [[nodiscard]] double mu1() const { return eigenvalues.at(first_nonzero()); }

  [[nodiscard]] Eigenfunction eigenfunction(std::size_t k) const {
    return {basis, coefficients.col(static_cast<Eigen::Index>(k))};
  }

  /// Consecutive eigenvalues within rel_tol (relative) form one cluster; the
  /// zero modes form their own cluster.
  [[nodiscard]] std::vector<std::vector<std::size_t>> clusters(double rel_tol = 1e-8) const {
    std::vector<std::vector<std::size_t>> out;
    const std::size_t z = first_nonzero();
    if (z > 0) {
      out.emplace_back();
      for (std::size_t i = 0; i < z; ++i) out.back().push_back(i);
    }
    for (std::size_t i = z; i < eigenvalues.size(); ++i) {
      if (i == z || std::abs(eigenvalues[i] - eigenvalues[i - 1]) > rel_tol * std::abs(eigenvalues[i]))
        out.emplace_back();
      out.back().push_back(i);
    }
    return out;
  }

  [[nodiscard]] std::vector<std::size_t> cluster_of(std::size_t k, double rel_tol = 1e-8) const {
    for (auto& c : clusters(rel_tol))
      if (std::find(c.begin(), c.end(), k) != c.end()) return c;
    throw std::out_of_range("EigenSolution::cluster_of");
  }

  /// Indices of the first non-trivial eigenspace.
  [[nodiscard]] std::vector<std::size_t> first_eigenspace(double rel_tol = 1e-8) const {
    return cluster_of(first_nonzero(), rel_tol);
  }

  [[nodiscard]] double energy(const Eigen::VectorXd& c) const { return c.dot(stiffness * c); }
  [[nodiscard]] double boundary_mass(const Eigen::VectorXd& c) const { return c.dot(mass * c); }
};

namespace detail {

template <SolverDomain D>
D resample_for(const D& domain, const SolverOptions& opts) {
  if constexpr (std::same_as<D, DoublyConnectedDomain>) {
    const int mo = opts.m_out > 0 ? opts.m_out : domain.m_out();
    const int mi = opts.m_in > 0 ? opts.m_in : domain.m_in();
    if (mo != domain.m_out() || mi != domain.m_in()) return domain.resampled(mo, mi);
  } else {
    if (opts.m_out > 0 && opts.m_out != domain.m_out()) return domain.resampled(opts.m_out);
  }
  return domain;
}

template <SolverDomain D>
EigenSolution solve_once(const D& domain, const SolverOptions& opts) {
  const HarmonicBasis basis = make_basis(domain, opts.N);
  StiffnessMatrix stiff = assemble_stiffness(domain, basis);
  if (stiff.asymmetry > opts.asymmetry_threshold)
    throw SolverError("stiffness asymmetry " + std::to_string(stiff.asymmetry) +
                      " exceeds threshold: boundary quadrature under-resolved");
  const BoundaryPart part =
      opts.mode == ProblemMode::steklov ? BoundaryPart::full_boundary : BoundaryPart::steklov_part;
  Eigen::MatrixXd M = assemble_boundary_mass(domain, basis, part);
  PencilSolution pencil = solve_pencil(stiff.K, M, {opts.tau_M, opts.tau_0});

  EigenSolution sol{basis, opts.mode, std::move(pencil.eigenvalues), std::move(pencil.vectors),
                    std::move(stiff.K), std::move(M), {}};
  sol.diagnostics.basis_dimension = basis.dimension();
  sol.diagnostics.mass_rank = pencil.mass_rank;
  sol.diagnostics.retained = pencil.retained;
  sol.diagnostics.zero_modes = pencil.zero_modes;
  sol.diagnostics.stiffness_asymmetry = stiff.asymmetry;

  const auto pieces = domain.boundary_pieces(opts.mode == ProblemMode::steklov);
  Eigen::VectorXd flux_max = Eigen::VectorXd::Zero(sol.coefficients.cols());
  Eigen::VectorXd trace_max = Eigen::VectorXd::Zero(sol.coefficients.cols());
  bool has_neumann = false;
  for (const auto& piece : pieces) {
    const BoundaryTraces t = boundary_traces(*piece.curve, basis);
    if (piece.steklov) {
      trace_max = trace_max.cwiseMax((t.values * sol.coefficients).cwiseAbs().colwise().maxCoeff().transpose());
    } else {
      has_neumann = true;
      flux_max = flux_max.cwiseMax((t.normal * sol.coefficients).cwiseAbs().colwise().maxCoeff().transpose());
    }
  }
  if (has_neumann) {
    for (Eigen::Index j = 0; j < flux_max.size(); ++j)
      sol.diagnostics.neumann_flux_residual.push_back(flux_max(j) / trace_max(j));
  }
  return sol;
}

}  // namespace detail

/// Eigenpairs of the Steklov-Neumann problem (outer curve Steklov, hole
/// Neumann) or of the classical Steklov problem on the whole boundary.
template <SolverDomain D>
EigenSolution solve(const D& domain, const SolverOptions& opts = {}) {
  const D resolved = detail::resample_for(domain, opts);
  EigenSolution sol = detail::solve_once(resolved, opts);
  if (opts.self_convergence) {
    SolverOptions finer = opts;
    finer.N = opts.N + 8;
    finer.self_convergence = false;
    const EigenSolution ref = detail::solve_once(resolved, finer);
    sol.diagnostics.self_convergence_delta = std::abs(sol.mu1() - ref.mu1());
  }
  return sol;
}

/// Max Neumann flux residual over the first non-trivial eigenspace.
inline double first_eigenspace_flux_residual(const EigenSolution& sol, double rel_tol = 1e-8) {
  double r = 0.0;
  if (sol.diagnostics.neumann_flux_residual.empty()) return r;
  for (std::size_t k : sol.first_eigenspace(rel_tol)) r = std::max(r, sol.diagnostics.neumann_flux_residual[k]);
  return r;
}

template <SolverDomain D>
std::vector<double> evaluate_eigenfunction(const EigenSolution& sol, const D& domain, std::size_t mode,
                                           std::span<const Point> points) {
  if (mode >= sol.size()) throw std::out_of_range("evaluate_eigenfunction: mode index out of range");
  const Eigenfunction f = sol.eigenfunction(mode);
  std::vector<double> out;
  out.reserve(points.size());
  for (Point p : points) {
    if (!domain.contains(p, 1e-10)) throw std::invalid_argument("evaluate_eigenfunction: point outside domain");
    out.push_back(f.value(p));
  }
  return out;
}

template <SolverDomain D>
std::vector<Point> evaluate_eigenfunction_gradient(const EigenSolution& sol, const D& domain, std::size_t mode,
                                                   std::span<const Point> points) {
  if (mode >= sol.size()) throw std::out_of_range("evaluate_eigenfunction_gradient: mode index out of range");
  const Eigenfunction f = sol.eigenfunction(mode);
  std::vector<Point> out;
  out.reserve(points.size());
  for (Point p : points) {
    if (!domain.contains(p, 1e-10)) throw std::invalid_argument("evaluate_eigenfunction_gradient: point outside domain");
    out.push_back(f.gradient(p));
  }
  return out;
}

inline const char* to_string(ProblemMode m) {
  return m == ProblemMode::steklov ? "steklov" : "steklov_neumann";
}

}  // namespace snspec
