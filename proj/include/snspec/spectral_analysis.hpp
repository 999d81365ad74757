#pragma once

// Analyses built on the solver and the closed forms: harmonic extension into
// the hole, star-shaped sandwich bounds, hole shrinking, isoperimetric
// comparison and the dumbbell test function.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snspec/closed_forms.hpp"
#include "snspec/gauss_legendre.hpp"
#include "snspec/geometry.hpp"
#include "snspec/nodal_domains.hpp"
#include "snspec/parallel.hpp"
#include "snspec/trefftz_solver.hpp"

namespace snspec {

// ---------------------------------------------------------------------------
// Harmonic extension into the hole

struct HarmonicExtensionReport {
  double r = 0.0;
  double R = 0.0;
  double extension_energy = 0.0;  // \int_{B_r} |grad h|^2
  double annulus_energy = 0.0;    // \int_{A_{r,R}} |grad u|^2
  double ratio = 0.0;
  double envelope = 0.0;          // 5 (r/R)^2 * margin
};

/// Dirichlet energy of the harmonic extension of a trace sampled at m
/// equispaced angles on a circle: pi * sum_k k (a_k^2 + b_k^2).
inline double disk_extension_energy(const std::vector<double>& trace) {
  const auto m = static_cast<int>(trace.size());
  double e = 0.0;
  for (int k = 1; k < m / 2; ++k) {
    double a = 0.0, b = 0.0;
    for (int j = 0; j < m; ++j) {
      const double t = kTwoPi * j / m;
      a += trace[j] * std::cos(k * t);
      b += trace[j] * std::sin(k * t);
    }
    a *= 2.0 / m;
    b *= 2.0 / m;
    e += k * (a * a + b * b);
  }
  return std::numbers::pi * e;
}

/// Ratio of extension energy to annulus energy for eigenmode `mode` of the
/// concentric annulus A_{r,R} (index 0 is the constant mode).
inline HarmonicExtensionReport harmonic_extension_ratio(double r, double R, std::size_t mode,
                                                        SolverOptions opts = {}, double margin = 1.5) {
  if (!(r > 0.0) || !(r < R)) throw std::invalid_argument("harmonic_extension_ratio: need 0 < r < R");
  if (r / R >= 0.5) throw std::invalid_argument("harmonic_extension_ratio: r/R >= 1/2 is outside the asymptotic regime");
  const int m = 16 * opts.N;
  const auto domain = build_annulus({2, r, R, 0.0}, m, m);
  const EigenSolution sol = solve(domain, opts);
  if (mode >= sol.size()) throw std::out_of_range("harmonic_extension_ratio: mode index out of range");
  const Eigenfunction u = sol.eigenfunction(mode);

  std::vector<double> trace;
  trace.reserve(domain.inner().size());
  for (const Point& p : domain.inner().points) trace.push_back(u.value(p));

  HarmonicExtensionReport rep{r, R};
  rep.extension_energy = disk_extension_energy(trace);
  rep.annulus_energy = sol.energy(u.coefficients());
  rep.ratio = rep.annulus_energy > 0.0 ? rep.extension_energy / rep.annulus_energy : 0.0;
  rep.envelope = 5.0 * (r / R) * (r / R) * margin;
  return rep;
}

// ---------------------------------------------------------------------------
// Metric of revolution dr^2 + h(r)^2 g_sphere and the sandwich constants

class RevolutionProfile {
 public:
  enum class Kind { euclidean, spherical, hyperbolic, custom };

  RevolutionProfile(Kind kind, int n, double L, std::function<double(double)> h = {})
      : kind_(kind), n_(n), L_(L), h_(std::move(h)) {
    switch (kind_) {
      case Kind::euclidean: h_ = [](double r) { return r; }; break;
      case Kind::spherical: h_ = [](double r) { return std::sin(r); }; break;
      case Kind::hyperbolic: h_ = [](double r) { return std::sinh(r); }; break;
      case Kind::custom:
        if (!h_) throw std::invalid_argument("RevolutionProfile: custom profile needs a function");
        break;
    }
    validate();
  }

  static RevolutionProfile euclidean(int n = 2) { return {Kind::euclidean, n, 1e6}; }

  [[nodiscard]] double operator()(double r) const { return h_(r); }
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] double length() const { return L_; }

 private:
  void validate() const {
    if (n_ < 2) throw std::invalid_argument("RevolutionProfile: dimension must be >= 2");
    if (!(L_ > 0.0)) throw std::invalid_argument("RevolutionProfile: domain length must be positive");
    if (std::abs(h_(0.0)) > 1e-12) throw std::invalid_argument("RevolutionProfile: h(0) must vanish");
    const double eps = 1e-6;
    if (std::abs((h_(eps) - h_(0.0)) / eps - 1.0) > 1e-4)
      throw std::invalid_argument("RevolutionProfile: h'(0) must equal 1");
    const int samples = 1024;
    const double span = std::min(L_, 1e3);
    double prev = h_(0.0);
    for (int j = 1; j <= samples; ++j) {
      const double v = h_(span * j / samples);
      if (!(v > prev)) throw std::invalid_argument("RevolutionProfile: h must be strictly increasing");
      prev = v;
    }
  }

  Kind kind_;
  int n_;
  double L_;
  std::function<double(double)> h_;
};

struct SandwichConstants {
  double C1 = 0.0;
  double C2 = 0.0;
};

/// C2 = h^{n-1}(R_M)/h^{n-1}(R_m), C1 = h^{n-1}(R_m)/(sqrt(1+a) h^{n-1}(R_M)).
inline SandwichConstants sandwich_constants(const RevolutionProfile& h, double R_m, double R_M, double a) {
  if (!(R_m > 0.0) || R_M < R_m || a < 0.0) throw std::invalid_argument("sandwich_constants: bad geometry");
  if (R_M > h.length()) throw std::invalid_argument("sandwich_constants: R_M beyond the profile domain");
  const int n = h.dimension();
  const double ratio = std::pow(h(R_M) / h(R_m), n - 1);
  return {1.0 / (ratio * std::sqrt(1.0 + a)), ratio};
}

struct SandwichReport {
  double mu1 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double R_m = 0.0;
  double R_M = 0.0;
  double a = 0.0;
  double mu1_inner_annulus = 0.0;  // mu_1(B_{R_m} \ B_{R1})
  double mu1_outer_annulus = 0.0;  // mu_1(B_{R_M} \ B_{R1})
  double flux_residual = 0.0;

  [[nodiscard]] bool holds(double tol = 0.0) const { return lower <= mu1 + tol && mu1 <= upper + tol; }
};

/// Planar Euclidean sandwich check; the domain's outer curve must be a polar
/// graph about the hole center.
inline SandwichReport sandwich_bounds(const DoublyConnectedDomain& domain, const RevolutionProfile& profile,
                                      const SolverOptions& opts = {}) {
  if (profile.kind() != RevolutionProfile::Kind::euclidean || profile.dimension() != 2)
    throw std::invalid_argument("sandwich_bounds: solver-backed bounds need the planar Euclidean profile");
  if (!(domain.R_m() > domain.R1())) throw std::invalid_argument("sandwich_bounds: need R_m > R1");
  const auto k = sandwich_constants(profile, domain.R_m(), domain.R_M(), domain.a());
  SandwichReport rep;
  rep.R_m = domain.R_m();
  rep.R_M = domain.R_M();
  rep.a = domain.a();
  rep.C1 = k.C1;
  rep.C2 = k.C2;
  const EigenSolution sol = solve(domain, opts);
  rep.mu1 = sol.mu1();
  rep.flux_residual = first_eigenspace_flux_residual(sol);
  if (domain.R_m() == domain.R_M()) {
    rep.mu1_inner_annulus = rep.mu1_outer_annulus = mu1_annulus(2, domain.R1(), domain.R_M());
  } else {
    rep.mu1_inner_annulus = mu1_annulus(2, domain.R1(), domain.R_m());
    rep.mu1_outer_annulus = mu1_annulus(2, domain.R1(), domain.R_M());
  }
  rep.lower = k.C1 * rep.mu1_inner_annulus;
  rep.upper = k.C2 * rep.mu1_outer_annulus;
  return rep;
}

// ---------------------------------------------------------------------------
// Shrinking hole

struct HoleShrinkRow {
  double r = 0.0;
  double mu1 = 0.0;
  double gap = 0.0;             // sigma_1(outer) - mu_1(Omega_r)
  double trace_distance = 0.0;  // L^2(outer boundary) distance to the sigma_1 eigenspace
  bool step1 = false;           // mu_1 <= sigma_1 + 1e-8
  double flux_residual = 0.0;
};

struct HoleShrinkReport {
  double sigma1 = 0.0;
  int sigma1_multiplicity = 0;
  std::vector<HoleShrinkRow> rows;
};

namespace detail {

// Largest L^2 distance from a trace in `u_cols` to span(v_cols); both sets are
// sampled on the same boundary nodes with quadrature weights w, and each u is
// normalized to unit L^2 norm first.
inline double subspace_trace_distance(const Eigen::MatrixXd& U, const Eigen::MatrixXd& V, const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd Vw = sw.asDiagonal() * V;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Vw);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    Eigen::VectorXd uw = sw.cwiseProduct(U.col(j));
    uw.normalize();
    const Eigen::VectorXd coef = qr.solve(uw);
    worst = std::max(worst, (uw - Vw * coef).norm());
  }
  return worst;
}

inline Eigen::MatrixXd traces_on(const BoundaryCurve& curve, const EigenSolution& sol,
                                 const std::vector<std::size_t>& modes) {
  const BoundaryTraces t = boundary_traces(curve, sol.basis);
  Eigen::MatrixXd out(t.values.rows(), static_cast<Eigen::Index>(modes.size()));
  for (std::size_t j = 0; j < modes.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = t.values * sol.coefficients.col(static_cast<Eigen::Index>(modes[j]));
  return out;
}

}  // namespace detail

/// Steklov-Neumann mu_1 on outer \ B_r for each radius, compared with the
/// classical Steklov sigma_1 of the outer domain (solved once).
inline HoleShrinkReport hole_shrink_sweep(const SimplyConnectedDomain& outer, const std::vector<double>& radii,
                                          const SolverOptions& opts = {}) {
  if (radii.empty()) throw std::invalid_argument("hole_shrink_sweep: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("hole_shrink_sweep: radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1]))
      throw std::invalid_argument("hole_shrink_sweep: radii must be strictly decreasing");
    if (!(radii[i] < outer.R_m())) throw std::invalid_argument("hole_shrink_sweep: hole not inside the outer domain");
  }
  SolverOptions steklov = opts;
  steklov.mode = ProblemMode::steklov;
  const EigenSolution ref = solve(outer, steklov);
  const auto ref_space = ref.first_eigenspace();
  const SimplyConnectedDomain sampled = detail::resample_for(outer, opts);
  const Eigen::MatrixXd ref_traces = detail::traces_on(sampled.outer(), ref, ref_space);
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(sampled.outer().weights.data(),
                                                         static_cast<Eigen::Index>(sampled.outer().size()));

  HoleShrinkReport rep;
  rep.sigma1 = ref.mu1();
  rep.sigma1_multiplicity = static_cast<int>(ref_space.size());

  SolverOptions sn = opts;
  sn.mode = ProblemMode::steklov_neumann;
  const int m_in = opts.m_in > 0 ? opts.m_in : 16 * opts.N;
  rep.rows = parallel_map(radii, [&](double r) {
    const DoublyConnectedDomain domain(sampled.shape(), r, sampled.m_out(), m_in, sampled.center());
    const EigenSolution sol = solve(domain, sn);
    HoleShrinkRow row;
    row.r = r;
    row.mu1 = sol.mu1();
    row.gap = rep.sigma1 - row.mu1;
    row.step1 = row.mu1 <= rep.sigma1 + 1e-8;
    row.flux_residual = first_eigenspace_flux_residual(sol);
    const Eigen::MatrixXd u = detail::traces_on(domain.outer(), sol, sol.first_eigenspace());
    row.trace_distance = detail::subspace_trace_distance(u, ref_traces, w);
    return row;
  });
  return rep;
}

// ---------------------------------------------------------------------------
// Isoperimetric comparison for small holes

enum class IsoConstraint { measure, perimeter };

struct IsoperimetricReport {
  IsoConstraint constraint = IsoConstraint::measure;
  double r = 0.0;
  double reference_radius = 0.0;  // equal-area or equal-perimeter disk radius
  double mu1 = 0.0;               // solver, outer \ B_r
  double mu1_reference = 0.0;     // closed form on A_{r, reference_radius}
  double flux_residual = 0.0;

  [[nodiscard]] double difference() const { return mu1_reference - mu1; }
};

struct IsoperimetricOptions {
  double smallness = 0.05;       // r <= smallness * R_m
  double convexity_tol = 1e-12;  // relative to max rho^2
};

inline IsoperimetricReport isoperimetric_check(const SimplyConnectedDomain& outer, double r, IsoConstraint constraint,
                                               const SolverOptions& opts = {}, const IsoperimetricOptions& iso = {}) {
  if (!(r > 0.0)) throw std::invalid_argument("isoperimetric_check: hole radius must be positive");
  if (r > iso.smallness * outer.R_m())
    throw std::invalid_argument("isoperimetric_check: hole radius above the smallness threshold");
  IsoperimetricReport rep;
  rep.constraint = constraint;
  rep.r = r;
  if (constraint == IsoConstraint::perimeter) {
    const double indicator = min_convexity_indicator(outer.shape());
    if (indicator < -iso.convexity_tol * outer.R_M() * outer.R_M())
      throw std::invalid_argument("isoperimetric_check: perimeter comparison needs a convex outer domain");
    rep.reference_radius = curve_perimeter(outer.shape()) / kTwoPi;
  } else {
    rep.reference_radius = std::sqrt(enclosed_area(outer.shape()) / std::numbers::pi);
  }
  const SimplyConnectedDomain sampled = detail::resample_for(outer, opts);
  const int m_in = opts.m_in > 0 ? opts.m_in : 16 * opts.N;
  const DoublyConnectedDomain domain(sampled.shape(), r, sampled.m_out(), m_in, sampled.center());
  const EigenSolution sol = solve(domain, opts);
  rep.mu1 = sol.mu1();
  rep.flux_residual = first_eigenspace_flux_residual(sol);
  rep.mu1_reference = mu1_annulus(2, r, rep.reference_radius);
  return rep;
}

// ---------------------------------------------------------------------------
// Dumbbell test function

/// Two disks joined by the thin rectangle C_eps = (-eps/2, eps/2) x (-eps^3/2, eps^3/2);
/// the right disk carries a concentric hole of radius R1.
struct DumbbellSpec {
  double eps = 0.1;
  double R1 = 0.5;

  void validate() const {
    if (!(eps > 0.0) || eps > 0.2) throw std::invalid_argument("DumbbellSpec: need 0 < eps <= 0.2");
    if (!(R1 > 0.0) || !(R1 < 1.0)) throw std::invalid_argument("DumbbellSpec: need 0 < R1 < 1");
  }
  [[nodiscard]] double ball_radius() const {
    return std::sqrt((1.0 + eps / 2.0) * (1.0 + eps / 2.0) + std::pow(eps, 6) / 4.0);
  }
  [[nodiscard]] Point left_center() const { return {-1.0 - eps, 0.0}; }
  [[nodiscard]] Point right_center() const { return {1.0 + eps, 0.0}; }
};

struct DumbbellReport {
  double eps = 0.0;
  double boundary_integral = 0.0;  // \int_{boundary} v
  double boundary_mean = 0.0;      // integral over the Steklov boundary length
  double denominator = 0.0;        // \int_{boundary} v^2
  double numerator = 0.0;          // \int |grad v|^2
  double corner_mismatch = 0.0;    // max | |corner - x_i| - r_i |

  [[nodiscard]] double quotient() const { return numerator / denominator; }
};

/// Rayleigh quotient of v = sin(2 pi x / eps) on C_eps (zero elsewhere). Only
/// the long sides of C_eps lie on the outer boundary; v vanishes at x = +-eps/2.
inline DumbbellReport dumbbell_bound(const DumbbellSpec& spec, int nodes = 64) {
  spec.validate();
  const double eps = spec.eps;
  const double k = kTwoPi / eps;
  const GaussLegendreRule gx(nodes, -eps / 2.0, eps / 2.0);
  const GaussLegendreRule gy(8, -std::pow(eps, 3) / 2.0, std::pow(eps, 3) / 2.0);

  DumbbellReport rep;
  rep.eps = eps;
  const double side = gx.integrate([&](double x) { return std::sin(k * x); });
  const double side_sq = gx.integrate([&](double x) { return std::sin(k * x) * std::sin(k * x); });
  rep.boundary_integral = 2.0 * side;
  rep.denominator = 2.0 * side_sq;
  rep.numerator = gx.integrate([&](double x) {
    const double dv = k * std::cos(k * x);
    return gy.integrate([&](double) { return dv * dv; });
  });

  const double rb = spec.ball_radius();
  const double neck = std::asin(std::pow(eps, 3) / 2.0 / rb);
  const double steklov_length = 2.0 * rb * (kTwoPi - 2.0 * neck) + 2.0 * eps;
  rep.boundary_mean = rep.boundary_integral / steklov_length;

  const Point corners[] = {{-eps / 2, eps * eps * eps / 2}, {eps / 2, -eps * eps * eps / 2}};
  rep.corner_mismatch = std::max(std::abs(norm(corners[0] - spec.left_center()) - rb),
                                 std::abs(norm(corners[1] - spec.right_center()) - rb));
  return rep;
}

}  // namespace snspec
