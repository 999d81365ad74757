#pragma once

// One-dimensional integral families over theta1 in [0, pi] for the eccentric
// annulus B_{R2}(d) \ B_{R1} in R^n, and the Rayleigh quotient of the
// l = 1 concentric eigenfunction on the eccentric domain.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "snspec/closed_forms.hpp"
#include "snspec/gauss_legendre.hpp"

namespace snspec {

struct LemmaQuadratureConfig {
  int nodes = 256;
  int n = 2;
  double R1 = 1.0;
  double R2 = 2.0;

  void validate() const {
    if (nodes < 64) throw std::invalid_argument("LemmaQuadratureConfig: need at least 64 nodes");
    AnnulusSpec{n, R1, R2, 0.0}.validate();
  }
};

/// Distance from the origin to the outer sphere along the ray at angle theta1
/// from the offset axis, its derivative, and sqrt(R_d^2 + R_d'^2).
struct RdSample {
  double Rd = 0.0;
  double dRd = 0.0;
  double surface_factor = 0.0;
};

inline RdSample eval_Rd(double d, double theta1, double R2) {
  if (!(d >= 0.0) || !(d < R2)) throw std::invalid_argument("eval_Rd: need 0 <= d < R2");
  const double st = std::sin(theta1);
  const double ct = std::cos(theta1);
  const double s = std::sqrt(R2 * R2 - d * d * st * st);
  const double Rd = d * ct + s;
  return {Rd, -d * st * Rd / s, R2 * (1.0 + d * ct / s)};
}

struct LemmaValues {
  int n = 2;
  double d = 0.0;
  double A1 = 0.0, A2 = 0.0, A3 = 0.0;
  double V1 = 0.0, V2 = 0.0, V3 = 0.0;
  /// Integral of n(n-2) sin^n + (n-1) sin^{n-2} against (R_d^{-n} - R1^{-n});
  /// the weight that actually appears in the Dirichlet energy of the test
  /// function. Coincides with A3 for n = 2.
  double A3_energy = 0.0;

  [[nodiscard]] static double phi(int n, double t) {
    const double s = std::sin(t);
    return -n * std::pow(s, n) + (n - 1) * std::pow(s, n - 2);
  }
  [[nodiscard]] static double psi(int n, double t) {
    const double s = std::sin(t);
    return (n - 2) * std::pow(s, n) + (n - 1) * std::pow(s, n - 2);
  }
  [[nodiscard]] static double psi_energy(int n, double t) {
    const double s = std::sin(t);
    return n * (n - 2) * std::pow(s, n) + (n - 1) * std::pow(s, n - 2);
  }
};

inline LemmaValues lemma_values(double d, const LemmaQuadratureConfig& cfg) {
  cfg.validate();
  if (!(d >= 0.0) || !(d < cfg.R2 - cfg.R1))
    throw std::invalid_argument("lemma_values: need 0 <= d < R2 - R1");
  const int n = cfg.n;
  const double R1 = cfg.R1;
  const double R2 = cfg.R2;
  const double R1n = std::pow(R1, n);
  const GaussLegendreRule rule(cfg.nodes, 0.0, std::numbers::pi);

  LemmaValues v;
  v.n = n;
  v.d = d;
  for (int i = 0; i < rule.size(); ++i) {
    const double t = rule.nodes[i];
    const double w = rule.weights[i];
    const RdSample r = eval_Rd(d, t, R2);
    const double st = std::sin(t);
    const double ct = std::cos(t);
    const double sn = std::pow(st, n);
    const double sn2 = std::pow(st, n - 2);
    const double root = std::sqrt(R2 * R2 - d * d * st * st);
    const double Rdn = std::pow(r.Rd, n);
    const double inv_diff = 1.0 / Rdn - 1.0 / R1n;

    v.A1 += w * sn2 * (Rdn - R1n);
    v.A2 += w * LemmaValues::phi(n, t) * std::log(r.Rd / R1);
    v.A3 += w * LemmaValues::psi(n, t) * inv_diff;
    v.A3_energy += w * LemmaValues::psi_energy(n, t) * inv_diff;
    v.V1 += w * sn * Rdn * r.surface_factor;
    v.V2 += w * sn * d * ct / root;
    v.V3 += w * R2 * sn / (std::pow(r.Rd, n - 1) * root);
  }
  return v;
}

/// Numerator and denominator of the Rayleigh quotient of
/// f = (r + R1^n/((n-1) r^{n-1})) x_{n-1}/r on the eccentric annulus.
struct RayleighBound {
  double energy = 0.0;
  double boundary_mass = 0.0;
  [[nodiscard]] double value() const { return energy / boundary_mass; }
};

/// Energy: |S^{n-2}|/(n-1) [ (n-1)/n A1 + 2 R1^n/(n-1) A2 - R1^{2n}/(n (n-1)^2) A3_energy ].
/// Boundary mass: direct theta1 quadrature of f^2 dS over the offset sphere,
/// the remaining angles integrated in closed form (|S^{n-2}|/(n-1)).
inline RayleighBound rayleigh_bound(double d, const LemmaQuadratureConfig& cfg) {
  const LemmaValues v = lemma_values(d, cfg);
  const int n = cfg.n;
  const double R1 = cfg.R1;
  const double R1n = std::pow(R1, n);
  const double angular = unit_sphere_measure(n - 2) / (n - 1);

  RayleighBound out;
  out.energy = angular * ((n - 1.0) / n * v.A1 + 2.0 * R1n / (n - 1) * v.A2 -
                          R1n * R1n / (n * (n - 1.0) * (n - 1.0)) * v.A3_energy);

  const GaussLegendreRule rule(cfg.nodes, 0.0, std::numbers::pi);
  double mass = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const double t = rule.nodes[i];
    const RdSample r = eval_Rd(d, t, cfg.R2);
    const double g = r.Rd + R1n / ((n - 1) * std::pow(r.Rd, n - 1));
    mass += rule.weights[i] * g * g * std::pow(std::sin(t), n) * std::pow(r.Rd, n - 2) * r.surface_factor;
  }
  out.boundary_mass = angular * mass;
  if (!(out.boundary_mass > 0.0)) throw std::domain_error("rayleigh_bound: degenerate denominator");
  return out;
}

inline double rayleigh_bound_theta(double d, const LemmaQuadratureConfig& cfg) {
  return rayleigh_bound(d, cfg).value();
}

/// Energy exactly as the product display writes it, with the lemma's psi
/// weight: (2/(n-1)^2) prod_{k=0}^{n-3} I_k [ (n-1)^2/n A1 + 2 R1^n A2 - R1^{2n}/n A3 ].
/// Equal to the true energy for n = 2 only; kept for comparison.
inline double energy_product_display(const LemmaValues& v, double R1) {
  const int n = v.n;
  double prod = 1.0;
  for (int k = 0; k <= n - 3; ++k) prod *= wallis_Ik(k);
  const double R1n = std::pow(R1, n);
  return 2.0 / ((n - 1.0) * (n - 1.0)) * prod *
         ((n - 1.0) * (n - 1.0) / n * v.A1 + 2.0 * R1n * v.A2 - R1n * R1n / n * v.A3);
}

}  // namespace snspec
