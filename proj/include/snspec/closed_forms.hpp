#pragma once

// Exact Steklov-Neumann quantities for the concentric annulus B_{R2} \ B_{R1}
// in R^n, and a few reference values used as oracles elsewhere.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>

#include "snspec/geometry.hpp"

namespace snspec {

inline constexpr int kMaxHarmonicIndex = 64;

struct AnnulusEigenvalue {
  int l = 0;
  double value = 0.0;
  std::int64_t multiplicity = 1;
};

namespace detail {

inline void require_concentric(const AnnulusSpec& spec) {
  spec.validate();
  if (!spec.concentric()) throw std::invalid_argument("closed form requires a concentric annulus (d = 0)");
}

inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace detail

/// Dimension of the space of degree-l spherical harmonics on S^{n-1}.
inline std::int64_t spherical_harmonic_dimension(int n, int l) {
  if (n < 2 || l < 0) throw std::invalid_argument("spherical_harmonic_dimension: bad arguments");
  if (n == 2) return l == 0 ? 1 : 2;
  return detail::binomial(l + n - 1, n - 1) - detail::binomial(l + n - 3, n - 1);
}

/// mu_l = l(l+n-2)(rho^{2l+n-2} - 1) / (R2 ((l+n-2) rho^{2l+n-2} + l)), rho = R2/R1,
/// evaluated in the bounded form with q = (R1/R2)^{2l+n-2}.
inline AnnulusEigenvalue mu_l_concentric(const AnnulusSpec& spec, int l) {
  detail::require_concentric(spec);
  if (l < 0 || l > kMaxHarmonicIndex)
    throw std::invalid_argument("mu_l_concentric: harmonic index out of range [0, 64]");
  AnnulusEigenvalue ev{l, 0.0, spherical_harmonic_dimension(spec.n, l)};
  if (l == 0) return ev;
  const int n = spec.n;
  const double q = std::pow(spec.R1 / spec.R2, 2 * l + n - 2);
  const double lam = static_cast<double>(l) * (l + n - 2);
  ev.value = lam * (1.0 - q) / (spec.R2 * ((l + n - 2) + l * q));
  return ev;
}

/// First non-zero eigenvalue of the annulus A_{r,R} in R^n.
inline double mu1_annulus(int n, double r, double R) {
  return mu_l_concentric(AnnulusSpec{n, r, R, 0.0}, 1).value;
}

/// Radial factor r^l + l R1^{2l+n-2} / ((l+n-2) r^{l+n-2}) of the eigenfunctions.
inline double radial_part(const AnnulusSpec& spec, int l, double r) {
  detail::require_concentric(spec);
  if (l < 1) throw std::invalid_argument("radial_part: l must be >= 1");
  if (r < spec.R1 || r > spec.R2) throw std::invalid_argument("radial_part: r outside [R1, R2]");
  const int n = spec.n;
  return std::pow(r, l) + l * std::pow(spec.R1, 2 * l + n - 2) / ((l + n - 2) * std::pow(r, l + n - 2));
}

/// d/dr of radial_part; vanishes at r = R1.
inline double radial_part_derivative(const AnnulusSpec& spec, int l, double r) {
  detail::require_concentric(spec);
  if (l < 1) throw std::invalid_argument("radial_part_derivative: l must be >= 1");
  if (r < spec.R1 || r > spec.R2) throw std::invalid_argument("radial_part_derivative: r outside [R1, R2]");
  const int n = spec.n;
  return l * std::pow(r, l - 1) - l * std::pow(spec.R1, 2 * l + n - 2) / std::pow(r, l + n - 1);
}

/// u_n^i(x) = (r + R1^n / ((n-1) r^{n-1})) x_i / r; axis is 1-based.
inline double eigenfunction_cartesian(const AnnulusSpec& spec, int axis, std::span<const double> x) {
  detail::require_concentric(spec);
  if (static_cast<int>(x.size()) != spec.n) throw std::invalid_argument("eigenfunction_cartesian: dimension mismatch");
  if (axis < 1 || axis > spec.n) throw std::invalid_argument("eigenfunction_cartesian: axis out of range");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double r = std::sqrt(r2);
  constexpr double kSlack = 1e-12;
  if (r < spec.R1 * (1.0 - kSlack) || r > spec.R2 * (1.0 + kSlack))
    throw std::invalid_argument("eigenfunction_cartesian: point outside the annulus");
  const int n = spec.n;
  const double g = r + std::pow(spec.R1, n) / ((n - 1) * std::pow(r, n - 1));
  return g * x[axis - 1] / r;
}

inline double eigenfunction_cartesian(const AnnulusSpec& spec, int axis, Point p) {
  const double x[2] = {p.x, p.y};
  return eigenfunction_cartesian(spec, axis, std::span<const double>(x, 2));
}

/// First non-trivial Steklov eigenvalue of a ball of radius R.
inline double sigma_1_ball(double R) {
  if (!(R > 0.0)) throw std::invalid_argument("sigma_1_ball: radius must be positive");
  return 1.0 / R;
}

/// I_k = \int_0^pi sin^k t dt via I_k = (k-1)/k I_{k-2}.
inline double wallis_Ik(int k) {
  if (k < 0) throw std::invalid_argument("wallis_Ik: k must be >= 0");
  double even = std::numbers::pi;
  double odd = 2.0;
  double v = (k % 2 == 0) ? even : odd;
  for (int j = (k % 2 == 0) ? 2 : 3; j <= k; j += 2) v *= static_cast<double>(j - 1) / j;
  return v;
}

/// Surface measure of the unit sphere S^k in R^{k+1}.
inline double unit_sphere_measure(int k) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

}  // namespace snspec
