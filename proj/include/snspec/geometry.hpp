#pragma once

// Planar domains for the Steklov-Neumann solver: concentric/eccentric annuli and
// star-shaped outer boundaries with a circular hole, discretized by the periodic
// trapezoid rule.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/tools/minima.hpp>

namespace snspec {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Ball B_{R2}(d) minus the closed ball B_{R1} in R^n; the outer center is
/// shifted by d along the last coordinate axis.
struct AnnulusSpec {
  int n = 2;
  double R1 = 1.0;
  double R2 = 2.0;
  double d = 0.0;

  void validate() const {
    if (n < 2) throw std::invalid_argument("AnnulusSpec: dimension must be >= 2");
    if (!(R1 > 0.0)) throw std::invalid_argument("AnnulusSpec: R1 must be positive");
    if (!(R2 > R1)) throw std::invalid_argument("AnnulusSpec: R2 must exceed R1");
    if (!(d >= 0.0) || !(d < R2 - R1))
      throw std::invalid_argument("AnnulusSpec: offset must satisfy 0 <= d < R2 - R1");
  }

  [[nodiscard]] bool concentric() const { return d == 0.0; }
};

/// Radius of a polar graph and its first two angular derivatives.
struct PolarSample {
  double rho = 0.0;
  double drho = 0.0;
  double d2rho = 0.0;
};

/// rho(theta) = c0 + sum_k (a_k cos k theta + b_k sin k theta).
class StarPolarCurve {
 public:
  static constexpr int kPositivityGrid = 4096;

  StarPolarCurve(double c0, std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
      : c0_(c0), a_(std::move(cos_coeffs)), b_(std::move(sin_coeffs)) {
    a_.resize(std::max(a_.size(), b_.size()), 0.0);
    b_.resize(a_.size(), 0.0);
    for (int j = 0; j < kPositivityGrid; ++j) {
      const double t = kTwoPi * j / kPositivityGrid;
      if (!((*this)(t).rho > 0.0))
        throw std::invalid_argument("StarPolarCurve: rho must be positive for all angles");
    }
  }

  static StarPolarCurve from_coefficients(std::initializer_list<double> c) {
    return from_coefficients(std::span<const double>(c.begin(), c.size()));
  }

  /// Flat coefficient list (c0, a1, b1, a2, b2, ...).
  static StarPolarCurve from_coefficients(std::span<const double> c) {
    if (c.empty()) throw std::invalid_argument("StarPolarCurve: empty coefficient list");
    std::vector<double> a, b;
    for (std::size_t i = 1; i < c.size(); i += 2) {
      a.push_back(c[i]);
      b.push_back(i + 1 < c.size() ? c[i + 1] : 0.0);
    }
    return {c[0], std::move(a), std::move(b)};
  }

  PolarSample operator()(double theta) const {
    PolarSample s{c0_, 0.0, 0.0};
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const double k = static_cast<double>(i + 1);
      const double c = std::cos(k * theta);
      const double sn = std::sin(k * theta);
      s.rho += a_[i] * c + b_[i] * sn;
      s.drho += k * (-a_[i] * sn + b_[i] * c);
      s.d2rho += -k * k * (a_[i] * c + b_[i] * sn);
    }
    return s;
  }

  [[nodiscard]] StarPolarCurve scaled(double s) const {
    auto a = a_;
    auto b = b_;
    for (auto& v : a) v *= s;
    for (auto& v : b) v *= s;
    return {s * c0_, std::move(a), std::move(b)};
  }

  [[nodiscard]] double c0() const { return c0_; }
  [[nodiscard]] const std::vector<double>& cos_coeffs() const { return a_; }
  [[nodiscard]] const std::vector<double>& sin_coeffs() const { return b_; }
  [[nodiscard]] bool is_constant() const {
    return std::all_of(a_.begin(), a_.end(), [](double v) { return v == 0.0; }) &&
           std::all_of(b_.begin(), b_.end(), [](double v) { return v == 0.0; });
  }

 private:
  double c0_;
  std::vector<double> a_;
  std::vector<double> b_;
};

/// Circle of radius R2 centered at (0, d) relative to the pole, written as the
/// polar graph rho(phi) = d sin(phi) + sqrt(R2^2 - d^2 cos^2(phi)).
/// Measured from the offset axis (theta1 = pi/2 - phi) this is R_d(theta1).
struct EccentricCircle {
  double R2 = 2.0;
  double d = 0.0;

  EccentricCircle(double radius, double offset) : R2(radius), d(offset) {
    if (!(R2 > 0.0)) throw std::invalid_argument("EccentricCircle: radius must be positive");
    if (!(d >= 0.0) || !(d < R2))
      throw std::invalid_argument("EccentricCircle: pole must lie inside the circle");
  }

  PolarSample operator()(double phi) const {
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    const double s = std::sqrt(R2 * R2 - d * d * c * c);
    const double ds = d * d * c * sn / s;
    const double d2s = (d * d * (c * c - sn * sn) - ds * ds) / s;
    return {d * sn + s, d * c + ds, -d * sn + d2s};
  }

  [[nodiscard]] EccentricCircle scaled(double s) const { return {s * R2, s * d}; }
};

using OuterShape = std::variant<StarPolarCurve, EccentricCircle>;

inline PolarSample polar_sample(const OuterShape& shape, double theta) {
  return std::visit([theta](const auto& s) { return s(theta); }, shape);
}

inline OuterShape scaled(const OuterShape& shape, double s) {
  return std::visit([s](const auto& c) -> OuterShape { return c.scaled(s); }, shape);
}

/// Orientation of the stored normals relative to the curve's own center:
/// `outward` points away from it (outer boundary), `inward` points toward it
/// (hole boundary, whose domain-outward normal faces the hole center).
enum class Orientation { outward, inward };

struct BoundaryCurve {
  std::vector<Point> points;
  std::vector<Point> normals;
  std::vector<double> weights;
  Orientation orientation = Orientation::outward;

  [[nodiscard]] std::size_t size() const { return points.size(); }

  [[nodiscard]] double perimeter() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  [[nodiscard]] BoundaryCurve translated(Point shift) const {
    BoundaryCurve c = *this;
    for (auto& p : c.points) p = p + shift;
    return c;
  }

  [[nodiscard]] BoundaryCurve scaled(double s) const {
    BoundaryCurve c = *this;
    for (auto& p : c.points) p = s * p;
    for (auto& w : c.weights) w *= s;
    return c;
  }
};

inline BoundaryCurve discretize_circle(Point center, double radius, int m,
                                       Orientation orientation = Orientation::outward) {
  if (!(radius > 0.0)) throw std::invalid_argument("discretize_circle: radius must be positive");
  if (m < 16 || m % 2 != 0)
    throw std::invalid_argument("discretize_circle: sample count must be even and >= 16");
  BoundaryCurve c;
  c.orientation = orientation;
  c.points.reserve(m);
  c.normals.reserve(m);
  c.weights.assign(m, kTwoPi * radius / m);
  const double sign = orientation == Orientation::outward ? 1.0 : -1.0;
  for (int j = 0; j < m; ++j) {
    const double t = kTwoPi * j / m;
    const double ct = std::cos(t);
    const double st = std::sin(t);
    c.points.push_back({center.x + radius * ct, center.y + radius * st});
    c.normals.push_back({sign * ct, sign * st});
  }
  return c;
}

/// Samples the polar graph at m equispaced angles about `pole`; normals are the
/// outward unit normals (tangent rotated clockwise), weights |gamma'| 2pi/m.
inline BoundaryCurve discretize_star(const OuterShape& shape, int m, Point pole = {}) {
  if (m < 16 || m % 2 != 0)
    throw std::invalid_argument("discretize_star: sample count must be even and >= 16");
  BoundaryCurve c;
  c.orientation = Orientation::outward;
  c.points.reserve(m);
  c.normals.reserve(m);
  c.weights.reserve(m);
  for (int j = 0; j < m; ++j) {
    const double t = kTwoPi * j / m;
    const PolarSample s = polar_sample(shape, t);
    if (!(s.rho > 0.0)) throw std::invalid_argument("discretize_star: non-positive radius");
    const double ct = std::cos(t);
    const double st = std::sin(t);
    const Point tangent{s.drho * ct - s.rho * st, s.drho * st + s.rho * ct};
    const double speed = norm(tangent);
    c.points.push_back({pole.x + s.rho * ct, pole.y + s.rho * st});
    c.normals.push_back({tangent.y / speed, -tangent.x / speed});
    c.weights.push_back(speed * kTwoPi / m);
  }
  return c;
}

/// R_m = min rho, R_M = max rho, a = max (rho'/rho)^2 (squared tangent of the
/// angle between the normal and the radial direction).
struct StarConstants {
  double R_m = 0.0;
  double R_M = 0.0;
  double a = 0.0;
};

namespace detail {

// Grid scan followed by a bracketed Brent refinement around the best node.
template <class F>
double refined_max(F f, int grid) {
  const double h = kTwoPi / grid;
  int best = 0;
  double best_val = f(0.0);
  for (int j = 1; j < grid; ++j) {
    const double v = f(h * j);
    if (v > best_val) {
      best_val = v;
      best = j;
    }
  }
  const auto res = boost::math::tools::brent_find_minima(
      [&f](double t) { return -f(t); }, h * (best - 1), h * (best + 1),
      std::numeric_limits<double>::digits);
  return std::max(best_val, -res.second);
}

}  // namespace detail

inline StarConstants star_constants(const OuterShape& shape, int grid = 4096) {
  StarConstants k;
  k.R_M = detail::refined_max([&](double t) { return polar_sample(shape, t).rho; }, grid);
  k.R_m = -detail::refined_max([&](double t) { return -polar_sample(shape, t).rho; }, grid);
  k.a = detail::refined_max(
      [&](double t) {
        const auto s = polar_sample(shape, t);
        return (s.drho / s.rho) * (s.drho / s.rho);
      },
      grid);
  if (std::holds_alternative<StarPolarCurve>(shape) &&
      std::get<StarPolarCurve>(shape).is_constant())
    k.a = 0.0;
  return k;
}

/// Boundary pieces handed to the solver: curve plus whether it carries the
/// Steklov condition (true) or the Neumann condition (false).
struct BoundaryPiece {
  const BoundaryCurve* curve;
  bool steklov;
};

/// Star-shaped domain about `center`, no hole (classical Steklov setting).
class SimplyConnectedDomain {
 public:
  SimplyConnectedDomain(OuterShape shape, int m_out, Point center = {})
      : shape_(std::move(shape)),
        center_(center),
        m_out_(m_out),
        outer_(discretize_star(shape_, m_out, center)),
        constants_(star_constants(shape_)) {}

  [[nodiscard]] const OuterShape& shape() const { return shape_; }
  [[nodiscard]] Point center() const { return center_; }
  [[nodiscard]] const BoundaryCurve& outer() const { return outer_; }
  [[nodiscard]] const StarConstants& constants() const { return constants_; }
  [[nodiscard]] double R_m() const { return constants_.R_m; }
  [[nodiscard]] double R_M() const { return constants_.R_M; }
  [[nodiscard]] double a() const { return constants_.a; }
  [[nodiscard]] int m_out() const { return m_out_; }

  [[nodiscard]] double outer_radius(double theta) const {
    return polar_sample(shape_, theta).rho;
  }

  [[nodiscard]] bool contains(Point p, double rel_tol = 0.0) const {
    const Point q = p - center_;
    const double r = norm(q);
    return r < outer_radius(std::atan2(q.y, q.x)) * (1.0 + rel_tol);
  }

  [[nodiscard]] SimplyConnectedDomain translated(Point shift) const {
    return {shape_, m_out_, center_ + shift};
  }
  [[nodiscard]] SimplyConnectedDomain scaled(double s) const {
    return {snspec::scaled(shape_, s), m_out_, s * center_};
  }
  [[nodiscard]] SimplyConnectedDomain resampled(int m_out) const { return {shape_, m_out, center_}; }

  [[nodiscard]] std::vector<BoundaryPiece> boundary_pieces(bool /*steklov_everywhere*/) const {
    return {{&outer_, true}};
  }

 private:
  OuterShape shape_;
  Point center_;
  int m_out_;
  BoundaryCurve outer_;
  StarConstants constants_;
};

/// Star-shaped outer boundary (Gamma_2) minus the closed disk of radius R1
/// about the same center (Gamma_1).
class DoublyConnectedDomain {
 public:
  DoublyConnectedDomain(OuterShape shape, double R1, int m_out, int m_in, Point center = {})
      : outer_domain_(std::move(shape), m_out, center), R1_(R1), m_in_(m_in) {
    if (!(R1 > 0.0)) throw std::invalid_argument("build_domain: hole radius must be positive");
    if (!(R1 < outer_domain_.R_m()))
      throw std::invalid_argument("build_domain: hole is not strictly inside the outer boundary");
    inner_ = discretize_circle(center, R1, m_in, Orientation::inward);
  }

  [[nodiscard]] const OuterShape& shape() const { return outer_domain_.shape(); }
  [[nodiscard]] Point center() const { return outer_domain_.center(); }
  [[nodiscard]] const BoundaryCurve& outer() const { return outer_domain_.outer(); }
  [[nodiscard]] const BoundaryCurve& inner() const { return inner_; }
  [[nodiscard]] double R1() const { return R1_; }
  [[nodiscard]] double R_m() const { return outer_domain_.R_m(); }
  [[nodiscard]] double R_M() const { return outer_domain_.R_M(); }
  [[nodiscard]] double a() const { return outer_domain_.a(); }
  [[nodiscard]] const StarConstants& constants() const { return outer_domain_.constants(); }
  [[nodiscard]] int m_out() const { return outer_domain_.m_out(); }
  [[nodiscard]] int m_in() const { return m_in_; }
  [[nodiscard]] const SimplyConnectedDomain& without_hole() const { return outer_domain_; }

  [[nodiscard]] double outer_radius(double theta) const { return outer_domain_.outer_radius(theta); }

  /// Strict membership: R1 < |p - c| < rho(angle). With rel_tol > 0 the test
  /// is relaxed to the closed domain up to that relative slack.
  [[nodiscard]] bool contains(Point p, double rel_tol = 0.0) const {
    const Point q = p - center();
    const double r = norm(q);
    if (rel_tol == 0.0 && !(r > R1_)) return false;
    if (r < R1_ * (1.0 - rel_tol)) return false;
    return outer_domain_.contains(p, rel_tol);
  }

  [[nodiscard]] DoublyConnectedDomain translated(Point shift) const {
    return {shape(), R1_, m_out(), m_in_, center() + shift};
  }
  [[nodiscard]] DoublyConnectedDomain scaled(double s) const {
    return {snspec::scaled(shape(), s), s * R1_, m_out(), m_in_, s * center()};
  }
  [[nodiscard]] DoublyConnectedDomain resampled(int m_out, int m_in) const {
    return {shape(), R1_, m_out, m_in, center()};
  }
  [[nodiscard]] DoublyConnectedDomain with_hole_radius(double R1) const {
    return {shape(), R1, m_out(), m_in_, center()};
  }

  /// Outer curve is always Steklov; the hole is Neumann unless the classical
  /// Steklov problem is requested on the whole boundary.
  [[nodiscard]] std::vector<BoundaryPiece> boundary_pieces(bool steklov_everywhere) const {
    return {{&outer(), true}, {&inner_, steklov_everywhere}};
  }

 private:
  SimplyConnectedDomain outer_domain_;
  double R1_;
  int m_in_;
  BoundaryCurve inner_;
};

inline DoublyConnectedDomain build_domain(const OuterShape& outer, double R1, int m_out, int m_in) {
  return {outer, R1, m_out, m_in};
}

/// Annulus spec (n = 2) as a solver domain; the outer circle is centered at (0, d).
inline DoublyConnectedDomain build_annulus(const AnnulusSpec& spec, int m_out, int m_in) {
  spec.validate();
  if (spec.n != 2) throw std::invalid_argument("build_annulus: planar domains only (n = 2)");
  return {EccentricCircle{spec.R2, spec.d}, spec.R1, m_out, m_in};
}

/// Area enclosed by a polar graph, (1/2) \int rho^2, by the trapezoid rule.
inline double enclosed_area(const OuterShape& shape, int grid = 4096) {
  double s = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double r = polar_sample(shape, kTwoPi * j / grid).rho;
    s += r * r;
  }
  return 0.5 * s * kTwoPi / grid;
}

inline double curve_perimeter(const OuterShape& shape, int grid = 4096) {
  double s = 0.0;
  for (int j = 0; j < grid; ++j) {
    const auto p = polar_sample(shape, kTwoPi * j / grid);
    s += std::hypot(p.rho, p.drho);
  }
  return s * kTwoPi / grid;
}

/// Signed curvature numerator rho^2 + 2 rho'^2 - rho rho''; non-negative
/// everywhere iff the polar graph bounds a convex set.
inline double min_convexity_indicator(const OuterShape& shape, int grid = 4096) {
  double lo = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid; ++j) {
    const auto p = polar_sample(shape, kTwoPi * j / grid);
    lo = std::min(lo, p.rho * p.rho + 2.0 * p.drho * p.drho - p.rho * p.d2rho);
  }
  return lo;
}

}  // namespace snspec
