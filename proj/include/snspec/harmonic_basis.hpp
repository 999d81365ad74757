#pragma once

#include <complex>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>

#include "snspec/geometry.hpp"

namespace snspec {

enum class MemberKind { constant, logarithm, positive_cos, positive_sin, negative_cos, negative_sin };

struct MemberInfo {
  MemberKind kind = MemberKind::constant;
  int order = 0;
};

/// Truncated harmonic trial space about `center`, ordered as
///   1, log(r/s_in), {(r/s_out)^k cos k t, (r/s_out)^k sin k t}_{k<=N},
///   {(s_in/r)^k cos k t, (s_in/r)^k sin k t}_{k<=N}.
/// Without negative powers (simply connected case) the log and negative
/// members are dropped. The positive powers may be expanded about a separate
/// point (`positive_center`); they span the same polynomial space but stay
/// O(1) on an outer circle that is not centered at the hole.
class HarmonicBasis {
 public:
  HarmonicBasis(int N, double scale_out, double scale_in, bool include_negative, Point center = {})
      : HarmonicBasis(N, scale_out, scale_in, include_negative, center, center) {}

  HarmonicBasis(int N, double scale_out, double scale_in, bool include_negative, Point center,
                Point positive_center)
      : N_(N),
        scale_out_(scale_out),
        scale_in_(scale_in),
        negative_(include_negative),
        center_(center),
        positive_center_(positive_center) {
    if (N < 1) throw std::invalid_argument("HarmonicBasis: truncation order must be >= 1");
    if (!(scale_out > 0.0)) throw std::invalid_argument("HarmonicBasis: outer scale must be positive");
    if (negative_ && !(scale_in > 0.0)) throw std::invalid_argument("HarmonicBasis: inner scale must be positive");
  }

  [[nodiscard]] int order() const { return N_; }
  [[nodiscard]] double scale_out() const { return scale_out_; }
  [[nodiscard]] double scale_in() const { return scale_in_; }
  [[nodiscard]] bool include_negative() const { return negative_; }
  [[nodiscard]] Point center() const { return center_; }
  [[nodiscard]] Point positive_center() const { return positive_center_; }

  [[nodiscard]] int dimension() const { return negative_ ? 4 * N_ + 2 : 2 * N_ + 1; }

  [[nodiscard]] MemberInfo member(int i) const {
    if (i < 0 || i >= dimension()) throw std::out_of_range("HarmonicBasis::member");
    if (i == 0) return {MemberKind::constant, 0};
    if (negative_ && i == 1) return {MemberKind::logarithm, 0};
    const int pos0 = negative_ ? 2 : 1;
    const int j = i - pos0;
    if (j < 2 * N_) return {j % 2 == 0 ? MemberKind::positive_cos : MemberKind::positive_sin, j / 2 + 1};
    const int q = j - 2 * N_;
    return {q % 2 == 0 ? MemberKind::negative_cos : MemberKind::negative_sin, q / 2 + 1};
  }

  /// Values (and optionally gradients) of every member at p. `gradients` may be
  /// empty; otherwise both spans must have dimension() entries.
  void evaluate(Point p, std::span<double> values, std::span<Point> gradients = {}) const {
    using cd = std::complex<double>;
    const bool grad = !gradients.empty();
    const cd w(p.x - center_.x, p.y - center_.y);
    int idx = 0;
    values[idx] = 1.0;
    if (grad) gradients[idx] = {0.0, 0.0};
    ++idx;
    if (negative_) {
      values[idx] = std::log(std::abs(w) / scale_in_);
      if (grad) set_re_gradient(gradients[idx], 1.0 / w);
      ++idx;
    }
    {
      const cd z = cd(p.x - positive_center_.x, p.y - positive_center_.y) / scale_out_;
      cd zk(1.0, 0.0);
      for (int k = 1; k <= N_; ++k) {
        const cd deriv = static_cast<double>(k) * zk / scale_out_;
        zk *= z;
        values[idx] = zk.real();
        values[idx + 1] = zk.imag();
        if (grad) {
          set_re_gradient(gradients[idx], deriv);
          set_im_gradient(gradients[idx + 1], deriv);
        }
        idx += 2;
      }
    }
    if (negative_) {
      const cd q = scale_in_ / w;
      cd qk(1.0, 0.0);
      for (int k = 1; k <= N_; ++k) {
        qk *= q;
        values[idx] = qk.real();
        values[idx + 1] = -qk.imag();
        if (grad) {
          const cd deriv = -static_cast<double>(k) * qk / w;
          set_re_gradient(gradients[idx], deriv);
          set_im_gradient(gradients[idx + 1], -deriv);
        }
        idx += 2;
      }
    }
  }

  [[nodiscard]] HarmonicBasis with_order(int N) const {
    return {N, scale_out_, scale_in_, negative_, center_, positive_center_};
  }

 private:
  // For analytic f: grad Re f = (Re f', -Im f'), grad Im f = (Im f', Re f').
  static void set_re_gradient(Point& g, std::complex<double> d) { g = {d.real(), -d.imag()}; }
  static void set_im_gradient(Point& g, std::complex<double> d) { g = {d.imag(), d.real()}; }

  int N_;
  double scale_out_;
  double scale_in_;
  bool negative_;
  Point center_;
  Point positive_center_;
};

namespace detail {

// Expansion point and scale for the positive powers: the circle's own center
// for an eccentric circle, the star pole otherwise.
inline std::pair<Point, double> positive_expansion(const OuterShape& shape, Point pole, double R_M) {
  if (const auto* c = std::get_if<EccentricCircle>(&shape)) return {pole + Point{0.0, c->d}, c->R2};
  return {pole, R_M};
}

}  // namespace detail

inline HarmonicBasis make_basis(const DoublyConnectedDomain& domain, int N) {
  const auto [pc, scale] = detail::positive_expansion(domain.shape(), domain.center(), domain.R_M());
  return {N, scale, domain.R1(), true, domain.center(), pc};
}

inline HarmonicBasis make_basis(const SimplyConnectedDomain& domain, int N) {
  const auto [pc, scale] = detail::positive_expansion(domain.shape(), domain.center(), domain.R_M());
  return {N, scale, 0.0, false, domain.center(), pc};
}

}  // namespace snspec
