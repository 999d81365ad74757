#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace snspec {

/// Gauss-Legendre nodes and weights mapped to [a, b]. Nodes come from Newton
/// iteration on P_n started at the Chebyshev-like guess cos(pi (i - 1/4)/(n + 1/2)).
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  GaussLegendreRule(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("GaussLegendreRule: need at least one node");
    nodes.resize(n);
    weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      nodes[i] = mid - half * z;
      nodes[n - 1 - i] = mid + half * z;
      weights[i] = half * w;
      weights[n - 1 - i] = half * w;
    }
  }

  [[nodiscard]] int size() const { return static_cast<int>(nodes.size()); }

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

}  // namespace snspec
