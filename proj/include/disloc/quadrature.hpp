#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "disloc/core.hpp"

namespace disloc {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum = 2
};

/// Gauss-Legendre nodes and weights by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // recurrence for P_n(x) and P_n'(x)
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Finite-difference weights for the d-th derivative at x0 from arbitrary
/// nodes (Fornberg's recursion). weights[k][j]: k-th derivative, node j.
inline std::vector<std::vector<double>> fd_weights(double x0, const std::vector<double>& x,
                                                   int max_order) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, max_order);
    double c2 = 1.0;
    double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k)
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// First derivative of f at x0 by a 5-point 4th-order stencil with spacing h,
/// shifted one-sided as needed to stay inside [lo, hi].
template <typename F>
double fd_derivative_1d(const F& f, double x0, double lo, double hi, double h) {
  constexpr int npts = 5;
  if (hi - lo < (npts - 1) * h) throw StencilOutOfRange("interval too small for stencil");
  // center the stencil on x0, then shift into the interval
  double start = x0 - 2.0 * h;
  if (start < lo) start = lo;
  if (start + (npts - 1) * h > hi) start = hi - (npts - 1) * h;
  std::vector<double> xs(npts);
  for (int k = 0; k < npts; ++k) xs[k] = start + k * h;
  auto w = fd_weights(x0, xs, 1);
  double d = 0.0;
  for (int k = 0; k < npts; ++k) d += w[1][k] * f(xs[k]);
  return d;
}

}  // namespace disloc
