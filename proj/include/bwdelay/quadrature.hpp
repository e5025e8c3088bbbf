#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "bwdelay/constants.hpp"

namespace bwdelay {

/// Nodes and weights of a one-dimensional quadrature rule, nodes ascending.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss-Legendre rule mapped onto [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  const auto positive = boost::math::legendre_p_zeros<double>(n);
  std::vector<double> x;
  x.reserve(n);
  for (double z : positive) {
    x.push_back(z);
    if (z != 0.0) x.push_back(-z);
  }
  std::sort(x.begin(), x.end());

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    const double dp = boost::math::legendre_p_prime(n, x[i]);
    rule.nodes[i] = mid + half * x[i];
    rule.weights[i] = half * 2.0 / ((1.0 - x[i] * x[i]) * dp * dp);
  }
  return rule;
}

/// Clenshaw-Curtis rule with `intervals` + 1 Chebyshev extrema on [-1, 1].
inline QuadratureRule clenshaw_curtis(int intervals) {
  if (intervals < 2 || intervals % 2 != 0) throw std::invalid_argument("clenshaw_curtis: need an even interval count");
  const int n = intervals;
  QuadratureRule rule;
  rule.nodes.resize(n + 1);
  rule.weights.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double theta = pi * j / n;
    double v = 1.0;
    for (int k = 1; k <= n / 2; ++k) {
      const double b = (2 * k == n) ? 1.0 : 2.0;
      v -= b * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    }
    const double c = (j == 0 || j == n) ? 1.0 : 2.0;
    // ascending order
    rule.nodes[n - j] = std::cos(theta);
    rule.weights[n - j] = c * v / n;
  }
  rule.nodes[n / 2] = 0.0;
  return rule;
}

/// Order of each Clenshaw-Curtis panel in the composite rule.
inline constexpr int cc_panel_intervals = 16;

/// Composite Clenshaw-Curtis rule on [a, b] with `panels` equal panels.
/// Adjacent panels share their endpoint, so there are 16 * panels + 1 nodes.
inline QuadratureRule composite_clenshaw_curtis(int panels, double a, double b) {
  if (panels < 1) throw std::invalid_argument("composite_clenshaw_curtis: panels must be positive");
  static const QuadratureRule base = clenshaw_curtis(cc_panel_intervals);
  const int m = cc_panel_intervals;
  const double h = (b - a) / panels;

  QuadratureRule rule;
  rule.nodes.assign(static_cast<std::size_t>(m) * panels + 1, 0.0);
  rule.weights.assign(rule.nodes.size(), 0.0);
  for (int p = 0; p < panels; ++p) {
    const double left = a + h * p;
    for (int j = 0; j <= m; ++j) {
      const std::size_t idx = static_cast<std::size_t>(p) * m + j;
      rule.nodes[idx] = left + 0.5 * h * (base.nodes[j] + 1.0);
      rule.weights[idx] += 0.5 * h * base.weights[j];
    }
  }
  rule.nodes.back() = b;
  return rule;
}

}  // namespace bwdelay
