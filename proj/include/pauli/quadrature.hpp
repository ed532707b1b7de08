#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "pauli/error.hpp"

namespace pauli {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Gauss–Legendre rule on [a, b]; exact for polynomials of degree ≤ 2q−1.
inline QuadratureRule gauss_legendre(int q, double a = -1.0, double b = 1.0) {
  if (q < 1) throw ConfigError("quadrature order must be positive");
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(q));
  rule.weights.resize(static_cast<std::size_t>(q));
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  // (P_q(x), P_q'(x)) by the three-term recurrence.
  const auto legendre = [q](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, q * (x * p1 - p0) / (x * x - 1.0)};
  };
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(q - 1 - i);
    rule.nodes[lo] = mid - half * x;
    rule.nodes[hi] = mid + half * x;
    rule.weights[lo] = half * w;
    rule.weights[hi] = half * w;
  }
  return rule;
}

/// Equispaced rule for 2π-periodic integrands on [0, 2π); exact for
/// trigonometric polynomials of degree < q.
inline QuadratureRule periodic_trapezoid(int q) {
  if (q < 1) throw ConfigError("quadrature order must be positive");
  QuadratureRule rule;
  const double step = 2.0 * std::numbers::pi / q;
  for (int k = 0; k < q; ++k) {
    rule.nodes.push_back(k * step);
    rule.weights.push_back(step);
  }
  return rule;
}

}  // namespace pauli
