#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pauli/error.hpp"

namespace pauli {

/// Uniform tensor grid on [−L, L]^{2n} with N points per axis (N odd, so the
/// origin is a node). Boundary nodes are the zero Dirichlet layer; operators
/// act on the (N−2)^{2n} interior nodes, indexed lexicographically over
/// (x₁, y₁, …, xₙ, yₙ) with x₁ slowest.
struct Grid {
  std::size_t n = 1;
  double L = 1.0;
  double h = 1.0;
  std::size_t N = 3;

  std::size_t axes() const noexcept { return 2 * n; }
  std::size_t interior_per_axis() const noexcept { return N - 2; }

  std::size_t total_nodes() const noexcept {
    std::size_t t = 1;
    for (std::size_t a = 0; a < axes(); ++a) t *= N;
    return t;
  }

  std::size_t unknowns() const noexcept {
    std::size_t t = 1;
    for (std::size_t a = 0; a < axes(); ++a) t *= interior_per_axis();
    return t;
  }

  /// Coordinate of interior index i along any axis.
  double coordinate(std::size_t i) const noexcept {
    return -L + static_cast<double>(i + 1) * h;
  }

  /// Distance (in index steps) between consecutive nodes along `axis`.
  std::size_t stride(std::size_t axis) const noexcept {
    std::size_t s = 1;
    for (std::size_t a = axis + 1; a < axes(); ++a) s *= interior_per_axis();
    return s;
  }

  void indices(std::size_t node, std::span<std::size_t> out) const {
    const std::size_t m = interior_per_axis();
    for (std::size_t a = axes(); a-- > 0;) {
      out[a] = node % m;
      node /= m;
    }
  }

  void point(std::size_t node, std::span<double> out) const {
    const std::size_t m = interior_per_axis();
    for (std::size_t a = axes(); a-- > 0;) {
      out[a] = coordinate(node % m);
      node /= m;
    }
  }

  std::vector<double> point(std::size_t node) const {
    std::vector<double> p(axes());
    point(node, p);
    return p;
  }

  /// Smallest index distance to the outside of the interior block (0 for
  /// nodes adjacent to the Dirichlet layer).
  std::size_t layer(std::size_t node) const {
    const std::size_t m = interior_per_axis();
    std::size_t d = m;
    for (std::size_t a = 0; a < axes(); ++a) {
      const std::size_t i = node % m;
      node /= m;
      d = std::min(d, std::min(i, m - 1 - i));
    }
    return d;
  }
};

inline constexpr std::size_t kDefaultGridCap = 200000;

/// N = 2·round(L/h) + 1 and the stored spacing is h = 2L/(N−1).
inline Grid build_grid(std::size_t n, double L, double h, std::size_t cap = kDefaultGridCap) {
  if (n < 1 || n > 2) throw ConfigError("grids support n = 1 or n = 2, got n = " + std::to_string(n));
  if (!(L > 0.0)) throw ConfigError("grid half-width L must be positive");
  if (!(h > 0.0 && h <= L)) throw ConfigError("grid spacing must satisfy 0 < h <= L");
  Grid g;
  g.n = n;
  g.L = L;
  const auto half = static_cast<std::size_t>(std::llround(L / h));
  g.N = 2 * half + 1;
  g.h = 2.0 * L / static_cast<double>(g.N - 1);
  if (g.total_nodes() > cap) {
    throw ConfigError("grid has " + std::to_string(g.total_nodes()) + " nodes, above the cap of " +
                      std::to_string(cap));
  }
  return g;
}

}  // namespace pauli
