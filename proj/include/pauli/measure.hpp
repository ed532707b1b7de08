#pragma once

// Disk masses of densities on ℂ and sampled checks of the doubling
// condition μ(D(z,r)) ≤ C μ(D(z,r/2)) and its consequence
// μ(D(z,2r)) ≥ (1 + C⁻³) μ(D(z,r)).

#include <algorithm>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "pauli/error.hpp"
#include "pauli/parallel.hpp"
#include "pauli/quadrature.hpp"
#include "pauli/weight.hpp"

namespace pauli {

/// ∫_{D(center, r)} density dλ in polar coordinates: Gauss–Legendre of order
/// `rule` in the radius, `rule`-point periodic trapezoid in the angle.
template <class Density>
double disk_mass(Density&& density, std::complex<double> center, double r, int rule = 16) {
  if (!(r > 0.0)) throw ConfigError("disk radius must be positive");
  const QuadratureRule radial = gauss_legendre(rule, 0.0, r);
  const QuadratureRule angular = periodic_trapezoid(rule);
  double total = 0.0;
  for (std::size_t i = 0; i < radial.size(); ++i) {
    const double rho = radial.nodes[i];
    double ring = 0.0;
    for (std::size_t k = 0; k < angular.size(); ++k) {
      const std::complex<double> w = center + std::polar(rho, angular.nodes[k]);
      const double value = density(w);
      if (value < 0.0) {
        throw NumericalError("negative density value " + std::to_string(value) + " at (" +
                             std::to_string(w.real()) + ", " + std::to_string(w.imag()) + ")");
      }
      ring += angular.weights[k] * value;
    }
    total += radial.weights[i] * rho * ring;
  }
  return total;
}

struct DoublingSample {
  std::complex<double> center;
  double radius = 0.0;
  double mass = 0.0;         // μ(D(z, r))
  double mass_half = 0.0;    // μ(D(z, r/2))
  double mass_double = 0.0;  // μ(D(z, 2r))
  double ratio = 0.0;        // mass / mass_half
  double growth = 0.0;       // mass_double / mass
  bool indeterminate = false;
  bool violates_growth = false;
};

struct DoublingReport {
  double C_est = 0.0;
  std::vector<DoublingSample> samples;
  std::size_t violations_14 = 0;  // samples with μ(D(z,r/2)) = 0 < μ(D(z,r))
  std::size_t violations_15 = 0;
  std::size_t indeterminate = 0;
  double min_growth_15 = std::numeric_limits<double>::infinity();
  double growth_threshold = 0.0;  // 1 + C_est⁻³

  /// Never "verified": C_est is a lower bound for the true constant.
  std::string status() const {
    if (indeterminate == samples.size()) return "trivial measure";
    if (violations_14 == 0 && violations_15 == 0) return "consistent with doubling";
    return "not doubling on sample set";
  }
  bool consistent() const { return status() == "consistent with doubling"; }
};

/// 9×9 centers on [−8, 8]².
inline std::vector<std::complex<double>> default_doubling_centers(int per_axis = 9, double extent = 8.0) {
  std::vector<std::complex<double>> c;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      const double step = per_axis > 1 ? 2.0 * extent / (per_axis - 1) : 0.0;
      c.emplace_back(-extent + i * step, -extent + j * step);
    }
  return c;
}

inline std::vector<double> default_doubling_radii() { return {0.25, 0.5, 1.0, 2.0, 4.0}; }

template <class Density>
DoublingReport doubling_report(Density&& density, const std::vector<std::complex<double>>& centers,
                               const std::vector<double>& radii, int rule = 16) {
  if (centers.empty() || radii.empty()) throw ConfigError("doubling_report needs centers and radii");
  for (double r : radii)
    if (!(r > 0.0)) throw ConfigError("doubling radii must be positive");

  DoublingReport report;
  report.samples.resize(centers.size() * radii.size());
  parallel_for(report.samples.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t s = begin; s < end; ++s) {
      DoublingSample& d = report.samples[s];
      d.center = centers[s / radii.size()];
      d.radius = radii[s % radii.size()];
      d.mass = disk_mass(density, d.center, d.radius, rule);
      d.mass_half = disk_mass(density, d.center, 0.5 * d.radius, rule);
      d.mass_double = disk_mass(density, d.center, 2.0 * d.radius, rule);
    }
  });

  double c_est = 0.0;
  for (DoublingSample& d : report.samples) {
    if (d.mass_half > 0.0) {
      d.ratio = d.mass / d.mass_half;
      c_est = std::max(c_est, d.ratio);
    } else if (d.mass > 0.0) {
      d.ratio = std::numeric_limits<double>::infinity();
      ++report.violations_14;
    } else {
      d.indeterminate = true;
      ++report.indeterminate;
    }
  }
  report.C_est = c_est;
  report.growth_threshold = c_est > 0.0 ? 1.0 + 1.0 / (c_est * c_est * c_est) : 0.0;
  for (DoublingSample& d : report.samples) {
    if (d.mass <= 0.0) continue;
    d.growth = d.mass_double / d.mass;
    report.min_growth_15 = std::min(report.min_growth_15, d.growth);
    if (d.growth < report.growth_threshold * (1.0 - 1e-12)) {
      d.violates_growth = true;
      ++report.violations_15;
    }
  }
  return report;
}

/// Δφ as a density on ℂ for a weight in one complex variable.
inline auto laplacian_density(const WeightSpec& w) {
  if (w.dimension() != 1) throw DimensionError("Δφ density needs a weight in one complex variable");
  return [&w](std::complex<double> z) {
    const double p[2] = {z.real(), z.imag()};
    return w.laplacian()(p);
  };
}

}  // namespace pauli
