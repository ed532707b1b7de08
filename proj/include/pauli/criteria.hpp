#pragma once

// Radial evidence for the Levi-matrix growth conditions and the
// theorem-based classification of P±.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pauli/error.hpp"
#include "pauli/measure.hpp"
#include "pauli/parallel.hpp"
#include "pauli/quadrature.hpp"
#include "pauli/weight.hpp"

namespace pauli {

enum class Quantity { mu, z2mu, sq, ball_integral };

struct QuantitySpec {
  Quantity kind = Quantity::mu;
  std::size_t q = 1;  // for sq

  std::string name() const {
    switch (kind) {
      case Quantity::mu: return "mu";
      case Quantity::z2mu: return "z2mu";
      case Quantity::sq: return "sq(" + std::to_string(q) + ")";
      case Quantity::ball_integral: return "ball_integral";
    }
    return "?";
  }
};

/// Accepts "mu", "z2mu", "sq(q)" and "ball_integral".
inline QuantitySpec parse_quantity(const std::string& s) {
  if (s == "mu") return {Quantity::mu, 1};
  if (s == "z2mu") return {Quantity::z2mu, 1};
  if (s == "ball_integral") return {Quantity::ball_integral, 1};
  if (s.size() > 4 && s.rfind("sq(", 0) == 0 && s.back() == ')') {
    const std::string digits = s.substr(3, s.size() - 4);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return {Quantity::sq, static_cast<std::size_t>(std::stoul(digits))};
    }
  }
  throw ConfigError("unknown radial quantity '" + s + "'");
}

struct RadialSeries {
  std::string quantity;
  std::vector<double> radii;
  std::vector<double> values;            // minimum over the sampled sphere
  std::vector<Point> witnesses;          // argmin point per radius
  std::size_t directions = 0;
};

// ---------------------------------------------------------------------------
// Sphere sampling
// ---------------------------------------------------------------------------

/// Unit directions in ℝ²ⁿ. n = 1: `count` equispaced angles. n = 2: the four
/// coordinate axes, then an additive-recurrence (R₃) sequence mapped to S³ by
/// |w₁|² = 1 − u, |w₂|² = u with independent phases, which is uniform for
/// u, α, β uniform.
inline std::vector<Point> sphere_directions(std::size_t n, std::size_t count) {
  std::vector<Point> dirs;
  if (n == 1) {
    if (count < 8) throw ConfigError("n = 1 needs at least 8 directions per radius");
    for (std::size_t k = 0; k < count; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      dirs.push_back({std::cos(t), std::sin(t)});
    }
    return dirs;
  }
  if (n != 2) throw DimensionError("sphere sampling supports n = 1 and n = 2");
  if (count < 32) throw ConfigError("n = 2 needs at least 32 directions per radius");
  for (std::size_t a = 0; a < 4; ++a) {
    Point p(4, 0.0);
    p[a] = 1.0;
    dirs.push_back(p);
  }
  // g is the real root of x⁴ = x + 1; (1/g, 1/g², 1/g³) has no rational relations.
  const double g = 1.2207440846057596;
  const double alpha[3] = {1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)};
  for (std::size_t k = 1; dirs.size() < count; ++k) {
    double t[3];
    for (int i = 0; i < 3; ++i) t[i] = std::fmod(0.5 + alpha[i] * static_cast<double>(k), 1.0);
    const double r1 = std::sqrt(1.0 - t[0]), r2 = std::sqrt(t[0]);
    const double a = 2.0 * std::numbers::pi * t[1], b = 2.0 * std::numbers::pi * t[2];
    dirs.push_back({r1 * std::cos(a), r1 * std::sin(a), r2 * std::cos(b), r2 * std::sin(b)});
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// Ball integral of tr M_φ
// ---------------------------------------------------------------------------

/// ∫_{B₁(z)} tr M_φ dλ over the real 2n-dimensional unit ball. n = 1: polar
/// Gauss–Legendre × trapezoid. n = 2: w₁ = ρ√(1−u)e^{iα}, w₂ = ρ√u e^{iβ}
/// with dλ = ½ρ³ dρ du dα dβ, Gauss–Legendre in ρ and u, trapezoid in α, β.
inline double ball_integral(const WeightSpec& w, std::span<const double> center, int order = 16) {
  if (order < 8) throw ConfigError("ball quadrature order must be at least 8");
  const std::size_t n = w.dimension();
  w.check_point(center);
  if (n == 1) {
    return disk_mass([&](std::complex<double> z) {
      const double p[2] = {z.real(), z.imag()};
      return std::max(0.0, 0.25 * w.laplacian()(p));
    }, {center[0], center[1]}, 1.0, order);
  }
  if (n != 2) throw DimensionError("ball_integral supports n = 1 and n = 2");
  const QuadratureRule rho = gauss_legendre(order, 0.0, 1.0);
  const QuadratureRule u = gauss_legendre(order, 0.0, 1.0);
  const QuadratureRule angle = periodic_trapezoid(order);
  double total = 0.0;
  Point p(4);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double shell = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double m1 = rho.nodes[i] * std::sqrt(1.0 - u.nodes[j]), m2 = rho.nodes[i] * std::sqrt(u.nodes[j]);
      double ring = 0.0;
      for (std::size_t a = 0; a < angle.size(); ++a)
        for (std::size_t b = 0; b < angle.size(); ++b) {
          p[0] = center[0] + m1 * std::cos(angle.nodes[a]);
          p[1] = center[1] + m1 * std::sin(angle.nodes[a]);
          p[2] = center[2] + m2 * std::cos(angle.nodes[b]);
          p[3] = center[3] + m2 * std::sin(angle.nodes[b]);
          ring += angle.weights[a] * angle.weights[b] * 0.25 * w.laplacian()(p);
        }
      shell += u.weights[j] * ring;
    }
    total += rho.weights[i] * 0.5 * std::pow(rho.nodes[i], 3) * shell;
  }
  if (!std::isfinite(total)) throw NumericalError("ball quadrature overflow");
  return total;
}

// ---------------------------------------------------------------------------
// Radial series
// ---------------------------------------------------------------------------

/// For each radius R, the minimum of the quantity over R·(sampled unit
/// directions), with the minimizing point. Ties keep the lowest sample index.
inline RadialSeries radial_series(const WeightSpec& w, const QuantitySpec& quantity, const std::vector<double>& radii,
                                  std::size_t directions_per_radius, int ball_order = 16) {
  if (radii.empty()) throw ConfigError("radial_series needs radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ConfigError("radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw ConfigError("radii must be increasing");
  }
  if (quantity.kind == Quantity::sq && (quantity.q < 1 || quantity.q > w.dimension())) {
    throw ConfigError("sq(q) needs 1 ≤ q ≤ n");
  }
  const std::vector<Point> dirs = sphere_directions(w.dimension(), directions_per_radius);
  RadialSeries s;
  s.quantity = quantity.name();
  s.radii = radii;
  s.directions = dirs.size();
  s.values.resize(radii.size());
  s.witnesses.resize(radii.size());
  const auto evaluate = [&](const Point& p) {
    switch (quantity.kind) {
      case Quantity::mu: return lowest_levi_eigenvalue(w, p);
      case Quantity::z2mu: {
        double r2 = 0.0;
        for (double c : p) r2 += c * c;
        return r2 * lowest_levi_eigenvalue(w, p);
      }
      case Quantity::sq: return levi_partial_sum(w, p, quantity.q);
      case Quantity::ball_integral: return ball_integral(w, p, ball_order);
    }
    return 0.0;
  };
  std::vector<double> grid(radii.size() * dirs.size());
  parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      Point p = dirs[idx % dirs.size()];
      for (double& c : p) c *= radii[idx / dirs.size()];
      grid[idx] = evaluate(p);
    }
  });
  for (std::size_t i = 0; i < radii.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t d = 1; d < dirs.size(); ++d)
      if (grid[i * dirs.size() + d] < grid[i * dirs.size() + best]) best = d;
    s.values[i] = grid[i * dirs.size() + best];
    Point p = dirs[best];
    for (double& c : p) c *= radii[i];
    s.witnesses[i] = p;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Verdict { holds, fails, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds (numerically)";
    case Verdict::fails: return "fails (witness found)";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConditionVerdict {
  std::string condition;
  std::string series;  // name of the evidence series
  Verdict verdict = Verdict::inconclusive;
  std::optional<Point> witness;
  std::string rule;
};

/// Divergence: the last three values strictly increase and final ≥ 10·first.
/// Boundedness witness: final ≤ first + 1e-8·|first| (no growth over the
/// whole radial range), reported at the minimizing point of the largest radius.
inline ConditionVerdict divergence_verdict(const std::string& condition, const RadialSeries& s) {
  ConditionVerdict v{condition, s.quantity, Verdict::inconclusive, std::nullopt,
                     "diverges if the last three values strictly increase and final ≥ 10·first"};
  const auto& x = s.values;
  if (x.size() >= 3) {
    const std::size_t m = x.size();
    const bool rising = x[m - 3] < x[m - 2] && x[m - 2] < x[m - 1];
    if (rising && x.front() > 0.0 && x.back() >= 10.0 * x.front()) {
      v.verdict = Verdict::holds;
      return v;
    }
  }
  if (!x.empty() && x.back() <= x.front() + 1e-8 * std::abs(x.front())) {
    v.verdict = Verdict::fails;
    v.witness = s.witnesses.back();
  }
  return v;
}

/// liminf > 0: holds when the last three values exceed 1e-10; fails with a
/// witness when the final value is ≤ 1e-10.
inline ConditionVerdict positivity_verdict(const std::string& condition, const RadialSeries& s) {
  ConditionVerdict v{condition, s.quantity, Verdict::inconclusive, std::nullopt,
                     "holds if the last three values exceed 1e-10; fails if the final value is ≤ 1e-10"};
  const auto& x = s.values;
  if (x.empty()) return v;
  if (x.back() <= 1e-10) {
    v.verdict = Verdict::fails;
    v.witness = s.witnesses.back();
    return v;
  }
  const std::size_t from = x.size() >= 3 ? x.size() - 3 : 0;
  if (x.size() >= 3 && std::all_of(x.begin() + static_cast<std::ptrdiff_t>(from), x.end(), [](double a) { return a > 1e-10; })) {
    v.verdict = Verdict::holds;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

inline const std::string kNoCompactResolvent = "no compact resolvent";
inline const std::string kCompactInverse = "compact inverse";

struct CriteriaOptions {
  std::vector<double> radii = {1, 2, 4, 8, 16, 32};
  std::size_t directions = 0;  // 0: 16 for n = 1, 64 for n = 2
  int ball_order = 16;
  std::vector<std::complex<double>> doubling_centers = default_doubling_centers();
  std::vector<double> doubling_radii = default_doubling_radii();
  int doubling_rule = 16;
};

struct PartDoubling {
  std::size_t part = 0;
  std::string status;
  double C_est = 0.0;
};

struct Classification {
  std::string pminus = "inconclusive";
  std::string pplus = "inconclusive";
  std::string theorem = "inconclusive — outside implemented theorems";
  std::string reason;
};

struct CriteriaReport {
  std::string weight;
  std::size_t n = 1;
  RadialSeries series_mu;           // min μ_φ
  RadialSeries series_z2mu;         // min |z|²μ_φ
  std::vector<RadialSeries> series_sq;  // q = 1..n
  RadialSeries series_ball;         // min ∫_{B₁(z)} tr M_φ dλ
  std::vector<ConditionVerdict> verdicts;
  bool decoupled = false;
  std::vector<PartDoubling> doubling;
  Classification classification;
  std::optional<std::string> dirac;

  const ConditionVerdict& verdict(const std::string& condition) const {
    for (const auto& v : verdicts)
      if (v.condition == condition) return v;
    throw ConfigError("no verdict for condition '" + condition + "'");
  }
};

// Condition identifiers used in reports.
inline const std::string kLiminfMuPositive = "liminf_mu_positive";
inline const std::string kZ2MuDiverges = "z2_mu_diverges";
inline const std::string kPartialSumDiverges = "partial_sum_diverges";  // suffixed with _q
inline const std::string kMuDiverges = "mu_diverges";
inline const std::string kBallIntegralDiverges = "ball_integral_diverges";

inline std::vector<PartDoubling> part_doubling(const WeightSpec& w, const CriteriaOptions& o) {
  std::vector<PartDoubling> out;
  if (!w.is_decoupled()) return out;
  for (std::size_t j = 0; j < w.decoupled_parts().size(); ++j) {
    const WeightSpec& part = w.decoupled_parts()[j];
    const DoublingReport rep =
        doubling_report(laplacian_density(part), o.doubling_centers, o.doubling_radii, o.doubling_rule);
    out.push_back({j, rep.status(), rep.C_est});
  }
  return out;
}

/// Decision tree over the computed verdicts:
/// 1. μ_φ → ∞ holds: P− has no compact resolvent, P+ has a compact inverse.
/// 2. φ decoupled and every Δφ_j dλ sample-consistent with doubling: P− has
///    no compact resolvent; P+ follows the ball-integral divergence verdict.
/// 3. Otherwise inconclusive.
inline Classification classify(const CriteriaReport& r) {
  Classification c;
  const ConditionVerdict& mu = r.verdict(kMuDiverges);
  if (mu.verdict == Verdict::holds) {
    c.theorem = "Theorem 2.1";
    c.pminus = kNoCompactResolvent;
    c.pplus = kCompactInverse;
    c.reason = "lowest Levi eigenvalue diverges along every sampled ray";
    return c;
  }
  const bool doubling = r.decoupled && !r.doubling.empty() &&
                        std::all_of(r.doubling.begin(), r.doubling.end(),
                                    [](const PartDoubling& d) { return d.status == "consistent with doubling"; });
  if (doubling) {
    c.theorem = "Theorem 2.2";
    c.pminus = kNoCompactResolvent;
    const Verdict ball = r.verdict(kBallIntegralDiverges).verdict;
    c.pplus = ball == Verdict::holds ? kCompactInverse : ball == Verdict::fails ? kNoCompactResolvent : "inconclusive";
    c.reason = "decoupled weight, every Δφ_j dλ sample-consistent with doubling (doubling: sample-consistent)";
    return c;
  }
  c.reason = r.decoupled ? "decoupled, but some Δφ_j dλ is not sample-consistent with doubling"
                         : "μ_φ does not diverge and the weight is not decoupled";
  return c;
}

/// n = 1 only. 𝒟² = diag(P−, P+), so a non-compact P− resolvent rules out a
/// compact resolvent for 𝒟, provided Δφ dλ is a nontrivial doubling measure.
inline std::string dirac_verdict(const WeightSpec& w, const CriteriaReport& r, const CriteriaOptions& o = {}) {
  if (w.dimension() != 1) throw DimensionError("dirac_verdict needs n = 1");
  const DoublingReport rep =
      doubling_report(laplacian_density(w), o.doubling_centers, o.doubling_radii, o.doubling_rule);
  if (rep.status() != "consistent with doubling") return "inconclusive";
  return r.classification.pminus == kNoCompactResolvent ? "𝒟 has no compact resolvent" : "inconclusive";
}

/// Computes every series, the verdicts and the classification.
inline CriteriaReport criteria_report(const WeightSpec& w, const CriteriaOptions& o = {}) {
  CriteriaReport r;
  r.weight = w.label();
  r.n = w.dimension();
  r.decoupled = w.is_decoupled();
  const std::size_t dirs = o.directions != 0 ? o.directions : (r.n == 1 ? 16 : 64);
  r.series_mu = radial_series(w, {Quantity::mu, 1}, o.radii, dirs);
  r.series_z2mu = radial_series(w, {Quantity::z2mu, 1}, o.radii, dirs);
  for (std::size_t q = 1; q <= r.n; ++q) r.series_sq.push_back(radial_series(w, {Quantity::sq, q}, o.radii, dirs));
  r.series_ball = radial_series(w, {Quantity::ball_integral, 1}, o.radii, dirs, o.ball_order);

  r.verdicts.push_back(positivity_verdict(kLiminfMuPositive, r.series_mu));
  r.verdicts.push_back(divergence_verdict(kZ2MuDiverges, r.series_z2mu));
  for (std::size_t q = 1; q <= r.n; ++q)
    r.verdicts.push_back(divergence_verdict(kPartialSumDiverges + "_" + std::to_string(q), r.series_sq[q - 1]));
  r.verdicts.push_back(divergence_verdict(kMuDiverges, r.series_mu));
  r.verdicts.push_back(divergence_verdict(kBallIntegralDiverges, r.series_ball));

  r.doubling = part_doubling(w, o);
  r.classification = classify(r);
  if (r.n == 1) r.dirac = dirac_verdict(w, r, o);
  return r;
}

}  // namespace pauli
