#pragma once

// End-to-end numerical checks on shipped weights. Shared by the `landau`
// subcommand and the acceptance test binary; tolerances are fixed here.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "pauli/criteria.hpp"
#include "pauli/discretize.hpp"
#include "pauli/eigensolve.hpp"
#include "pauli/measure.hpp"
#include "pauli/report.hpp"
#include "pauli/weight.hpp"

namespace pauli {

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  Json evidence;
};

inline Json to_json(const CheckResult& c) {
  Json j;
  j["id"] = c.id;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["summary"] = c.summary;
  j["evidence"] = c.evidence;
  return j;
}

namespace detail {

inline std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline bool within_relative(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

}  // namespace detail

struct IdentityCheckOptions {
  double L = 6.0;
  double h = 0.2;
  int levels = 3;  // h, h/2, h/4
  double order_low = 1.5;
  double order_high = 2.5;
};

/// Conjugation or Dirac-square identity on φ = |z|²: observed order within
/// [1.5, 2.5]; for the Dirac square the off-diagonal blocks must vanish.
inline CheckResult check_identity(int id, IdentityKind which, const IdentityCheckOptions& o = {}) {
  const WeightSpec w = parse_weight("|z1|^2");
  const IdentityResidualReport rep = identity_residual(w, o.L, o.h, which, o.levels);
  CheckResult c;
  c.id = id;
  c.name = "identity " + to_string(which);
  const bool order_ok = rep.observed_order >= o.order_low && rep.observed_order <= o.order_high;
  c.pass = order_ok;
  c.summary = "observed order " + detail::fmt(rep.observed_order);
  if (which == IdentityKind::dirac_square) {
    c.pass = c.pass && rep.offdiagonal_max == 0.0;
    c.summary += ", off-diagonal max " + detail::fmt(rep.offdiagonal_max);
  }
  c.evidence = to_json(rep);
  return c;
}

struct LandauOptions {
  double L = 8.0;
  double h = 0.1;
  std::size_t k = 6;
  double tol = 1e-6;
  double level_tolerance = 0.05;  // relative distance to the nearest of {4, 8}
  double zero_mode_bound = 0.01;
};

/// φ = |z|² (field B = 2): the k smallest P+ eigenvalues lie within 5% of a
/// level in {4, 8} and the smallest P− eigenvalue is ≤ 0.01.
inline CheckResult check_landau_levels(const LandauOptions& o = {}) {
  const WeightSpec w = parse_weight("|z1|^2");
  const Grid g = build_grid(1, o.L, o.h);
  const SparseHermitianOperator plus = pauli_operator(w, g, Sign::plus);
  const SparseHermitianOperator minus = pauli_operator(w, g, Sign::minus);
  const SpectrumResult rp = smallest_eigs(plus, o.k, o.tol, {}, {&g});
  const SpectrumResult rm = smallest_eigs(minus, 1, o.tol, {}, {&g});
  CheckResult c;
  c.id = 4;
  c.name = "landau levels";
  bool levels_ok = rp.converged && rp.eigenvalues.size() == o.k;
  Json nearest = Json::array();
  for (double v : rp.eigenvalues) {
    const double level = std::abs(v - 4.0) <= std::abs(v - 8.0) ? 4.0 : 8.0;
    nearest.push_back(level);
    levels_ok = levels_ok && detail::within_relative(v, level, o.level_tolerance);
  }
  const double lowest_minus = rm.eigenvalues.empty() ? std::numeric_limits<double>::quiet_NaN() : rm.eigenvalues[0];
  const bool zero_ok = rm.converged && lowest_minus <= o.zero_mode_bound;
  c.pass = levels_ok && zero_ok;
  c.summary = "P+ lowest " + detail::fmt(rp.eigenvalues.empty() ? NAN : rp.eigenvalues.front()) + " .. " +
              detail::fmt(rp.eigenvalues.empty() ? NAN : rp.eigenvalues.back()) + ", P- lowest " +
              detail::fmt(lowest_minus);
  c.evidence = {{"L", o.L}, {"h", g.h}, {"pplus", to_json(rp)}, {"nearest_level", nearest},
                {"pminus", to_json(rm)}, {"levels_ok", levels_ok}, {"zero_mode_ok", zero_ok}};
  return c;
}

struct ZeroModeOptions {
  std::vector<double> L_values = {4, 6, 8};
  double h = 0.1;
  double eps = 0.1;
  double band = 0.25;  // relative distance to 4L²/π
  bool dense_oracle = true;
  double oracle_L = 4.0;
};

/// P− near-kernel counts for φ = |z|² grow strictly with L and stay within
/// 25% of the Bergman-space density estimate 4L²/π. The inertia count is
/// confirmed by dense diagonalization at L = oracle_L.
inline CheckResult check_zero_modes(const ZeroModeOptions& o = {}) {
  const WeightSpec w = parse_weight("|z1|^2");
  CheckResult c;
  c.id = 5;
  c.name = "zero-mode growth";
  std::vector<std::size_t> counts;
  Json expected = Json::array(), ratios = Json::array();
  bool increasing = true, band_ok = true;
  for (double L : o.L_values) {
    const Grid g = build_grid(1, L, o.h);
    counts.push_back(count_below(pauli_operator(w, g, Sign::minus), o.eps));
    const double estimate = 4.0 * L * L / std::numbers::pi;
    expected.push_back(estimate);
    ratios.push_back(static_cast<double>(counts.back()) / estimate);
    band_ok = band_ok && detail::within_relative(static_cast<double>(counts.back()), estimate, o.band);
    if (counts.size() > 1) increasing = increasing && counts.back() > counts[counts.size() - 2];
  }
  bool oracle_ok = true;
  Json oracle = nullptr;
  if (o.dense_oracle) {
    const Grid g = build_grid(1, o.oracle_L, o.h);
    const SparseHermitianOperator op = pauli_operator(w, g, Sign::minus);
    const std::size_t dense = dense_eigenvalues_below(op, o.eps).size();
    const std::size_t inertia = count_below(op, o.eps);
    oracle_ok = dense == inertia;
    oracle = {{"L", o.oracle_L}, {"dense_count", dense}, {"inertia_count", inertia}, {"agree", oracle_ok}};
  }
  c.pass = increasing && band_ok && oracle_ok;
  std::string list;
  for (std::size_t i = 0; i < counts.size(); ++i) list += (i ? "/" : "") + std::to_string(counts[i]);
  c.summary = "counts " + list + (increasing ? " increasing" : " not increasing") +
              (band_ok ? ", within" : ", outside") + " 25% of 4L^2/pi" +
              (o.dense_oracle ? (oracle_ok ? ", dense oracle agrees" : ", dense oracle disagrees") : "");
  c.evidence = {{"L_values", o.L_values}, {"h", o.h},          {"eps", o.eps},
                {"counts", counts},       {"estimate", expected}, {"count_over_estimate", ratios},
                {"strictly_increasing", increasing}, {"within_band", band_ok}, {"oracle", oracle}};
  return c;
}

/// φ = |z₁|² + |z₂|²: P+ counts below Λ = 10 rise ≥ 20% per L step and the
/// criteria report cites Theorem 2.2 with a constant unit-ball integral π².
inline CheckResult check_sum_weight(double h = 0.1) {
  const WeightSpec w = parse_weight("|z1|^2+|z2|^2");
  ProxyOptions po;
  po.Lambda = 10.0;
  const CompactnessProxy proxy = compactness_proxy(w, {4, 6, 8}, h, 6, po);
  bool growth_ok = true;
  for (std::size_t i = 0; i + 1 < proxy.pplus_counts_below.size(); ++i) {
    const auto a = static_cast<double>(proxy.pplus_counts_below[i]);
    const auto b = static_cast<double>(proxy.pplus_counts_below[i + 1]);
    growth_ok = growth_ok && b >= 1.2 * a && b > a;
  }
  const CriteriaReport crit = criteria_report(w);
  const double target = std::numbers::pi * std::numbers::pi;
  bool ball_ok = !crit.series_ball.values.empty();
  for (double v : crit.series_ball.values) ball_ok = ball_ok && detail::within_relative(v, target, 1e-8);
  const bool cites = crit.classification.theorem == "Theorem 2.2";
  const bool both = crit.classification.pminus == kNoCompactResolvent &&
                    crit.classification.pplus == kNoCompactResolvent;
  CheckResult c;
  c.id = 6;
  c.name = "non-compactness for |z1|^2+|z2|^2";
  c.pass = growth_ok && ball_ok && cites && both;
  std::string list;
  for (std::size_t i = 0; i < proxy.pplus_counts_below.size(); ++i)
    list += (i ? "/" : "") + std::to_string(proxy.pplus_counts_below[i]);
  c.summary = "P+ counts below 10: " + list + ", cites " + crit.classification.theorem + ", ball integral " +
              (ball_ok ? "constant pi^2" : "not constant pi^2");
  c.evidence = {{"proxy", to_json(proxy)}, {"growth_ok", growth_ok}, {"ball_integral_target", target},
                {"ball_ok", ball_ok}, {"classification", to_json(crit)["classification"]}};
  return c;
}

/// φ = |z|⁴: μ_φ(z) = 4|z|² exactly on the sampled spheres, μ_φ → ∞ holds,
/// and P+ counts below Λ = 20 change by < 5% on the last L step.
inline CheckResult check_compact_inverse(double h = 0.1) {
  const WeightSpec w = parse_weight("|z1|^4");
  const CriteriaReport crit = criteria_report(w);
  bool mu_ok = !crit.series_mu.values.empty();
  for (std::size_t i = 0; i < crit.series_mu.values.size(); ++i) {
    const double R = crit.series_mu.radii[i];
    mu_ok = mu_ok && detail::within_relative(crit.series_mu.values[i], 4.0 * R * R, 1e-12);
  }
  const bool diverges = crit.verdict(kMuDiverges).verdict == Verdict::holds;
  const bool cites = crit.classification.theorem == "Theorem 2.1";
  ProxyOptions po;
  po.Lambda = 20.0;
  const CompactnessProxy proxy = compactness_proxy(w, {3, 4, 5}, h, 6, po);
  const bool stable = stabilizes(proxy.pplus_counts_below);
  CheckResult c;
  c.id = 7;
  c.name = "compact inverse for |z1|^4";
  c.pass = mu_ok && diverges && cites && stable;
  std::string list;
  for (std::size_t i = 0; i < proxy.pplus_counts_below.size(); ++i)
    list += (i ? "/" : "") + std::to_string(proxy.pplus_counts_below[i]);
  c.summary = std::string("mu = 4R^2 ") + (mu_ok ? "exact" : "mismatch") + ", mu divergence " +
              to_string(crit.verdict(kMuDiverges).verdict) + ", P+ counts below 20: " + list;
  c.evidence = {{"series_mu", to_json(crit.series_mu)}, {"mu_ok", mu_ok},
                {"mu_diverges", to_json(crit.verdict(kMuDiverges))}, {"classification", to_json(crit)["classification"]},
                {"proxy", to_json(proxy)}, {"stabilizes", stable}};
  return c;
}

/// Lebesgue measure has every ratio equal to 4; |w|² dλ has ratio 16 at the
/// origin; the growth inequality with C_est holds on every sample of both.
inline CheckResult check_doubling() {
  const auto centers = default_doubling_centers();
  const auto radii = default_doubling_radii();
  const DoublingReport lebesgue = doubling_report([](std::complex<double>) { return 1.0; }, centers, radii);
  const DoublingReport weighted = doubling_report([](std::complex<double> z) { return std::norm(z); }, centers, radii);
  bool lebesgue_ok = lebesgue.violations_15 == 0 && lebesgue.violations_14 == 0;
  for (const DoublingSample& s : lebesgue.samples) lebesgue_ok = lebesgue_ok && std::abs(s.ratio - 4.0) <= 1e-10;
  bool origin_ok = weighted.violations_15 == 0 && weighted.violations_14 == 0;
  std::size_t origin_samples = 0;
  for (const DoublingSample& s : weighted.samples) {
    if (s.center != std::complex<double>(0.0, 0.0)) continue;
    ++origin_samples;
    origin_ok = origin_ok && std::abs(s.ratio - 16.0) <= 1e-8 * 16.0;
  }
  origin_ok = origin_ok && origin_samples > 0;
  CheckResult c;
  c.id = 8;
  c.name = "doubling measures";
  c.pass = lebesgue_ok && origin_ok;
  c.summary = "Lebesgue C_est " + detail::fmt(lebesgue.C_est) + ", |w|^2 C_est " + detail::fmt(weighted.C_est) +
              ", growth violations " + std::to_string(lebesgue.violations_15 + weighted.violations_15);
  c.evidence = {{"lebesgue", {{"C_est", lebesgue.C_est}, {"violations_15", lebesgue.violations_15},
                              {"min_growth_15", lebesgue.min_growth_15}, {"ok", lebesgue_ok}}},
                {"modulus_squared", {{"C_est", weighted.C_est}, {"violations_15", weighted.violations_15},
                                     {"min_growth_15", weighted.min_growth_15}, {"origin_ok", origin_ok}}}};
  return c;
}

/// Weights shipped in configs/.
inline std::vector<std::string> shipped_weights() {
  return {"|z1|^2", "|z1|^4", "x1^2", "|z1|^2+|z2|^2", "|z1|^4+|z2|^2"};
}

/// Every assembled operator is exactly self-adjoint, and P+ has no
/// eigenvalue below −1e-8·‖P+‖₁ on any shipped weight (inertia count 0).
inline CheckResult check_hermitian_psd() {
  CheckResult c;
  c.id = 10;
  c.name = "hermiticity and P+ lower bound";
  c.pass = true;
  Json rows = Json::array();
  for (const std::string& text : shipped_weights()) {
    const WeightSpec w = parse_weight(text);
    const Grid g = w.dimension() == 1 ? build_grid(1, 4.0, 0.1) : build_grid(2, 2.0, 0.4);
    std::vector<std::pair<std::string, SparseHermitianOperator>> ops;
    ops.emplace_back("pauli-", pauli_operator(w, g, Sign::minus));
    ops.emplace_back("pauli+", pauli_operator(w, g, Sign::plus));
    ops.emplace_back("pauli- (fd)", pauli_operator(w, g, Sign::minus, Scheme::finite_difference));
    ops.emplace_back("pauli+ (fd)", pauli_operator(w, g, Sign::plus, Scheme::finite_difference));
    ops.emplace_back("box00", box00(w, g));
    ops.emplace_back("box0n", box0n(w, g));
    if (w.dimension() == 1) {
      ops.emplace_back("dirac", dirac(w, g));
      ops.emplace_back("dirac^2", dirac_squared(w, g));
    }
    Json defects;
    bool exact = true;
    for (const auto& [name, op] : ops) {
      const double d = hermitian_defect(op.matrix());
      defects[name] = d;
      exact = exact && d == 0.0 && op.hermitian_certified();
    }
    const SparseHermitianOperator& plus = ops[1].second;
    const double bound = -1e-8 * plus.norm1();
    const std::size_t below = count_below(plus, bound);
    const bool psd = below == 0;
    c.pass = c.pass && exact && psd;
    rows.push_back({{"weight", text}, {"n", w.dimension()}, {"dim", plus.dim()}, {"hermitian_defects", defects},
                    {"exact", exact}, {"bound", bound}, {"count_below_bound", below}, {"psd_ok", psd}});
  }
  c.summary = c.pass ? "all operators exactly Hermitian, P+ bounded below on every shipped weight"
                     : "Hermiticity or P+ lower bound violated";
  c.evidence = {{"weights", rows}};
  return c;
}

struct LandauSuiteOptions {
  IdentityCheckOptions identity;
  LandauOptions levels;
  ZeroModeOptions zero_modes;
};

/// The φ = |z|² suite: identities, Dirac square, Landau levels, zero modes.
inline std::vector<CheckResult> landau_suite(const LandauSuiteOptions& o = {}) {
  std::vector<CheckResult> out;
  out.push_back(check_identity(1, IdentityKind::conjugation_00, o.identity));
  out.push_back(check_identity(2, IdentityKind::conjugation_0n, o.identity));
  out.push_back(check_identity(3, IdentityKind::dirac_square, o.identity));
  out.push_back(check_landau_levels(o.levels));
  out.push_back(check_zero_modes(o.zero_modes));
  return out;
}

}  // namespace pauli
