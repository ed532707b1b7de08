#pragma once

// JSON serialization of the result types. Keys keep insertion order, so
// identical results serialize to identical bytes.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pauli/criteria.hpp"
#include "pauli/discretize.hpp"
#include "pauli/eigensolve.hpp"
#include "pauli/measure.hpp"
#include "pauli/weight.hpp"

namespace pauli {

using Json = nlohmann::ordered_json;

namespace detail {

/// Non-finite numbers become null.
inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline Json point(const Point& p) {
  Json a = Json::array();
  for (double x : p) a.push_back(x);
  return a;
}

}  // namespace detail

inline Json to_json(const SpectrumResult& r) {
  Json j;
  j["method"] = r.method;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["shift"] = detail::number(r.shift);
  j["eigenvalues"] = detail::numbers(r.eigenvalues);
  j["residuals"] = detail::numbers(r.residuals);
  j["near_kernel_count"] = r.near_kernel_count;
  j["boundary_mass"] = detail::numbers(r.boundary_mass);
  return j;
}

inline Json to_json(const IdentityResidualReport& r) {
  Json j;
  j["which"] = r.which;
  j["test_functions"] = r.test_functions;
  j["h_values"] = detail::numbers(r.h_values);
  j["max_interior_error"] = detail::numbers(r.max_interior_error);
  j["orders"] = detail::numbers(r.orders);
  j["observed_order"] = detail::number(r.observed_order);
  j["exact"] = r.exact;
  if (r.which == "dirac-square") j["offdiagonal_max"] = r.offdiagonal_max;
  return j;
}

inline Json to_json(const DoublingReport& r) {
  Json j;
  j["status"] = r.status();
  j["C_est"] = detail::number(r.C_est);
  j["violations_14"] = r.violations_14;
  j["violations_15"] = r.violations_15;
  j["indeterminate"] = r.indeterminate;
  j["min_growth_15"] = detail::number(r.min_growth_15);
  j["growth_threshold"] = detail::number(r.growth_threshold);
  Json samples = Json::array();
  for (const DoublingSample& s : r.samples) {
    Json e;
    e["center"] = Json::array({s.center.real(), s.center.imag()});
    e["radius"] = s.radius;
    e["mass"] = s.mass;
    e["mass_half"] = s.mass_half;
    e["mass_double"] = s.mass_double;
    e["ratio"] = detail::number(s.ratio);
    e["growth"] = detail::number(s.growth);
    e["indeterminate"] = s.indeterminate;
    e["violates_growth"] = s.violates_growth;
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  return j;
}

inline Json to_json(const RadialSeries& s) {
  Json j;
  j["quantity"] = s.quantity;
  j["directions"] = s.directions;
  j["radii"] = detail::numbers(s.radii);
  j["values"] = detail::numbers(s.values);
  Json w = Json::array();
  for (const Point& p : s.witnesses) w.push_back(detail::point(p));
  j["witnesses"] = std::move(w);
  return j;
}

inline Json to_json(const ConditionVerdict& v) {
  Json j;
  j["series"] = v.series;
  j["verdict"] = to_string(v.verdict);
  j["witness"] = v.witness ? detail::point(*v.witness) : Json(nullptr);
  j["rule"] = v.rule;
  return j;
}

inline Json to_json(const CriteriaReport& r) {
  Json j;
  j["weight"] = r.weight;
  j["n"] = r.n;
  j["series_mu"] = to_json(r.series_mu);
  j["series_z2mu"] = to_json(r.series_z2mu);
  Json sq = Json::array();
  for (const RadialSeries& s : r.series_sq) sq.push_back(to_json(s));
  j["series_sq"] = std::move(sq);
  j["series_ball"] = to_json(r.series_ball);
  Json verdicts;
  for (const ConditionVerdict& v : r.verdicts) verdicts[v.condition] = to_json(v);
  j["verdicts"] = std::move(verdicts);
  j["decoupled"] = r.decoupled;
  Json doubling = Json::array();
  for (const PartDoubling& d : r.doubling) {
    doubling.push_back({{"part", d.part}, {"status", d.status}, {"C_est", detail::number(d.C_est)}});
  }
  j["doubling"] = std::move(doubling);
  j["classification"] = {{"pminus", r.classification.pminus},
                         {"pplus", r.classification.pplus},
                         {"theorem", r.classification.theorem},
                         {"reason", r.classification.reason}};
  j["dirac"] = r.dirac ? Json(*r.dirac) : Json(nullptr);
  return j;
}

inline Json to_json(const CompactnessProxy& c) {
  Json j;
  j["weight"] = c.weight;
  j["method"] = c.method;
  j["h"] = c.h;
  j["k"] = c.k;
  j["eps"] = c.eps;
  j["Lambda"] = c.Lambda;
  j["L_values"] = detail::numbers(c.L_values);
  j["pminus_zero_counts"] = c.pminus_zero_counts;
  j["pplus_counts_below"] = c.pplus_counts_below;
  j["pplus_gap"] = detail::numbers(c.pplus_gap);
  j["pplus_eig_growth"] = detail::numbers(c.pplus_eig_growth);
  Json conv = Json::array();
  for (bool b : c.converged) conv.push_back(b);
  j["converged"] = std::move(conv);
  j["verdict_pminus"] = c.verdict_pminus;
  j["verdict_pplus"] = c.verdict_pplus;
  return j;
}

inline Json to_json(const PshCertificate& c) {
  return {{"points_checked", c.points_checked},
          {"min_eigenvalue", detail::number(c.min_eigenvalue)},
          {"scale", detail::number(c.scale)},
          {"scope", c.scope}};
}

/// Two-space indentation and a trailing newline.
inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

/// One row per L: L,pminus_zero_count,pplus_count_below,pplus_gap,pplus_kth,converged.
inline void write_proxy_csv(std::ostream& out, const CompactnessProxy& c) {
  out << "L,pminus_zero_count,pplus_count_below,pplus_gap,pplus_kth,converged\r\n";
  char line[200];
  for (std::size_t i = 0; i < c.L_values.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%zu,%zu,%.17g,%.17g,%s\r\n", c.L_values[i], c.pminus_zero_counts[i],
                  c.pplus_counts_below[i], c.pplus_gap[i], c.pplus_eig_growth[i],
                  c.converged[i] ? "true" : "false");
    out << line;
  }
}

}  // namespace pauli
