#pragma once

// Subcommand drivers for the command-line tool. Each command reads a resolved
// RunConfig, writes its reports under output_dir and returns an exit code:
// 0 success, 1 failed checks (landau), 2 configuration error, 3 numerical
// failure or unconverged results.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pauli/checks.hpp"
#include "pauli/config.hpp"
#include "pauli/criteria.hpp"
#include "pauli/discretize.hpp"
#include "pauli/eigensolve.hpp"
#include "pauli/measure.hpp"
#include "pauli/parallel.hpp"
#include "pauli/report.hpp"
#include "pauli/sparse.hpp"
#include "pauli/weight.hpp"

namespace pauli::cli {

enum ExitCode : int { kSuccess = 0, kChecksFailed = 1, kConfigFailure = 2, kNumericalFailure = 3 };

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"spectrum", "identity", "doubling", "criteria", "proxy", "landau"};
  return names;
}

struct Invocation {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::string> weight;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::string> dump_operator;
  std::vector<std::string> overrides;  // key=value
};

/// defaults < config file < --set overrides < dedicated flags.
inline RunConfig resolve(const Invocation& inv) {
  RunConfig cfg;
  if (inv.config_path) cfg.merge_file(*inv.config_path);
  for (const std::string& kv : inv.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + kv + "' is not key=value");
    cfg.set_text(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (inv.weight) cfg.set("weight", *inv.weight);
  if (inv.out) cfg.set("output_dir", *inv.out);
  if (inv.threads) cfg.set("threads", static_cast<double>(*inv.threads));
  return cfg;
}

namespace detail {

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& name) {
  return std::filesystem::path(cfg.text("output_dir")) / name;
}

inline WeightSpec weight_of(const RunConfig& cfg) {
  return parse_weight(cfg.text("weight"), cfg.count("n"));
}

inline Grid grid_of(const RunConfig& cfg, const WeightSpec& w) {
  return build_grid(w.dimension(), cfg.number("L"), cfg.number("h"), cfg.count("grid_cap"));
}

inline Json grid_json(const Grid& g) {
  return {{"n", g.n}, {"L", g.L}, {"h", g.h}, {"points_per_axis", g.N}, {"unknowns", g.unknowns()}};
}

/// Levi-matrix positivity on the radial sample set and the interior grid nodes.
inline PshCertificate certify(const WeightSpec& w, const RunConfig& cfg, const Grid* grid) {
  std::vector<Point> samples;
  const std::size_t dirs = cfg.count("criteria.directions") != 0 ? cfg.count("criteria.directions")
                                                                   : (w.dimension() == 1 ? 16 : 64);
  const std::vector<Point> unit = sphere_directions(w.dimension(), dirs);
  for (double R : cfg.list("criteria.radii"))
    for (const Point& d : unit) {
      Point p = d;
      for (double& x : p) x *= R;
      samples.push_back(std::move(p));
    }
  if (grid != nullptr)
    for (std::size_t node = 0; node < grid->unknowns(); ++node) samples.push_back(grid->point(node));
  return certify_plurisubharmonic(w, samples);
}

inline SolverOptions solver_of(const RunConfig& cfg) {
  SolverOptions so;
  so.shift_invert = cfg.flag("spectrum.shift_invert");
  so.max_iterations = static_cast<int>(cfg.count("spectrum.max_iterations"));
  so.kernel_tol = cfg.number("spectrum.kernel_tol");
  return so;
}

inline CriteriaOptions criteria_options(const RunConfig& cfg) {
  CriteriaOptions o;
  o.radii = cfg.list("criteria.radii");
  o.directions = cfg.count("criteria.directions");
  o.ball_order = static_cast<int>(cfg.count("criteria.ball_order"));
  o.doubling_centers = default_doubling_centers(static_cast<int>(cfg.count("doubling.centers_per_axis")),
                                                cfg.number("doubling.extent"));
  o.doubling_radii = cfg.list("doubling.radii");
  o.doubling_rule = static_cast<int>(cfg.count("doubling.rule"));
  return o;
}

}  // namespace detail

inline int run_spectrum(const RunConfig& cfg, const Invocation& inv, std::ostream& log) {
  const WeightSpec w = detail::weight_of(cfg);
  const Grid g = detail::grid_of(cfg, w);
  const Scheme scheme = parse_scheme(cfg.text("scheme"));
  const std::string which = cfg.text("spectrum.operator");
  SparseHermitianOperator op;
  GridLayout layout{&g, 1};
  if (which == "pauli+") {
    op = pauli_operator(w, g, Sign::plus, scheme);
  } else if (which == "pauli-") {
    op = pauli_operator(w, g, Sign::minus, scheme);
  } else if (which == "dirac") {
    op = dirac_squared(w, g);
    layout.blocks = 2;
  } else if (which == "box00") {
    op = box00(w, g, scheme);
  } else if (which == "box0n") {
    op = box0n(w, g, scheme);
  } else {
    throw ConfigError("unknown operator '" + which + "' (pauli+, pauli-, dirac, box00, box0n)");
  }
  const PshCertificate cert = detail::certify(w, cfg, &g);
  if (inv.dump_operator) write_matrix_market(*inv.dump_operator, op);
  const SpectrumResult r =
      smallest_eigs(op, cfg.count("spectrum.k"), cfg.number("spectrum.tol"), detail::solver_of(cfg), layout);

  std::ofstream csv(detail::output_path(cfg, "spectrum.csv"), std::ios::binary);
  if (!csv) throw ConfigError("cannot write spectrum.csv");
  write_spectrum_csv(csv, r);
  Json j;
  j["weight"] = w.label();
  j["operator"] = which;
  j["spectrum_of"] = which == "dirac" ? "dirac squared" : which;
  j["scheme"] = to_string(scheme);
  j["grid"] = detail::grid_json(g);
  j["dim"] = op.dim();
  j["norm1"] = op.norm1();
  j["plurisubharmonic"] = to_json(cert);
  j["result"] = to_json(r);
  write_json(detail::output_path(cfg, "spectrum.json").string(), j);
  log << "spectrum: " << r.eigenvalues.size() << " eigenvalues of " << which << " (" << r.method << ")"
      << (r.converged ? "" : ", NOT converged") << "\n";
  return r.converged ? kSuccess : kNumericalFailure;
}

inline int run_identity(const RunConfig& cfg, std::ostream& log) {
  const WeightSpec w = detail::weight_of(cfg);
  const Scheme scheme = parse_scheme(cfg.text("scheme"));
  const std::string which = cfg.text("identity.which");
  std::vector<IdentityKind> kinds;
  if (which == "all") {
    kinds = {IdentityKind::conjugation_00, IdentityKind::conjugation_0n};
    if (w.dimension() == 1) kinds.push_back(IdentityKind::dirac_square);
  } else {
    kinds = {parse_identity(which)};
  }
  Json reports = Json::array();
  for (IdentityKind k : kinds) {
    const IdentityResidualReport rep =
        identity_residual(w, cfg.number("identity.L"), cfg.number("identity.h"), k,
                          static_cast<int>(cfg.count("identity.levels")), scheme, cfg.count("grid_cap"));
    log << "identity " << rep.which << ": observed order " << pauli::detail::fmt(rep.observed_order) << "\n";
    reports.push_back(to_json(rep));
  }
  Json j;
  j["weight"] = w.label();
  j["scheme"] = to_string(scheme);
  j["reports"] = std::move(reports);
  write_json(detail::output_path(cfg, "identity.json").string(), j);
  return kSuccess;
}

inline int run_doubling(const RunConfig& cfg, std::ostream& log) {
  const WeightSpec w = detail::weight_of(cfg);
  const auto centers = default_doubling_centers(static_cast<int>(cfg.count("doubling.centers_per_axis")),
                                                cfg.number("doubling.extent"));
  const auto radii = cfg.list("doubling.radii");
  const int rule = static_cast<int>(cfg.count("doubling.rule"));
  Json j;
  j["weight"] = w.label();
  j["density"] = "laplacian of the weight";
  if (w.dimension() == 1) {
    const DoublingReport rep = doubling_report(laplacian_density(w), centers, radii, rule);
    log << "doubling: " << rep.status() << ", C_est " << pauli::detail::fmt(rep.C_est) << "\n";
    j["report"] = to_json(rep);
  } else if (w.is_decoupled()) {
    Json parts = Json::array();
    for (const WeightSpec& part : w.decoupled_parts()) {
      const DoublingReport rep = doubling_report(laplacian_density(part), centers, radii, rule);
      log << "doubling " << part.label() << ": " << rep.status() << ", C_est " << pauli::detail::fmt(rep.C_est) << "\n";
      parts.push_back({{"part", part.label()}, {"report", to_json(rep)}});
    }
    j["parts"] = std::move(parts);
  } else {
    throw DimensionError("doubling needs n = 1 or a decoupled weight");
  }
  write_json(detail::output_path(cfg, "doubling.json").string(), j);
  return kSuccess;
}

inline int run_criteria(const RunConfig& cfg, std::ostream& log) {
  const WeightSpec w = detail::weight_of(cfg);
  const PshCertificate cert = detail::certify(w, cfg, nullptr);
  const CriteriaReport r = criteria_report(w, detail::criteria_options(cfg));
  Json j = to_json(r);
  j["plurisubharmonic"] = to_json(cert);
  write_json(detail::output_path(cfg, "criteria.json").string(), j);
  log << "criteria: " << r.classification.theorem << "; P-: " << r.classification.pminus
      << "; P+: " << r.classification.pplus << "\n";
  return kSuccess;
}

inline int run_proxy(const RunConfig& cfg, std::ostream& log) {
  const WeightSpec w = detail::weight_of(cfg);
  const PshCertificate cert = detail::certify(w, cfg, nullptr);
  ProxyOptions o;
  o.eps = cfg.number("proxy.eps");
  o.Lambda = cfg.number("proxy.Lambda");
  o.tol = cfg.number("proxy.tol");
  o.scheme = parse_scheme(cfg.text("scheme"));
  o.solver = detail::solver_of(cfg);
  o.cap = cfg.count("grid_cap");
  const CompactnessProxy c = compactness_proxy(w, cfg.list("proxy.L_values"), cfg.number("proxy.h"),
                                               cfg.count("proxy.k"), o);
  Json j = to_json(c);
  j["plurisubharmonic"] = to_json(cert);
  write_json(detail::output_path(cfg, "proxy.json").string(), j);
  std::ofstream csv(detail::output_path(cfg, "proxy.csv"), std::ios::binary);
  if (!csv) throw ConfigError("cannot write proxy.csv");
  write_proxy_csv(csv, c);
  log << "proxy: P- " << c.verdict_pminus << "; P+ " << c.verdict_pplus << "\n";
  bool converged = true;
  for (bool b : c.converged) converged = converged && b;
  return converged ? kSuccess : kNumericalFailure;
}

inline LandauSuiteOptions landau_options(const RunConfig& cfg) {
  LandauSuiteOptions o;
  o.identity.L = cfg.number("landau.identity_L");
  o.identity.h = cfg.number("landau.identity_h");
  o.identity.levels = static_cast<int>(cfg.count("landau.identity_levels"));
  o.levels.L = cfg.number("landau.L");
  o.levels.h = cfg.number("landau.h");
  o.levels.k = cfg.count("landau.k");
  o.levels.tol = cfg.number("landau.tol");
  o.zero_modes.L_values = cfg.list("landau.zero_mode_L");
  o.zero_modes.h = cfg.number("landau.zero_mode_h");
  o.zero_modes.eps = cfg.number("landau.eps");
  o.zero_modes.dense_oracle = cfg.flag("landau.dense_oracle");
  o.zero_modes.oracle_L = cfg.number("landau.oracle_L");
  return o;
}

inline int run_landau(const RunConfig& cfg, std::ostream& log) {
  const std::vector<CheckResult> results = landau_suite(landau_options(cfg));
  Json checks = Json::array();
  std::size_t passed = 0;
  for (const CheckResult& c : results) {
    checks.push_back(to_json(c));
    passed += c.pass ? 1 : 0;
    log << (c.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << c.summary << "\n";
  }
  Json j;
  j["weight"] = "|z1|^2";
  j["passed"] = passed;
  j["total"] = results.size();
  j["checks"] = std::move(checks);
  write_json(detail::output_path(cfg, "landau.json").string(), j);
  log << "landau: " << passed << "/" << results.size() << " checks passed\n";
  return passed == results.size() ? kSuccess : kChecksFailed;
}

/// Resolves the configuration, echoes it to output_dir/config.resolved.toml
/// and runs the subcommand. Errors are reported on `err`.
inline int run(const Invocation& inv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    const RunConfig cfg = resolve(inv);
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), inv.command) == names.end()) {
      throw ConfigError("unknown subcommand '" + inv.command + "'");
    }
    const double threads = cfg.number("threads");
    if (!(threads >= 1.0)) throw ConfigError("threads must be ≥ 1");
    set_max_threads(static_cast<unsigned>(threads));
    std::filesystem::create_directories(cfg.text("output_dir"));
    {
      std::ofstream echo(detail::output_path(cfg, "config.resolved.toml"), std::ios::binary);
      if (!echo) throw ConfigError("cannot write to output directory '" + cfg.text("output_dir") + "'");
      echo << cfg.to_toml();
    }
    if (inv.command == "spectrum") return run_spectrum(cfg, inv, log);
    if (inv.command == "identity") return run_identity(cfg, log);
    if (inv.command == "doubling") return run_doubling(cfg, log);
    if (inv.command == "criteria") return run_criteria(cfg, log);
    if (inv.command == "proxy") return run_proxy(cfg, log);
    return run_landau(cfg, log);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigFailure;
  }
}

}  // namespace pauli::cli
