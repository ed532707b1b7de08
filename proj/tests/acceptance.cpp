// Acceptance criteria 1-10. Usage: acceptance [id ...] (default: all).
// Prints one line per criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pauli/checks.hpp"
#include "pauli/cli.hpp"

namespace {

using pauli::CheckResult;

constexpr double kIdentitySeconds = 30.0;
constexpr double kLandauSeconds = 300.0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CheckResult timed_identity(int id, pauli::IdentityKind kind) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult c = pauli::check_identity(id, kind);
  const double s = seconds_since(t0);
  if (id == 1) {
    c.pass = c.pass && s < kIdentitySeconds;
    c.summary += ", runtime " + pauli::detail::fmt(s) + " s (limit 30)";
  }
  return c;
}

CheckResult timed_landau() {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult c = pauli::check_landau_levels();
  const double s = seconds_since(t0);
  c.pass = c.pass && s < kLandauSeconds;
  c.summary += ", runtime " + pauli::detail::fmt(s) + " s (limit 300)";
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Two `landau` runs with the default configuration must write identical bytes.
CheckResult determinism() {
  const auto base = std::filesystem::temp_directory_path() / "pauli_acceptance_determinism";
  std::filesystem::remove_all(base);
  std::vector<std::string> reports;
  std::ostringstream sink;
  // Same output directory both times, so the resolved config is comparable too.
  for (int run = 0; run < 2; ++run) {
    pauli::cli::Invocation inv;
    inv.command = "landau";
    inv.out = base.string();
    pauli::cli::run(inv, sink, sink);
    reports.push_back(slurp(base / "landau.json") + slurp(base / "config.resolved.toml"));
    std::filesystem::remove(base / "landau.json");
  }
  CheckResult c;
  c.id = 9;
  c.name = "determinism";
  c.pass = !reports[0].empty() && reports[0] == reports[1];
  c.summary = c.pass ? "landau reports byte-identical (" + std::to_string(reports[0].size()) + " bytes)"
                     : "landau reports differ";
  std::filesystem::remove_all(base);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<CheckResult()>> criteria = {
      [] { return timed_identity(1, pauli::IdentityKind::conjugation_00); },
      [] { return timed_identity(2, pauli::IdentityKind::conjugation_0n); },
      [] { return timed_identity(3, pauli::IdentityKind::dirac_square); },
      [] { return timed_landau(); },
      [] { return pauli::check_zero_modes(); },
      [] { return pauli::check_sum_weight(); },
      [] { return pauli::check_compact_inverse(); },
      [] { return pauli::check_doubling(); },
      [] { return determinism(); },
      [] { return pauli::check_hermitian_psd(); },
  };
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) ids.push_back(i);

  int failures = 0;
  for (int id : ids) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::printf("criterion %d: unknown\n", id);
      ++failures;
      continue;
    }
    CheckResult c;
    try {
      c = criteria[static_cast<std::size_t>(id - 1)]();
    } catch (const std::exception& e) {
      c.id = id;
      c.pass = false;
      c.summary = std::string("error: ") + e.what();
    }
    std::printf("criterion %d: %s  %s: %s\n", id, c.pass ? "PASS" : "FAIL", c.name.c_str(), c.summary.c_str());
    std::fflush(stdout);
    failures += c.pass ? 0 : 1;
  }
  return failures;
}
