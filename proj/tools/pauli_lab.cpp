// pauli_lab: config-driven front end for the Pauli/Dirac operator library.
//
//   pauli_lab <subcommand> [--config FILE] [--weight EXPR] [--out DIR]
//             [--threads K] [--dump-operator PATH] [--set key=value]...

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pauli/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral experiments for weighted Pauli and Dirac operators"};
  app.require_subcommand(1, 1);
  pauli::cli::Invocation inv;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option_function<std::string>("--config", [&](const std::string& v) { inv.config_path = v; },
                                          "TOML configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option_function<std::string>("--weight", [&](const std::string& v) { inv.weight = v; },
                                          "weight expression, e.g. \"|z1|^2+|z2|^2\"");
    sub->add_option_function<std::string>("--out", [&](const std::string& v) { inv.out = v; }, "output directory");
    sub->add_option_function<unsigned>("--threads", [&](const unsigned& v) { inv.threads = v; },
                                       "worker thread cap")
        ->check(CLI::PositiveNumber);
    sub->add_option("--set", inv.overrides, "override a config key (key=value), repeatable")
        ->allow_extra_args(false);
  };

  const std::pair<const char*, const char*> commands[] = {
      {"spectrum", "smallest eigenvalues of a discretized operator (CSV + JSON)"},
      {"identity", "convergence order of the conjugation and Dirac-square identities"},
      {"doubling", "sampled doubling check of the measure Δφ dλ"},
      {"criteria", "radial series, condition verdicts and classification"},
      {"proxy", "eigenvalue-count trends under domain growth"},
      {"landau", "acceptance suite for φ = |z|²"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (std::string(name) == "spectrum") {
      sub->add_option_function<std::string>("--dump-operator", [&](const std::string& v) { inv.dump_operator = v; },
                                            "write the assembled operator as Matrix Market");
    }
    sub->callback([&inv, sub] { inv.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pauli::cli::kConfigFailure;
  }
  return pauli::cli::run(inv);
}
