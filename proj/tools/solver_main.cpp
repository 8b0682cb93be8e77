#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "semilin/harness.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

CLI::App* add_mode(CLI::App& app, const char* name, const char* help, Flags& flags) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("config", flags.config, "Problem config file")->required();
  sub->add_option("--tol", flags.tol, "Override solver.tol")->check(CLI::PositiveNumber);
  sub->add_option("--out", flags.out, "Override output.dir");
  sub->add_option("--seed", flags.seed, "Override solver.seed");
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete semilinear solver with certificates"};
  app.require_subcommand(1);

  Flags flags;
  auto* run = add_mode(app, "run", "Run the pipeline of the configured mode", flags);
  auto* audit = add_mode(app, "audit", "Falsify the structural conditions only", flags);
  add_mode(app, "counterexample", "Run the blow-up study", flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : semilin::kExitConfig;
  }

  semilin::RunOverrides ov;
  ov.tol = flags.tol;
  ov.out = flags.out;
  ov.seed = flags.seed;
  if (audit->parsed()) {
    ov.mode = semilin::Mode::Audit;
  } else if (!run->parsed()) {
    ov.mode = semilin::Mode::Counterexample;
  }

  const semilin::RunResult result = semilin::run_config(flags.config, ov);
  std::cout << result.report;
  if (!result.error.empty()) std::cerr << result.error << "\n";
  return result.exit_code;
}
