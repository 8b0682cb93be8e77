#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "semilin/analysis.hpp"
#include "semilin/config.hpp"
#include "semilin/conditions.hpp"
#include "semilin/field.hpp"
#include "semilin/operators.hpp"

namespace semilin {

enum ExitCode : int {
  kExitPass = 0,
  kExitConfig = 1,
  kExitCheckFailed = 2,
  kExitWitness = 3,
  kExitNonConvergence = 4,
};

struct RunOverrides {
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<Mode> mode;
};

struct RunResult {
  int exit_code = kExitPass;
  std::string report;  // full report.txt contents
  Certificate certificate;
  std::string error;   // "[module/stage] message" on failure
};

/// Applies overrides, runs the pipeline of the configured mode and writes
/// report.txt, fields and traces into the output directory.
RunResult run_config(const RunConfig& config, const RunOverrides& overrides = {});
/// Loads the file first; a load failure yields exit code 1.
RunResult run_config(const std::string& path, const RunOverrides& overrides = {});

struct ProblemData {
  SemilinearitySpec spec;  // expressions still reference lambda1, eps, Lmax
  double t = 1.0;
};

/// Parses the problem expressions and evaluates the scalars; epsilon may use
/// lambda1, the other scalars lambda1, eps and Lmax. ConfigError on failure.
ProblemData make_problem(const ProblemConfig& pc, int dim, double lambda1);

/// Builds the grid domain and the Dirichlet or Robin discretization.
Discretization make_discretization(const RunConfig& config);

enum class FieldFormat { Efld, Csv };

/// IoError with the path on failure.
void write_field(const Field& u, const std::string& path, FieldFormat format);

/// Report header line; bumped when the report layout changes.
inline constexpr const char* kReportHeader = "semilin-report v1";

}  // namespace semilin
