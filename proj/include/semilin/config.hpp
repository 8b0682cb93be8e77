#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "semilin/domain.hpp"
#include "semilin/operators.hpp"

namespace semilin {

enum class Mode { Solve, Audit, Counterexample };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct DomainConfig {
  DomainSpec spec;
  Box box;
  double h = 0.0;
};

/// Expressions are kept as text: f, h, h0, gamma may use x, s, xi, gnorm plus
/// lambda1, eps, Lmax, pi. The scalars below may use lambda1, eps, Lmax, pi
/// (epsilon itself may only use lambda1 and pi).
struct ProblemConfig {
  std::string f;
  std::string h = "0";
  std::string h0;     // defaults to h
  std::string gamma;  // defaults to 0
  std::string epsilon = "1";
  std::string L = "0";
  std::string L0;     // defaults to L
  std::string q = "2";
  std::string d_hat = "0";
  std::string t = "1";
};

struct BoundaryConfig {
  BoundaryKind kind = BoundaryKind::Dirichlet;
  std::string beta = "1";
};

struct SolverConfig {
  double tol = 1e-8;
  std::uint64_t seed = 12345;
  int max_levels = 64;
  double base_scale = 0.0;
  int falsify_budget = 2000;
  double gamma_cap = 1e6;
  bool force_gamma0 = false;
  int uniqueness_trials = 0;
  double eig_tol = 1e-12;
};

struct CounterexampleConfig {
  std::string case_tag = "iii";
  std::string lambda1 = "strip";  // "strip" or a scalar expression
  std::string epsilon = "3*lambda1";
  std::string r = "Lmax";
  std::vector<double> widths{10.0, 20.0, 40.0, 80.0};
  double h = 0.0;  // 0 selects strip_width / 16
  double strip_width = 3.14159265358979323846;
  double control_factor = 0.5;
};

struct OutputConfig {
  std::string dir = "out";
  bool fields = true;
};

struct RunConfig {
  Mode mode = Mode::Solve;
  DomainConfig domain;
  ProblemConfig problem;
  BoundaryConfig boundary;
  SolverConfig solver;
  CounterexampleConfig counterexample;
  OutputConfig output;
  std::string text;  // source text, hashed into the certificate

  int dim() const { return domain.box.dim; }
};

/// YAML document with top-level keys mode, domain, problem, boundary,
/// solver, counterexample, output. Unknown keys are rejected. Throws
/// ConfigError with the offending key.
RunConfig parse_config(std::string_view text);
/// Reads and parses a file; IoError when unreadable.
RunConfig load_config(const std::string& path);

/// Evaluates a scalar expression in lambda1, eps, Lmax and pi.
double eval_scalar(const std::string& text, double lambda1, double eps, double Lmax);

}  // namespace semilin
