#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semilin/conditions.hpp"
#include "semilin/field.hpp"
#include "semilin/operators.hpp"
#include "semilin/sandwich.hpp"

namespace semilin {

/// Pointwise clamp max(v0, min(u, v1)). Throws PreconditionError if v0 > v1.
Field truncate_sigma(const Field& v0, const Field& v1, const Field& u);

/// -Laplace u + mu u = t b_sigma(x, u, grad u) chi, on the full node set.
struct TruncatedProblem {
  const Discretization* disc = nullptr;
  const SemilinearitySpec* spec = nullptr;  // expressions already bound
  std::vector<char> chi;                    // indicator of the level inside the nodes
  double mu = 0.0;
  Field v0;
  Field v1;
};

struct TruncatedOptions {
  int max_picard = 400;
  int max_newton = 60;
  double cg_tol = 1e-13;
  double min_omega = 1.0 / 64.0;
};

struct TruncatedTrace {
  std::string path = "picard";  // "picard" or "newton"
  int iterations = 0;
  std::vector<double> update_norms;
  std::vector<double> residuals;
  double omega = 1.0;
  double final_update = 0.0;
  double final_residual = 0.0;
  double residual_scale = 1.0;
  /// Largest distance of the converged raw iterate outside [v0, v1].
  double clamp_distance = 0.0;
};

struct TruncatedSolution {
  Field u;
  TruncatedTrace trace;
};

/// Damped defect-correction Picard iteration with a Newton-Krylov fallback.
/// The returned u is projected onto [v0, v1]; the raw distance is in the trace.
TruncatedSolution solve_truncated(const TruncatedProblem& p, double t, const Field& start,
                                  double tol, const TruncatedOptions& options = {});

/// h^d-weighted l2 norm of K u - f(x, u, grad u).
double residual_norm(const Discretization& disc, const Field& u, const SemilinearitySpec& spec);

double h1_norm(const Discretization& disc, std::span<const double> u);
double l2_norm(const GridDomain& dom, std::span<const double> u);

/// Nodal values of an expression in x.
Field sample_field(DomainPtr dom, const Expr& e);

struct LevelRecord {
  int k = 0;
  std::size_t nodes = 0;
  int iterations = 0;
  std::string path;
  double update_h1 = 0.0;   // ||u_k - u_{k-1}||_H1
  double residual = 0.0;    // truncated-equation residual
  double clamp_distance = 0.0;
  double domination_margin = 0.0;
  double h1_norm = 0.0;
};

struct SemilinearOptions {
  double t = 1.0;
  int max_levels = 64;
  double base_scale = 0.0;  // 0 selects max half-extent / 4
  std::optional<double> lambda1;
  bool check_conditions = true;
  FalsifyOptions falsify;
  const Field* start = nullptr;
  TruncatedOptions inner;
  double eig_tol = 1e-12;
};

struct SolveReport {
  Field u;
  Field vlow;
  Field vup;
  Field hdata;
  double lambda1 = 0.0;
  double lmax = 0.0;
  double mu = 0.0;
  double epsilon = 0.0;
  double L = 0.0;
  H1Constant constants{};
  SandwichResult lower;
  SandwichResult upper;
  std::vector<LevelRecord> levels;
  std::string stop_reason;
  double h1 = 0.0;
  double h_l2 = 0.0;
  double domination_margin = 0.0;  // min over levels, raw iterates
  double residual = 0.0;
  double residual_scale = 1.0;
  double f0_margin = 0.0;          // min over nodes of f0 + L0|grad u| - |f|
};

/// Exhaustion pipeline: lambda1, sandwich, levels Omega_k with warm starts.
SolveReport solve_semilinear(const Discretization& disc, const SemilinearitySpec& spec,
                             double tol, const SemilinearOptions& options = {});

struct UniquenessReport {
  int trials = 0;
  double max_distance = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::vector<Field> solutions;
};

/// Repeated solves with random starts and random exhaustion scales.
/// Throws PreconditionError carrying the witness when monotonicity fails.
UniquenessReport uniqueness_probe(const Discretization& disc, const SemilinearitySpec& spec,
                                  int trials, double tol, std::uint64_t seed,
                                  const SemilinearOptions& options = {});

}  // namespace semilin
