#pragma once

#include <vector>

#include "semilin/field.hpp"
#include "semilin/operators.hpp"

namespace semilin {

enum class Side { Lower, Upper };

struct SandwichResult {
  Field v;
  int iterations = 0;
  std::vector<double> update_norms;        // weighted norm of v_{n+1} - v_n
  std::vector<double> contraction_ratios;  // update_norms[n] / update_norms[n-1]
  double alpha = 0.0;
  double delta1 = 0.0;
  double eps_prime = 0.0;
  double lmax = 0.0;
};

struct SandwichOptions {
  int max_iter = 5000;
  double cg_tol = 1e-13;
  /// Optional initial iterate (defaults to zero).
  const Field* start = nullptr;
};

/// Weighted norm (delta1 * E(w) + eps_prime * ||w||^2)^(1/2).
double sandwich_norm(const Discretization& disc, std::span<const double> w, double delta1,
                     double eps_prime);

/// Contraction iteration v <- A^{-1} S(v) with A = K - (lambda1 - eps) I and
/// S(v) = +/-(L |grad v| + h). Upper gives v >= 0, lower gives v <= 0.
SandwichResult solve_linear_gradient(const Discretization& disc, Side side, double lambda1,
                                     double epsilon, double L, const Field& h, double tol,
                                     const SandwichOptions& options = {});

}  // namespace semilin
