#pragma once

#include <functional>
#include <span>
#include <vector>

#include "semilin/field.hpp"
#include "semilin/operators.hpp"

namespace semilin {

// Sequential left-to-right reductions keep every result bit-reproducible.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients. Stops once
/// ||A x - rhs|| <= tol * ||rhs||. `max_iter` = 0 selects 10*N + 100.
std::vector<double> pcg(const SparseOperator& A, std::span<const double> rhs, double tol,
                        int max_iter = 0, std::span<const double> x0 = {},
                        SolveStats* stats = nullptr);

Field solve_spd(const SparseOperator& A, const Field& rhs, double tol);

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Restarted GMRES(m) for a general linear map, zero initial guess.
std::vector<double> gmres(const LinearMap& op, std::span<const double> rhs, double tol,
                          int restart, int max_iter, SolveStats* stats = nullptr);

struct EigenResult {
  double lambda1 = 0.0;
  std::vector<double> vector;  // unit length in the plain Euclidean norm
  int iterations = 0;
};

/// Inverse power iteration on A + sigma*I with sigma = 1e-9 * min diag, so
/// semidefinite operators are handled; stops when successive Rayleigh
/// quotients of A differ by at most tol * max(lambda, 1e-12 * max diag).
/// Throws SolverError when a diagonal entry is not positive.
EigenResult smallest_eigenvalue(const SparseOperator& A, double tol, int max_iter = 20000);

/// Field-valued variant; the eigenvector is normalized to unit h^d-weighted
/// norm with a nonnegative sum.
struct EigenField {
  double lambda1 = 0.0;
  Field eigvec;
};
EigenField smallest_eigenvalue(const SparseOperator& A, DomainPtr dom, double tol);

}  // namespace semilin
