#include "semilin/sandwich.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "semilin/conditions.hpp"
#include "semilin/error.hpp"
#include "semilin/linsolve.hpp"

namespace semilin {

double sandwich_norm(const Discretization& disc, std::span<const double> w, double delta1,
                     double eps_prime) {
  const double e = energy_product(disc, w, w);
  const double l2 = dot(w, w) * disc.nodes->cell_volume();
  return std::sqrt(std::max(0.0, delta1 * e + eps_prime * l2));
}

SandwichResult solve_linear_gradient(const Discretization& disc, Side side, double lambda1,
                                     double epsilon, double L, const Field& h, double tol,
                                     const SandwichOptions& options) {
  if (!(tol > 0.0)) throw PreconditionError("tol", "tolerance must be positive");
  const double lm = lmax(epsilon, lambda1);
  if (!(L >= 0.0) || !(L < lm)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "L = %.10g is not below Lmax = %.10g", L, lm);
    throw ThresholdError(buf);
  }
  const std::size_t n = disc.nodes->size();
  if (h.nodes() != n || h.components() != 1) {
    throw DomainError("sandwich data h does not live on the discretization nodes");
  }
  for (double v : h.values()) {
    if (!(v >= 0.0)) throw PreconditionError("h", "sandwich data h must be nonnegative");
  }

  SandwichResult res;
  const auto split = epsilon_split(epsilon, lambda1);
  res.lmax = lm;
  res.delta1 = split.delta1;
  res.alpha = 0.5 * (1.0 + (L / lm) * (L / lm));
  res.eps_prime = split.eps2 - L * L / (4.0 * res.alpha * split.delta1);
  const double bound = std::sqrt(res.alpha) + 1e-6;

  const SparseOperator A = disc.stiffness.shifted(-(lambda1 - epsilon));
  const double sign = side == Side::Upper ? 1.0 : -1.0;
  auto source = [&](std::span<const double> v) {
    std::vector<double> s = gradient_magnitude(disc, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = sign * (L * s[i] + h[i]);
    return s;
  };
  auto norm = [&](std::span<const double> w) {
    return sandwich_norm(disc, w, res.delta1, res.eps_prime);
  };

  std::vector<double> v(n, 0.0);
  if (options.start != nullptr) v = options.start->values();
  std::vector<double> s_prev = source(v);
  // First step in full form, then increments d_n = A^{-1}(S v_n - S v_{n-1}).
  std::vector<double> next = pcg(A, s_prev, options.cg_tol);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = next[i] - v[i];
  v = std::move(next);
  res.iterations = 1;
  double dn = norm(d);
  res.update_norms.push_back(dn);

  while (dn > tol) {
    if (res.iterations >= options.max_iter) {
      throw ConvergenceError("sandwich iteration did not reach tol after " +
                             std::to_string(options.max_iter) + " iterations");
    }
    std::vector<double> s_cur = source(v);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = s_cur[i] - s_prev[i];
    d = pcg(A, diff, options.cg_tol);
    for (std::size_t i = 0; i < n; ++i) v[i] += d[i];
    s_prev = std::move(s_cur);
    ++res.iterations;
    const double dn_new = norm(d);
    res.update_norms.push_back(dn_new);
    // Ratios of updates at the rounding level of v carry no information.
    if (dn_new <= 1e-12 * norm(v)) break;
    const double ratio = dn > 0.0 ? dn_new / dn : 0.0;
    res.contraction_ratios.push_back(ratio);
    if (ratio > bound) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "contraction ratio %.12g exceeds sqrt(alpha) = %.12g at iteration %d", ratio,
                    std::sqrt(res.alpha), res.iterations);
      throw ContractionError(buf);
    }
    dn = dn_new;
  }

  for (double x : v) {
    const bool ok = side == Side::Upper ? x >= -1e-10 : x <= 1e-10;
    if (!ok) {
      throw ConvergenceError(std::string("sandwich sign post-check failed for the ") +
                             (side == Side::Upper ? "upper" : "lower") + " solution");
    }
  }
  res.v = Field(disc.nodes, std::move(v));
  return res;
}

}  // namespace semilin
