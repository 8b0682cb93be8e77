#include "semilin/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semilin/error.hpp"

namespace semilin {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<double> pcg(const SparseOperator& A, std::span<const double> rhs, double tol,
                        int max_iter, std::span<const double> x0, SolveStats* stats) {
  if (!(tol > 0.0)) throw SolverError(SolverError::Kind::Breakdown, "CG tolerance must be positive");
  const std::size_t n = A.size();
  if (rhs.size() != n) throw SolverError(SolverError::Kind::Breakdown, "CG: size mismatch");
  if (max_iter <= 0) max_iter = 10 * static_cast<int>(n) + 100;
  std::vector<double> x(n, 0.0);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  if (x0.size() == n) std::copy(x0.begin(), x0.end(), x.begin());

  std::vector<double> inv_diag = A.diagonal();
  for (double& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(n), z(n), p(n), q(n);
  auto true_residual = [&] {
    A.apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
    return norm2(r);
  };
  double rnorm = true_residual();
  int it = 0;
  while (it < max_iter) {
    if (rnorm <= tol * bnorm) {
      // Confirm with the true residual before accepting.
      rnorm = true_residual();
      if (rnorm <= tol * bnorm) break;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    std::copy(z.begin(), z.end(), p.begin());
    double rz = dot(r, z);
    // Inner loop; a restart from the true residual happens every 200 steps.
    for (int inner = 0; inner < 200 && it < max_iter; ++inner, ++it) {
      A.apply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) {
        throw SolverError(SolverError::Kind::NotPositiveDefinite,
                          "CG detected non-positive curvature (operator not SPD)", rnorm / bnorm);
      }
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      rnorm = norm2(r);
      if (rnorm <= tol * bnorm) {
        ++it;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (rnorm > tol * bnorm) rnorm = true_residual();
  }
  if (rnorm > tol * bnorm) {
    throw SolverError(SolverError::Kind::MaxIterations,
                      "CG reached " + std::to_string(max_iter) +
                          " iterations, relative residual " + std::to_string(rnorm / bnorm),
                      rnorm / bnorm);
  }
  if (stats) *stats = {it, rnorm / bnorm};
  return x;
}

Field solve_spd(const SparseOperator& A, const Field& rhs, double tol) {
  if (rhs.components() != 1 || rhs.nodes() != A.size()) {
    throw SolverError(SolverError::Kind::Breakdown, "solve_spd: right-hand side size mismatch");
  }
  return Field(rhs.domain(), pcg(A, rhs.values(), tol));
}

std::vector<double> gmres(const LinearMap& op, std::span<const double> rhs, double tol,
                          int restart, int max_iter, SolveStats* stats) {
  const std::size_t n = rhs.size();
  std::vector<double> x(n, 0.0);
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  const int m = std::max(1, restart);
  std::vector<std::vector<double>> V(static_cast<std::size_t>(m) + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(static_cast<std::size_t>(m) + 1,
                                     std::vector<double>(static_cast<std::size_t>(m), 0.0));
  std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
  std::vector<double> g(static_cast<std::size_t>(m) + 1), w(n), ax(n);
  int total = 0;
  double rel = 1.0;
  while (total < max_iter) {
    op(x, ax);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = rhs[i] - ax[i];
    double beta = norm2(V[0]);
    rel = beta / bnorm;
    if (rel <= tol) break;
    for (double& v : V[0]) v /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < m && total < max_iter; ++k, ++total) {
      const auto ku = static_cast<std::size_t>(k);
      op(V[ku], w);
      for (int j = 0; j <= k; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        H[ju][ku] = dot(w, V[ju]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= H[ju][ku] * V[ju][i];
      }
      H[ku + 1][ku] = norm2(w);
      if (H[ku + 1][ku] > 0.0) {
        for (std::size_t i = 0; i < n; ++i) V[ku + 1][i] = w[i] / H[ku + 1][ku];
      }
      for (int j = 0; j < k; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double t = cs[ju] * H[ju][ku] + sn[ju] * H[ju + 1][ku];
        H[ju + 1][ku] = -sn[ju] * H[ju][ku] + cs[ju] * H[ju + 1][ku];
        H[ju][ku] = t;
      }
      const double denom = std::hypot(H[ku][ku], H[ku + 1][ku]);
      cs[ku] = denom > 0.0 ? H[ku][ku] / denom : 1.0;
      sn[ku] = denom > 0.0 ? H[ku + 1][ku] / denom : 0.0;
      H[ku][ku] = denom;
      H[ku + 1][ku] = 0.0;
      g[ku + 1] = -sn[ku] * g[ku];
      g[ku] = cs[ku] * g[ku];
      rel = std::fabs(g[ku + 1]) / bnorm;
      if (rel <= tol || denom == 0.0) {
        ++k;
        ++total;
        break;
      }
    }
    // Back substitution for the k-dimensional least-squares update.
    std::vector<double> y(static_cast<std::size_t>(k), 0.0);
    for (int i = k - 1; i >= 0; --i) {
      const auto iu = static_cast<std::size_t>(i);
      double s = g[iu];
      for (int j = i + 1; j < k; ++j) s -= H[iu][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
      y[iu] = H[iu][iu] != 0.0 ? s / H[iu][iu] : 0.0;
    }
    for (int j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) x[i] += y[static_cast<std::size_t>(j)] * V[static_cast<std::size_t>(j)][i];
    }
    if (rel <= tol) {
      op(x, ax);
      for (std::size_t i = 0; i < n; ++i) w[i] = rhs[i] - ax[i];
      rel = norm2(w) / bnorm;
      if (rel <= tol * 10.0) break;
    }
  }
  if (rel > tol * 10.0) {
    throw SolverError(SolverError::Kind::MaxIterations,
                      "GMRES did not converge, relative residual " + std::to_string(rel), rel);
  }
  if (stats) *stats = {total, rel};
  return x;
}

EigenResult smallest_eigenvalue(const SparseOperator& A, double tol, int max_iter) {
  const std::size_t n = A.size();
  if (n == 0) throw SolverError(SolverError::Kind::Breakdown, "eigenvalue of an empty operator");
  const auto diag = A.diagonal();
  const double dmax = norm_inf(diag);
  const double dmin = *std::min_element(diag.begin(), diag.end());
  if (!(dmin > 0.0)) {
    throw SolverError(SolverError::Kind::NotPositiveDefinite,
                      "inverse iteration needs a positive diagonal");
  }
  // Scaled by the smallest diagonal so that large penalty rows (Robin with
  // huge beta) do not swamp lambda1 with the shift.
  const double sigma = 1e-9 * dmin;
  const SparseOperator shifted = A.shifted(sigma);

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> ax(n);
  A.apply(x, ax);
  double rq = dot(x, ax);
  EigenResult out;
  for (int it = 1; it <= max_iter; ++it) {
    std::vector<double> guess(n);
    const double scale = 1.0 / (rq + sigma);
    for (std::size_t i = 0; i < n; ++i) guess[i] = x[i] * scale;
    std::vector<double> y;
    try {
      // Attainable accuracy degrades with the conditioning of the Jacobi
      // scaled operator, roughly dmin / (rq + sigma).
      const double inner_tol = std::clamp(1e-14 * dmin / (rq + sigma), 1e-14, 1e-6);
      y = pcg(shifted, x, inner_tol, 0, guess);
    } catch (const SolverError& e) {
      throw SolverError(SolverError::Kind::Breakdown,
                        std::string("inverse iteration inner solve failed: ") + e.what(),
                        e.residual());
    }
    const double ny = norm2(y);
    if (!(ny > 0.0) || !std::isfinite(ny)) {
      throw SolverError(SolverError::Kind::Breakdown, "inverse iteration produced a zero vector");
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    A.apply(x, ax);
    const double rq_new = dot(x, ax);
    const double change = std::fabs(rq_new - rq);
    rq = rq_new;
    out.iterations = it;
    if (it > 1 && change <= tol * std::max(std::fabs(rq), 1e-12 * dmax)) break;
    if (it == max_iter) {
      throw SolverError(SolverError::Kind::MaxIterations,
                        "inverse iteration did not converge", change);
    }
  }
  double sum = 0.0;
  for (double v : x) sum += v;
  if (sum < 0.0) {
    for (double& v : x) v = -v;
  }
  out.lambda1 = std::max(rq, 0.0);
  out.vector = std::move(x);
  return out;
}

EigenField smallest_eigenvalue(const SparseOperator& A, DomainPtr dom, double tol) {
  auto res = smallest_eigenvalue(A, tol);
  const double scale = 1.0 / std::sqrt(dom->cell_volume());
  for (double& v : res.vector) v *= scale;
  return {res.lambda1, Field(std::move(dom), std::move(res.vector))};
}

}  // namespace semilin
