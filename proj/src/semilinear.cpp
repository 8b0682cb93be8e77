#include "semilin/semilinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "semilin/error.hpp"
#include "semilin/linsolve.hpp"

namespace semilin {

Field truncate_sigma(const Field& v0, const Field& v1, const Field& u) {
  if (v0.nodes() != u.nodes() || v1.nodes() != u.nodes()) {
    throw DomainError("truncate_sigma: fields live on different domains");
  }
  Field out(u.domain());
  for (std::size_t i = 0; i < u.nodes(); ++i) {
    if (v0[i] > v1[i]) {
      throw PreconditionError("ordering", "truncation band is empty at node " + std::to_string(i));
    }
    out[i] = std::max(v0[i], std::min(u[i], v1[i]));
  }
  return out;
}

double l2_norm(const GridDomain& dom, std::span<const double> u) {
  return std::sqrt(dot(u, u) * dom.cell_volume());
}

double h1_norm(const Discretization& disc, std::span<const double> u) {
  const double e = energy_product(disc, u, u);
  return std::sqrt(std::max(0.0, e) + dot(u, u) * disc.nodes->cell_volume());
}

Field sample_field(DomainPtr dom, const Expr& e) {
  Field out(dom);
  for (std::size_t r = 0; r < dom->size(); ++r) {
    const Point x = dom->coords(static_cast<int>(r));
    out[r] = eval_x(e, std::span<const double>(x.data(), static_cast<std::size_t>(dom->dim())));
  }
  return out;
}

namespace {

// f(x_i, s_i, grad u_i) at every node, with s given separately from u.
std::vector<double> eval_f_nodes(const Discretization& disc, const Expr& f,
                                 std::span<const double> s, std::span<const double> u) {
  const GridDomain& dom = *disc.nodes;
  const auto d = static_cast<std::size_t>(dom.dim());
  const Field g = apply_gradient(disc, Field(disc.nodes, std::vector<double>(u.begin(), u.end())));
  std::vector<double> out(dom.size());
  for (std::size_t r = 0; r < dom.size(); ++r) {
    const Point x = dom.coords(static_cast<int>(r));
    try {
      out[r] = eval_f(f, std::span<const double>(x.data(), d), s[r],
                      std::span<const double>(g.values().data() + r * d, d));
    } catch (const ExprError& e) {
      char buf[96];
      std::snprintf(buf, sizeof buf, " at node %zu (x1 = %.6g, s = %.6g)", r, x[0], s[r]);
      throw ExprError(e.kind(), e.what() + std::string(buf), e.position(), e.identifier());
    }
  }
  return out;
}

struct TruncatedOps {
  const TruncatedProblem& p;
  double t;
  SparseOperator M;
  double cg_tol;

  std::vector<double> sigma(std::span<const double> u) const {
    std::vector<double> s(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      s[i] = std::max(p.v0[i], std::min(u[i], p.v1[i]));
    }
    return s;
  }

  // t * b_sigma(x, u, grad u) * chi
  std::vector<double> source(std::span<const double> u) const {
    const auto s = sigma(u);
    auto f = eval_f_nodes(*p.disc, p.spec->f, s, u);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = p.chi[i] ? t * (f[i] + p.mu * s[i]) : 0.0;
    }
    return f;
  }

  // R(u) = t b - M u, plus its scale 1 + ||t b||.
  std::vector<double> residual(std::span<const double> u, double* norm, double* scale) const {
    auto r = source(u);
    const double vol = p.disc->nodes->cell_volume();
    if (scale) *scale = 1.0 + std::sqrt(dot(r, r) * vol);
    const auto mu_u = M.apply(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= mu_u[i];
    if (norm) *norm = std::sqrt(dot(r, r) * vol);
    return r;
  }

  // F(u) = M^{-1} R(u), the undamped Picard step.
  std::vector<double> step(std::span<const double> u, double* res, double* scale) const {
    const auto r = residual(u, res, scale);
    return pcg(M, r, cg_tol);
  }
};

}  // namespace

TruncatedSolution solve_truncated(const TruncatedProblem& p, double t, const Field& start,
                                  double tol, const TruncatedOptions& options) {
  if (!(t > 0.0 && t <= 1.0)) throw PreconditionError("t", "t must lie in (0, 1]");
  if (!(tol > 0.0)) throw PreconditionError("tol", "tolerance must be positive");
  if (!(p.mu >= 0.0)) throw PreconditionError("mu", "shift mu must be nonnegative");
  const Discretization& disc = *p.disc;
  const std::size_t n = disc.nodes->size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p.v0[i] <= 0.0 && p.v1[i] >= 0.0)) {
      throw PreconditionError("ordering", "expected v0 <= 0 <= v1 at node " + std::to_string(i));
    }
  }
  TruncatedOps ops{p, t, disc.stiffness.shifted(p.mu), options.cg_tol};
  TruncatedSolution sol;
  TruncatedTrace& tr = sol.trace;
  std::vector<double> u = start.nodes() == n ? start.values() : std::vector<double>(n, 0.0);

  bool converged = false;
  double omega = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_picard; ++it) {
    double res = 0.0, scale = 1.0;
    const auto delta = ops.step(u, &res, &scale);
    const double dn = h1_norm(disc, delta);
    tr.update_norms.push_back(dn);
    tr.residuals.push_back(res);
    tr.iterations = it + 1;
    tr.residual_scale = scale;
    if (dn <= tol && res <= tol * scale) {
      for (std::size_t i = 0; i < n; ++i) u[i] += delta[i];
      converged = true;
      break;
    }
    if (dn > prev) {
      omega *= 0.5;
      if (omega < options.min_omega) break;
    }
    prev = dn;
    for (std::size_t i = 0; i < n; ++i) u[i] += omega * delta[i];
  }
  tr.omega = omega;

  if (!converged) {
    tr.path = "newton";
    double res = 0.0, scale = 1.0;
    auto F = ops.step(u, &res, &scale);
    for (int it = 0; it < options.max_newton; ++it) {
      const double fn = h1_norm(disc, F);
      tr.update_norms.push_back(fn);
      tr.residuals.push_back(res);
      ++tr.iterations;
      tr.residual_scale = scale;
      if (fn <= tol && res <= tol * scale) {
        for (std::size_t i = 0; i < n; ++i) u[i] += F[i];
        converged = true;
        break;
      }
      const double unorm = norm2(u);
      const LinearMap jac = [&](std::span<const double> v, std::span<double> out) {
        const double vn = norm2(v);
        if (vn == 0.0) {
          std::fill(out.begin(), out.end(), 0.0);
          return;
        }
        const double eta = 1.5e-8 * (1.0 + unorm) / vn;
        std::vector<double> up(n);
        for (std::size_t i = 0; i < n; ++i) up[i] = u[i] + eta * v[i];
        const auto Fp = ops.step(up, nullptr, nullptr);
        for (std::size_t i = 0; i < n; ++i) out[i] = (Fp[i] - F[i]) / eta;
      };
      std::vector<double> rhs(n);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = -F[i];
      std::vector<double> dx;
      try {
        dx = gmres(jac, rhs, 1e-10, 60, 600);
      } catch (const SolverError&) {
        break;
      }
      // Backtracking on ||F||.
      const double f0 = norm2(F);
      double lam = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 20; ++ls, lam *= 0.5) {
        std::vector<double> trial(n);
        for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lam * dx[i];
        double r2 = 0.0, s2 = 1.0;
        auto Ft = ops.step(trial, &r2, &s2);
        if (norm2(Ft) <= (1.0 - 1e-4 * lam) * f0) {
          u = std::move(trial);
          F = std::move(Ft);
          res = r2;
          scale = s2;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
  }
  if (!converged) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "truncated solve did not converge (picard and newton): last update %.3e, "
                  "residual %.3e after %d iterations",
                  tr.update_norms.empty() ? 0.0 : tr.update_norms.back(),
                  tr.residuals.empty() ? 0.0 : tr.residuals.back(), tr.iterations);
    throw ConvergenceError(buf);
  }

  double dist = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dist = std::max({dist, p.v0[i] - u[i], u[i] - p.v1[i]});
  }
  tr.clamp_distance = dist;
  u = ops.sigma(u);
  double res = 0.0, scale = 1.0;
  const auto last = ops.step(u, &res, &scale);
  tr.final_update = h1_norm(disc, last);
  tr.final_residual = res;
  tr.residual_scale = scale;
  sol.u = Field(disc.nodes, std::move(u));
  return sol;
}

double residual_norm(const Discretization& disc, const Field& u, const SemilinearitySpec& spec) {
  auto r = disc.stiffness.apply(u.values());
  const auto f = eval_f_nodes(disc, spec.f, u.values(), u.values());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= f[i];
  return l2_norm(*disc.nodes, r);
}

// ---------------------------------------------------------------------------

namespace {

double default_base_scale(const GridDomain& dom) {
  double half = 0.0;
  for (int a = 0; a < dom.dim(); ++a) {
    half = std::max(half, 0.5 * (dom.bbox().hi[a] - dom.bbox().lo[a]));
  }
  return half / 4.0;
}

double band_margin(const Field& u, const Field& lo, const Field& hi) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.nodes(); ++i) m = std::min({m, u[i] - lo[i], hi[i] - u[i]});
  return m;
}

void require_condition(ConditionKind kind, const SemilinearitySpec& sp, const GridDomain& dom,
                       double lambda1, const FalsifyOptions& fo) {
  const auto r = falsify_condition(kind, sp, dom, lambda1, fo);
  if (!r.pass) {
    throw PreconditionError(to_string(kind), std::string("condition '") + to_string(kind) +
                                                 "' falsified: " + r.witness->describe());
  }
}

}  // namespace

SolveReport solve_semilinear(const Discretization& disc, const SemilinearitySpec& spec,
                             double tol, const SemilinearOptions& options) {
  if (!(tol > 0.0)) throw PreconditionError("tol", "tolerance must be positive");
  const DomainPtr& dom = disc.nodes;
  SolveReport rep;
  rep.lambda1 = options.lambda1 ? *options.lambda1
                                : smallest_eigenvalue(disc.stiffness, options.eig_tol).lambda1;
  const SemilinearitySpec sp = spec.bound(rep.lambda1);
  sp.validate(dom->dim());
  rep.epsilon = sp.epsilon;
  rep.L = sp.L;
  rep.lmax = lmax(sp.epsilon, rep.lambda1);
  rep.constants = h1_constant(rep.lambda1, sp.epsilon, sp.L);
  if (options.check_conditions) {
    require_condition(ConditionKind::Coercive, sp, *dom, rep.lambda1, options.falsify);
    require_condition(ConditionKind::Growth, sp, *dom, rep.lambda1, options.falsify);
  }
  rep.hdata = sample_field(dom, sp.h);
  for (std::size_t i = 0; i < rep.hdata.nodes(); ++i) {
    if (!(rep.hdata[i] >= 0.0)) throw PreconditionError("h", "h must be nonnegative");
  }
  rep.h_l2 = l2_norm(*dom, rep.hdata.values());
  const double sw_tol = std::min(tol, 1e-10);
  rep.upper = solve_linear_gradient(disc, Side::Upper, rep.lambda1, sp.epsilon, sp.L, rep.hdata,
                                    sw_tol);
  rep.lower = solve_linear_gradient(disc, Side::Lower, rep.lambda1, sp.epsilon, sp.L, rep.hdata,
                                    sw_tol);
  rep.vup = rep.upper.v;
  rep.vlow = rep.lower.v;
  rep.mu = std::max(0.0, sp.epsilon - rep.lambda1);

  TruncatedProblem tp;
  tp.disc = &disc;
  tp.spec = &sp;
  tp.mu = rep.mu;
  tp.v0 = rep.vlow;
  tp.v1 = rep.vup;

  const double base = options.base_scale > 0.0 ? options.base_scale : default_base_scale(*dom);
  Field u = options.start ? *options.start : Field(dom);
  std::vector<char> prev_mask;
  rep.domination_margin = std::numeric_limits<double>::infinity();
  rep.stop_reason = "max_levels";
  for (int k = 1; k <= options.max_levels; ++k) {
    const DomainPtr level = exhaustion(*dom, k, base);
    if (!level) continue;
    LevelRecord rec;
    rec.k = k;
    rec.nodes = level->size();
    auto mask = node_mask(*dom, *level);
    const bool repeat = mask == prev_mask;
    if (repeat) {
      rec.path = "reuse";
      rec.update_h1 = 0.0;
      rec.residual = rep.levels.back().residual;
      rec.clamp_distance = rep.levels.back().clamp_distance;
    } else {
      tp.chi = mask;
      const auto sol = solve_truncated(tp, options.t, u, tol, options.inner);
      std::vector<double> diff(u.nodes());
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = sol.u[i] - u[i];
      rec.update_h1 = h1_norm(disc, diff);
      rec.iterations = sol.trace.iterations;
      rec.path = sol.trace.path;
      rec.residual = sol.trace.final_residual;
      rec.clamp_distance = sol.trace.clamp_distance;
      u = sol.u;
    }
    rec.domination_margin =
        rec.clamp_distance > 0.0 ? -rec.clamp_distance : band_margin(u, rep.vlow, rep.vup);
    rec.h1_norm = h1_norm(disc, u.values());
    rep.domination_margin = std::min(rep.domination_margin, rec.domination_margin);
    rep.levels.push_back(rec);
    const bool saturated = level->size() == dom->size();
    prev_mask = std::move(mask);
    if (rep.levels.size() >= 2 && rec.update_h1 <= tol) {
      rep.stop_reason = saturated ? "saturated" : "tol";
      break;
    }
  }
  rep.u = u;
  rep.h1 = h1_norm(disc, u.values());
  rep.residual = residual_norm(disc, u, sp);
  {
    const auto ku = disc.stiffness.apply(u.values());
    const auto f = eval_f_nodes(disc, sp.f, u.values(), u.values());
    rep.residual_scale = std::max({1.0, l2_norm(*dom, ku), l2_norm(*dom, f)});
    // f0 = max(gamma(env) + h0, (lambda1 - eps)_+ env + h) bounds |f| - L0 |grad u| on the band.
    const auto g = gradient_magnitude(disc, u.values());
    const double pos = std::max(0.0, rep.lambda1 - sp.epsilon);
    rep.f0_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.nodes(); ++i) {
      const Point x = dom->coords(static_cast<int>(i));
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(dom->dim()));
      const double env = std::max(std::fabs(rep.vlow[i]), std::fabs(rep.vup[i]));
      const double f0 = std::max(eval_s(sp.gamma, env) + eval_x(sp.h0, xs),
                                 pos * env + rep.hdata[i]);
      rep.f0_margin = std::min(rep.f0_margin, f0 + sp.L0 * g[i] - std::fabs(f[i]));
    }
  }
  return rep;
}

UniquenessReport uniqueness_probe(const Discretization& disc, const SemilinearitySpec& spec,
                                  int trials, double tol, std::uint64_t seed,
                                  const SemilinearOptions& options) {
  if (trials < 2) throw PreconditionError("trials", "uniqueness probe needs at least 2 trials");
  const double lambda1 = options.lambda1
                             ? *options.lambda1
                             : smallest_eigenvalue(disc.stiffness, options.eig_tol).lambda1;
  const SemilinearitySpec sp = spec.bound(lambda1);
  require_condition(ConditionKind::Monotone, sp, *disc.nodes, lambda1, options.falsify);

  UniquenessReport rep;
  rep.trials = trials;
  rep.threshold = 20.0 * tol;
  Rng rng(seed);
  const double base = options.base_scale > 0.0 ? options.base_scale
                                               : default_base_scale(*disc.nodes);
  for (int t = 0; t < trials; ++t) {
    SemilinearOptions o = options;
    o.lambda1 = lambda1;
    o.base_scale = base * (0.5 + rng.uniform());
    // The band is not known before the first solve; scale random starts by
    // the first solution's magnitude (or 1 for the first trial).
    const double amp = rep.solutions.empty() ? 1.0 : 1.0 + norm_inf(rep.solutions[0].values());
    Field start(disc.nodes);
    for (std::size_t i = 0; i < start.nodes(); ++i) start[i] = amp * (2.0 * rng.uniform() - 1.0);
    o.start = &start;
    rep.solutions.push_back(solve_semilinear(disc, sp, tol, o).u);
  }
  for (std::size_t a = 0; a < rep.solutions.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.solutions.size(); ++b) {
      std::vector<double> diff(rep.solutions[a].nodes());
      for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = rep.solutions[a][i] - rep.solutions[b][i];
      }
      rep.max_distance = std::max(rep.max_distance, h1_norm(disc, diff));
    }
  }
  rep.pass = rep.max_distance <= rep.threshold;
  return rep;
}

}  // namespace semilin
