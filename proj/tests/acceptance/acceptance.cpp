// Acceptance criteria runner. Usage: acceptance [N ...]; no arguments runs all.
// Prints one "criterion N: PASS|FAIL" line per criterion and exits nonzero
// when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "../support/suite.hpp"
#include "semilin/analysis.hpp"
#include "semilin/conditions.hpp"
#include "semilin/counterexample.hpp"
#include "semilin/error.hpp"
#include "semilin/harness.hpp"
#include "semilin/linsolve.hpp"
#include "semilin/sandwich.hpp"
#include "semilin/semilinear.hpp"

using namespace semilin;
using namespace semilin::test;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail.clear();
    pass = false;
    if (detail.size() < 600) detail += (detail.empty() ? "" : "; ") + why;
  }
  void info(const std::string& text) {
    if (pass) detail += (detail.empty() ? "" : "; ") + text;
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

// 1. Closed-form constants on random draws.
Outcome constants_suite() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  auto check = [&](double got, double want, const char* what) {
    const double r = rel(got, want);
    worst = std::max(worst, r);
    if (!(r <= 1e-12)) o.fail(std::string(what) + " off by " + fmt(r));
  };
  for (int i = 0; i < 1000; ++i) {
    const double lambda1 = 0.01 + 20.0 * U(rng);
    const double eps = 0.01 + 40.0 * U(rng);
    const double lm_want = eps <= 2.0 * lambda1 ? eps / std::sqrt(lambda1)
                                                : 2.0 * std::sqrt(eps - lambda1);
    check(lmax(eps, lambda1), lm_want, "lmax");
    check(lmax(2.0 * lambda1, lambda1), 2.0 * std::sqrt(lambda1), "lmax branch boundary");

    const auto sp = epsilon_split(eps, lambda1);
    const double e1 = std::min(eps / 2.0, lambda1);
    check(sp.eps1, e1, "eps1");
    check(sp.eps2, eps - e1, "eps2");
    check(sp.delta1, e1 / lambda1, "delta1");
    check(4.0 * sp.delta1 * sp.eps2, lm_want * lm_want, "4 delta1 eps2 = Lmax^2");

    const double L = U(rng) * lm_want;
    const auto hc = h1_constant(lambda1, eps, L);
    check(hc.rho0, 4.0 * sp.delta1 / (4.0 * sp.delta1 * sp.eps2 - L * L), "rho0");

    const double d_hat = 2.5 + 20.0 * U(rng);
    const double q = 2.0 + 15.0 * U(rng);
    if (q < d_hat / 2.0) {
      check(q_double_star(q, d_hat), q * d_hat / (d_hat - 2.0 * q), "q**");
    } else if (q > d_hat / 2.0) {
      if (!std::isinf(q_double_star(q, d_hat))) o.fail("q** finite for q > d/2");
      const auto mp = moser_params(q, d_hat);
      const double two_star = 2.0 * d_hat / (d_hat - 2.0);
      const double qp = q / (q - 1.0);
      const double chi = two_star / (2.0 * qp);
      check(mp.two_star, two_star, "2*");
      check(mp.q_prime, qp, "q'");
      check(mp.chi, chi, "chi");
      check(mp.theta, (2.0 * chi - 2.0) / (2.0 * chi - 1.0), "theta");
      double beta = 1.0;
      if (mp.beta.size() != 40 || mp.beta[0] != 1.0) o.fail("beta_0 or length");
      double prev_gap = std::numeric_limits<double>::infinity();
      for (std::size_t n = 1; n < mp.beta.size(); ++n) {
        beta = 0.5 + chi * beta;
        check(mp.beta[n], beta, "beta_n");
        const double gap = std::pow(chi, static_cast<double>(n)) / mp.beta[n] - mp.theta;
        // Below ~1e-13 theta the gap is rounding noise and its order is meaningless.
        const double resolvable = 1e-13 * mp.theta;
        const bool grows = gap > resolvable && gap > prev_gap * (1.0 + 1e-12);
        if (!(gap > -1e-12 * mp.theta) || grows) {
          o.fail("chi^N/beta_N does not decrease to theta from above (n=" + std::to_string(n) +
                 ", gap " + fmt(gap) + ")");
        }
        prev_gap = gap;
      }
    }
  }
  o.info("1000 draws, worst relative error " + fmt(worst));
  return o;
}

// 2. Eigenvalue against the tridiagonal closed form.
Outcome eigenvalue_oracle() {
  Outcome o;
  for (double h : {0.25, 0.125, 0.0625}) {
    const double want = (2.0 - 2.0 * std::cos(std::numbers::pi * h)) / (h * h);
    for (int dim : {1, 2}) {
      Box box;
      box.dim = dim;
      for (int a = 0; a < dim; ++a) box.hi[static_cast<std::size_t>(a)] = 1.0;
      const auto disc = make_dirichlet(build_domain(DomainSpec::box(), h, box));
      const double got = smallest_eigenvalue(disc.stiffness, 1e-14).lambda1;
      const double r = rel(got, dim * want);
      if (!(r <= 1e-10)) o.fail("d=" + std::to_string(dim) + " h=" + fmt(h) + " rel " + fmt(r));
      else o.info("d=" + std::to_string(dim) + " h=" + fmt(h) + " rel " + fmt(r));
    }
  }
  return o;
}

// 3. Sandwich contraction, signs and restart invariance.
Outcome sandwich_contraction() {
  Outcome o;
  struct Base {
    const char* name;
    std::string domain;
    const char* h;
    const char* eps;
  };
  const std::vector<Base> bases{
      {"interval", "domain: {kind: box, lo: [0], hi: [1], h: 0.03125}\n", "1", "lambda1"},
      {"interval_bump", "domain: {kind: box, lo: [0], hi: [1], h: 0.03125}\n",
       "4*x1*(1 - x1)", "3*lambda1"},
      {"square", "domain: {kind: box, lo: [0, 0], hi: [1, 1], h: 0.125}\n", "1", "0.5*lambda1"},
      {"disk",
       "domain: {kind: disk, lo: [-1, -1], hi: [1, 1], center: [0, 0], radius: 1, h: 0.125}\n",
       "exp(-x1^2 - x2^2)", "lambda1"},
      {"lshape", "domain: {kind: lshape, lo: [0, 0], hi: [2, 2], h: 0.125}\n", "1 + x1",
       "2*lambda1"},
  };
  const double tol = 1e-10;
  double worst_excess = -1.0;
  int problems = 0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& b : bases) {
    for (double frac : {0.0, 0.3, 0.6, 0.9}) {
      ++problems;
      const std::string yaml = "mode: solve\n" + b.domain + "problem: {f: \"0\", h: \"" + b.h +
                               "\", epsilon: \"" + b.eps + "\"}\n";
      const Loaded p = load(yaml);
      const double eps = p.problem.spec.epsilon;
      const double L = frac * lmax(eps, p.lambda1);
      const Field hf = sample_field(p.disc.nodes, p.problem.spec.bound(p.lambda1).h);
      for (Side side : {Side::Upper, Side::Lower}) {
        const std::string tag = std::string(b.name) + " L/Lmax=" + fmt(frac) +
                                (side == Side::Upper ? " upper" : " lower");
        try {
          const auto r = solve_linear_gradient(p.disc, side, p.lambda1, eps, L, hf, tol);
          const double bound = std::sqrt(r.alpha) + 1e-8;
          for (double ratio : r.contraction_ratios) {
            worst_excess = std::max(worst_excess, ratio - std::sqrt(r.alpha));
            if (!(ratio <= bound)) o.fail(tag + " ratio " + fmt(ratio) + " > " + fmt(bound));
          }
          for (double v : r.v.values()) {
            if (side == Side::Upper ? !(v >= -1e-10) : !(v <= 1e-10)) {
              o.fail(tag + " sign violated: " + fmt(v));
              break;
            }
          }
          double amp = 0.0;
          for (double v : r.v.values()) amp = std::max(amp, std::fabs(v));
          Field start(p.disc.nodes);
          for (std::size_t i = 0; i < start.nodes(); ++i) start[i] = 2.0 * amp * (U(rng) - 0.3);
          SandwichOptions so;
          so.start = &start;
          const auto r2 = solve_linear_gradient(p.disc, side, p.lambda1, eps, L, hf, tol, so);
          std::vector<double> diff(r.v.nodes());
          for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = r.v[i] - r2.v[i];
          const double dn = sandwich_norm(p.disc, diff, r.delta1, r.eps_prime);
          if (!(dn <= 10.0 * tol)) o.fail(tag + " restart distance " + fmt(dn));
        } catch (const Error& e) {
          o.fail(tag + ": " + e.what());
        }
      }
    }
  }
  o.info(std::to_string(problems) + " problems, max(ratio - sqrt(alpha)) = " + fmt(worst_excess));
  return o;
}

// 4. Domination at every exhaustion level.
Outcome domination() {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& sp : regression_suite()) {
    try {
      const Loaded p = load(sp.yaml);
      const auto rep = solve_semilinear(p.disc, p.problem.spec, p.config.solver.tol,
                                        pipeline_options(p));
      for (const auto& lv : rep.levels) {
        worst = std::min(worst, lv.domination_margin);
        if (!(lv.domination_margin >= -1e-8)) {
          o.fail(sp.name + " level " + std::to_string(lv.k) + " margin " +
                 fmt(lv.domination_margin));
        }
      }
      for (std::size_t i = 0; i < rep.u.nodes(); ++i) {
        if (!(rep.vlow[i] - 1e-8 <= rep.u[i] && rep.u[i] <= rep.vup[i] + 1e-8)) {
          o.fail(sp.name + " final u leaves the band at node " + std::to_string(i));
          break;
        }
      }
    } catch (const Error& e) {
      o.fail(sp.name + ": " + e.what());
    }
  }
  o.info("10 problems, min level margin " + fmt(worst));
  return o;
}

// 5. H1 bound across the suite and t-sweep; worst-case oracle.
Outcome h1_bound() {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& sp : regression_suite()) {
    for (double t : {0.25, 0.5, 1.0}) {
      try {
        const Loaded p = load(sp.yaml);
        auto opts = pipeline_options(p);
        opts.t = t;
        const auto rep = solve_semilinear(p.disc, p.problem.spec, p.config.solver.tol, opts);
        const double lhs = h1_norm(p.disc, rep.u.values());
        const double rhs = rep.constants.C * rep.h_l2;
        worst = std::min(worst, rhs / std::max(lhs, 1e-300));
        if (!(lhs <= rhs)) o.fail(sp.name + " t=" + fmt(t) + ": " + fmt(lhs) + " > " + fmt(rhs));
      } catch (const Error& e) {
        o.fail(sp.name + " t=" + fmt(t) + ": " + e.what());
      }
    }
  }
  double oracle_worst = 0.0;
  std::uint64_t seed = 5;
  for (double ef : {0.25, 0.5, 1.0, 2.0, 3.0}) {
    for (double lf : {0.0, 0.3, 0.6, 0.9, 0.99}) {
      const auto wc = worst_case_h1_ratio(16, ef, lf, seed++);
      const double eps = ef * wc.lambda1;
      const double C = h1_constant(wc.lambda1, eps, lf * lmax(eps, wc.lambda1)).C;
      oracle_worst = std::max(oracle_worst, wc.ratio / C);
      if (!(wc.ratio <= C)) {
        o.fail("oracle eps=" + fmt(ef) + "*lambda1 L=" + fmt(lf) + "*Lmax: " + fmt(wc.ratio) +
               " > C = " + fmt(C));
      }
    }
  }
  o.info("min C||h||/||u|| over suite " + fmt(worst) + ", max oracle ratio/C " +
         fmt(oracle_worst));
  return o;
}

// 6. Agreement with dense Newton; uniqueness for monotone members.
Outcome oracle_equivalence() {
  Outcome o;
  double worst = 0.0;
  for (double h : {1.0 / 16.0, 1.0 / 64.0}) {
    for (const auto& sp : interval_suite(h)) {
      const std::string tag = sp.name + " h=" + fmt(h);
      try {
        const Loaded p = load(sp.yaml);
        const auto opts = pipeline_options(p);
        const auto rep = solve_semilinear(p.disc, p.problem.spec, p.config.solver.tol, opts);
        const auto bound = p.problem.spec.bound(p.lambda1);
        const auto ref = dense_newton_interval(bound.f, h);
        if (!ref.converged) {
          o.fail(tag + ": dense Newton did not converge");
          continue;
        }
        double d = 0.0;
        for (std::size_t i = 0; i < ref.u.size(); ++i) d = std::max(d, std::fabs(ref.u[i] - rep.u[i]));
        worst = std::max(worst, d);
        if (!(d <= 1e-7)) o.fail(tag + ": max difference " + fmt(d));
        if (sp.monotone && h == 1.0 / 16.0) {
          const auto ur = uniqueness_probe(p.disc, p.problem.spec, 3, p.config.solver.tol,
                                           p.config.solver.seed, opts);
          if (!ur.pass) o.fail(tag + ": uniqueness distance " + fmt(ur.max_distance));
        }
      } catch (const Error& e) {
        o.fail(tag + ": " + e.what());
      }
    }
  }
  o.info("20 runs, max |u - u_newton| = " + fmt(worst));
  return o;
}

// 7. Moser chain.
Outcome moser_chain_criterion() {
  Outcome o;
  double min_raw = std::numeric_limits<double>::infinity();
  for (const auto& sp : regression_suite()) {
    try {
      const Loaded p = load(sp.yaml);
      const auto rep = solve_semilinear(p.disc, p.problem.spec, p.config.solver.tol,
                                        pipeline_options(p));
      const auto& s = p.problem.spec;
      const auto mc = moser_chain(rep.u, rep.hdata, s.q, s.effective_d_hat(p.disc.nodes->dim()));
      min_raw = std::min(min_raw, mc.c1_raw);
      if (!(mc.c1_fitted >= 1.0)) o.fail(sp.name + ": fitted C1 " + fmt(mc.c1_fitted));
      if (!mc.finite) o.fail(sp.name + ": chain norm not finite");
      if (!mc.monotone) o.fail(sp.name + ": chain norms not monotone");
      if (mc.steps.empty()) o.fail(sp.name + ": empty chain");
      for (const auto& st : mc.steps) {
        if (!(st.ratio <= mc.c1_fitted * (1.0 + 1e-12))) {
          o.fail(sp.name + ": step at p=" + fmt(st.p) + " needs " + fmt(st.ratio));
        }
      }
    } catch (const Error& e) {
      o.fail(sp.name + ": " + e.what());
    }
  }
  double drift = 0.0;
  for (int variant = 0; variant < 3; ++variant) {
    double first = 0.0;
    for (double k : {1.0, 2.0, 4.0, 8.0}) {
      const auto sp = homogeneous_problem(variant, k);
      try {
        const Loaded p = load(sp.yaml);
        const auto rep = solve_semilinear(p.disc, p.problem.spec, p.config.solver.tol,
                                          pipeline_options(p));
        const auto& s = p.problem.spec;
        const auto mc =
            moser_chain(rep.u, rep.hdata, s.q, s.effective_d_hat(p.disc.nodes->dim()));
        if (k == 1.0) {
          first = mc.ratio;
        } else {
          const double r = rel(mc.ratio, first);
          drift = std::max(drift, r);
          if (!(r < 1e-6)) o.fail(sp.name + " k=" + fmt(k) + ": ratio drift " + fmt(r));
        }
      } catch (const Error& e) {
        o.fail(sp.name + " k=" + fmt(k) + ": " + e.what());
      }
    }
  }
  o.info("min raw C1 " + fmt(min_raw) + ", max homogeneous drift " + fmt(drift));
  return o;
}

// 8. Counterexample blow-up study.
Outcome counterexample_study() {
  Outcome o;
  const double width = std::numbers::pi;
  const double h = width / 16.0;
  const double lambda1 = strip_lambda1(width, h);
  const double eps = 3.0 * lambda1;
  const double r = lmax(eps, lambda1);
  const auto sp = make_symbol_problem(CaseTag::III, r, lambda1, eps, 2);
  const std::vector<double> widths{10.0, 20.0, 40.0, 80.0};
  const auto st = blowup_study(sp, widths, h);
  std::string table;
  for (const auto& row : st.rows) {
    table += " T=" + fmt(row.T) + ":" + fmt(row.resonant_ratio) + "/" + fmt(row.control_ratio);
  }
  if (!st.error.empty()) o.fail("solver: " + st.error);
  if (st.rows.size() != widths.size()) o.fail("incomplete table");
  for (std::size_t j = 1; j < st.rows.size(); ++j) {
    const double g = st.rows[j].resonant_ratio / st.rows[j - 1].resonant_ratio;
    if (!(g >= 1.5)) o.fail("resonant growth " + fmt(g) + " at T=" + fmt(st.rows[j].T));
    const double c = st.rows[j].control_ratio / st.rows[0].control_ratio;
    if (!(c <= 2.0 && c >= 0.5)) o.fail("control drift " + fmt(c) + " at T=" + fmt(st.rows[j].T));
  }
  if (st.verdict != "BLOWUP") o.fail("verdict " + st.verdict);
  o.detail += ";" + table + " (resonant/control)";
  return o;
}

// 9. Robin mode.
Outcome robin_mode() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> domains{
      {"interval", "domain: {kind: box, lo: [0], hi: [1], h: 0.0625}\n"},
      {"square", "domain: {kind: box, lo: [0, 0], hi: [1, 1], h: 0.125}\n"}};
  const std::string problem =
      "problem: {f: \"-s^3 + 1\", h: \"1\", h0: \"1\", gamma: \"abs(s)^3\", epsilon: "
      "\"lambda1\", q: \"2\", d_hat: \"3\"}\nsolver: {tol: 1e-10, seed: 7, falsify_budget: "
      "500}\n";
  for (const auto& [name, dom] : domains) {
    try {
      const Loaded dir = load("mode: solve\n" + dom + problem);
      const Loaded rob =
          load("mode: solve\n" + dom + "boundary: {kind: robin, beta: \"1e12\"}\n" + problem);
      const double rl = rel(rob.lambda1, dir.lambda1);
      if (!(rl <= 1e-5)) o.fail(name + " lambda1 rel " + fmt(rl));
      const auto rd = solve_semilinear(dir.disc, dir.problem.spec, 1e-10, pipeline_options(dir));
      const auto rr = solve_semilinear(rob.disc, rob.problem.spec, 1e-10, pipeline_options(rob));
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < rd.u.nodes(); ++i) {
        const auto idx = dir.disc.nodes->lattice_index(static_cast<int>(i));
        const int j = rob.disc.nodes->row_at(idx);
        if (j < 0) {
          o.fail(name + ": Dirichlet node missing from the Robin closure");
          break;
        }
        diff = std::max(diff, std::fabs(rd.u[i] - rr.u[static_cast<std::size_t>(j)]));
        scale = std::max(scale, std::fabs(rd.u[i]));
      }
      if (!(diff <= 1e-5 * scale)) o.fail(name + " field rel " + fmt(diff / scale));
      o.info(name + ": lambda1 rel " + fmt(rl) + ", field rel " + fmt(diff / scale));

      const Loaded b1 =
          load("mode: solve\n" + dom + "boundary: {kind: robin, beta: \"1\"}\n" + problem);
      const auto rep = solve_semilinear(b1.disc, b1.problem.spec, 1e-10, pipeline_options(b1));
      for (const auto* s : {&rep.upper, &rep.lower}) {
        for (double ratio : s->contraction_ratios) {
          if (!(ratio <= std::sqrt(s->alpha) + 1e-8)) o.fail(name + " beta=1 contraction " + fmt(ratio));
        }
      }
      for (double v : rep.vup.values()) {
        if (!(v >= -1e-10)) o.fail(name + " beta=1 vup sign");
      }
      for (double v : rep.vlow.values()) {
        if (!(v <= 1e-10)) o.fail(name + " beta=1 vlow sign");
      }
      for (const auto& lv : rep.levels) {
        if (!(lv.domination_margin >= -1e-8)) o.fail(name + " beta=1 domination " + fmt(lv.domination_margin));
      }
      const double lhs = h1_norm(b1.disc, rep.u.values());
      if (!(lhs <= rep.constants.C * rep.h_l2)) o.fail(name + " beta=1 H1 bound");
      o.info(name + " beta=1: lambda1 " + fmt(b1.lambda1));
    } catch (const Error& e) {
      o.fail(name + ": " + e.what());
    }
  }
  return o;
}

std::string machine_section(const std::string& report) {
  const auto pos = report.find("# machine\n");
  return pos == std::string::npos ? std::string() : report.substr(pos);
}

// 10. Determinism of the machine-readable certificate.
Outcome determinism() {
  Outcome o;
  const auto base = std::filesystem::temp_directory_path() / "semilin_acceptance_det";
  std::vector<std::pair<std::string, std::string>> configs;
  for (const auto& sp : regression_suite()) configs.emplace_back(sp.name, sp.yaml);
  configs.emplace_back("audit", "mode: audit\ndomain: {kind: box, lo: [0], hi: [1], h: 0.0625}\n"
                                "problem: {f: \"-s^3 + 1\", h: \"1\", gamma: \"abs(s)^3\", "
                                "epsilon: \"lambda1\", d_hat: \"6\"}\n");
  configs.emplace_back("counterexample", "mode: counterexample\ncounterexample: {case: iii, "
                                         "widths: [10, 20]}\n");
  int runs = 0;
  for (const auto& [name, yaml] : configs) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      RunConfig rc = parse_config(yaml);
      RunOverrides ov;
      ov.out = (base / (name + "_" + std::to_string(rep))).string();
      const auto res = run_config(rc, ov);
      ++runs;
      const std::string m = machine_section(res.report);
      if (m.empty()) o.fail(name + ": no machine section");
      if (rep == 0) {
        first = m;
      } else if (m != first) {
        o.fail(name + ": machine sections differ");
      }
    }
  }
  std::error_code ec;
  std::filesystem::remove_all(base, ec);
  o.info(std::to_string(runs) + " runs compared");
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "constants suite", 1.0, constants_suite},
      {2, "eigenvalue oracle", 5.0, eigenvalue_oracle},
      {3, "sandwich contraction", 30.0, sandwich_contraction},
      {4, "domination", 60.0, domination},
      {5, "H1 bound", 120.0, h1_bound},
      {6, "oracle equivalence", 60.0, oracle_equivalence},
      {7, "Moser chain", 60.0, moser_chain_criterion},
      {8, "counterexample blow-up", 300.0, counterexample_study},
      {9, "Robin mode", 60.0, robin_mode},
      {10, "determinism", std::numeric_limits<double>::infinity(), determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("unexpected error: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!(secs < c.budget_s)) out.fail("runtime " + fmt(secs) + " s exceeds " + fmt(c.budget_s) + " s");
    std::printf("criterion %d: %s  [%s, %.2f s] %s\n", c.id, out.pass ? "PASS" : "FAIL", c.title,
                secs, out.detail.c_str());
    std::fflush(stdout);
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}
