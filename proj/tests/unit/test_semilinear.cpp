#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "semilin/error.hpp"
#include "semilin/linsolve.hpp"
#include "semilin/semilinear.hpp"
#include "suite.hpp"

using namespace semilin;
using test::load;

namespace {

const std::vector<std::string> kExtra{"lambda1", "eps", "Lmax"};

DomainPtr interval(double h) { return build_domain(DomainSpec::box(), h, {1, {0, 0, 0}, {1, 0, 0}}); }

Field constant(const DomainPtr& dom, double c) {
  return Field(dom, std::vector<double>(dom->size(), c));
}

SemilinearitySpec bare(const std::string& f) {
  SemilinearitySpec s;
  s.f = parse_expr(f, 1, kExtra).bind("lambda1", 0).bind("eps", 1).bind("Lmax", 0);
  s.h = s.h0 = s.gamma = parse_expr("0", 1);
  return s;
}

std::string interval_yaml(const std::string& f, const std::string& h = "1") {
  return "mode: solve\ndomain: {kind: box, lo: [0], hi: [1], h: 0.0625}\n"
         "problem:\n  f: \"" + f + "\"\n  h: \"" + h + "\"\n  gamma: \"abs(s)^3\"\n"
         "  epsilon: \"lambda1\"\n" +
         "solver: {tol: 1e-10, seed: 7, falsify_budget: 300}\n";
}

}  // namespace

TEST_SUITE("semilinear") {
  TEST_CASE("truncation examples") {
    const auto dom = interval(0.25);
    const auto lo = constant(dom, -1), hi = constant(dom, 2);
    CHECK(truncate_sigma(lo, hi, constant(dom, 5)).values() == std::vector<double>(3, 2.0));
    const Field mid(dom, {-0.5, 0.0, 1.75});
    CHECK(truncate_sigma(lo, hi, mid).values() == mid.values());
    const auto z = constant(dom, 0);
    CHECK(truncate_sigma(z, z, mid).values() == std::vector<double>(3, 0.0));
    CHECK_THROWS_AS(truncate_sigma(hi, lo, mid), PreconditionError);
  }

  TEST_CASE("truncation keeps sign and shrinks magnitude") {
    const auto dom = interval(1.0 / 64.0);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    Field lo(dom), hi(dom), u(dom);
    for (std::size_t i = 0; i < dom->size(); ++i) {
      lo[i] = -std::fabs(g(rng));
      hi[i] = std::fabs(g(rng));
      u[i] = 2 * g(rng);
    }
    const auto s = truncate_sigma(lo, hi, u);
    for (std::size_t i = 0; i < dom->size(); ++i) {
      CHECK(std::fabs(s[i]) <= std::fabs(u[i]));
      CHECK(s[i] * u[i] >= 0.0);
    }
  }

  TEST_CASE("truncated solve reductions") {
    const auto dom = interval(0.25);
    const auto disc = make_dirichlet(dom);
    TruncatedProblem p;
    p.disc = &disc;
    p.chi.assign(dom->size(), 1);
    p.v0 = constant(dom, -10);
    p.v1 = constant(dom, 10);

    const auto zero_spec = bare("0");
    p.spec = &zero_spec;
    p.mu = 1.0;
    const auto z = solve_truncated(p, 1.0, constant(dom, 0), 1e-12);
    for (double v : z.u.values()) CHECK(v == 0.0);

    const auto one_spec = bare("1");
    p.spec = &one_spec;
    p.mu = 0.0;
    const auto u = solve_truncated(p, 1.0, constant(dom, 0), 1e-13);
    CHECK(u.u[0] == doctest::Approx(3.0 / 32.0).epsilon(1e-10));
    CHECK(u.u[1] == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
    CHECK(u.u[2] == doctest::Approx(3.0 / 32.0).epsilon(1e-10));
  }

  TEST_CASE("truncated cubic matches the dense newton oracle") {
    const double h = 1.0 / 16.0;
    const auto dom = interval(h);
    const auto disc = make_dirichlet(dom);
    const auto spec = bare("-s^3 + 1");
    TruncatedProblem p;
    p.disc = &disc;
    p.spec = &spec;
    p.chi.assign(dom->size(), 1);
    p.v0 = constant(dom, -10);
    p.v1 = constant(dom, 10);
    const auto sol = solve_truncated(p, 1.0, constant(dom, 0), 1e-12);
    const auto oracle = test::dense_newton_interval(parse_expr("-s^3 + 1", 1), h);
    REQUIRE(oracle.converged);
    for (std::size_t i = 0; i < dom->size(); ++i) CHECK(std::fabs(sol.u[i] - oracle.u[i]) <= 1e-8);
  }

  TEST_CASE("residual norm") {
    const double h = 1.0 / 16.0;
    const auto dom = interval(h);
    const auto disc = make_dirichlet(dom);
    const auto one = bare("1");
    CHECK(residual_norm(disc, constant(dom, 0), one) ==
          doctest::Approx(std::sqrt(dom->measure())).epsilon(1e-14));
    const auto cubic = bare("-s^3 + 1");
    TruncatedProblem p;
    p.disc = &disc;
    p.spec = &cubic;
    p.chi.assign(dom->size(), 1);
    p.v0 = constant(dom, -10);
    p.v1 = constant(dom, 10);
    auto u = solve_truncated(p, 1.0, constant(dom, 0), 1e-12).u;
    const double base = residual_norm(disc, u, cubic);
    CHECK(base <= 1e-9);
    const double eta = 1e-3;
    u[7] += eta;
    const double grown = residual_norm(disc, u, cubic);
    const double stencil = eta / (h * h) * std::sqrt(h);
    CHECK(grown >= stencil);
    CHECK(grown <= 4 * stencil);
  }

  TEST_CASE("homogeneous problem has the zero solution") {
    const auto p = load(
        "mode: solve\ndomain: {kind: box, lo: [0], hi: [1], h: 0.0625}\n"
        "problem: {f: \"(lambda1 - eps)*s\", h: \"0\", epsilon: \"0.5*lambda1\"}\n");
    const auto rep = solve_semilinear(p.disc, p.problem.spec, 1e-10, test::pipeline_options(p));
    for (double v : rep.u.values()) CHECK(v == 0.0);
    for (double v : rep.vlow.values()) CHECK(v == 0.0);
    for (double v : rep.vup.values()) CHECK(v == 0.0);
  }

  TEST_CASE("cubic on the interval is positive and symmetric") {
    const auto p = load(interval_yaml("-s^3 + 1"));
    const auto rep = solve_semilinear(p.disc, p.problem.spec, 1e-10, test::pipeline_options(p));
    const std::size_t n = rep.u.nodes();
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(rep.u[i] > 0.0);
      CHECK(std::fabs(rep.u[i] - rep.u[n - 1 - i]) <= 1e-9);
      CHECK(rep.vlow[i] <= 1e-10);
      CHECK(rep.vup[i] > 0.0);
      CHECK(rep.vlow[i] - 1e-8 <= rep.u[i]);
      CHECK(rep.u[i] <= rep.vup[i] + 1e-8);
    }
    CHECK(rep.h1 <= rep.constants.C * rep.h_l2);
  }

  TEST_CASE("square levels have a constant tail after saturation") {
    const auto p = load(
        "mode: solve\ndomain: {kind: box, lo: [0, 0], hi: [1, 1], h: 0.125}\n"
        "problem: {f: \"-s^3 + 1\", h: \"1\", gamma: \"abs(s)^3\", epsilon: \"lambda1\"}\n"
        "solver: {tol: 1e-10, falsify_budget: 200}\n");
    const auto rep = solve_semilinear(p.disc, p.problem.spec, 1e-10, test::pipeline_options(p));
    REQUIRE(rep.levels.size() >= 2);
    CHECK(rep.levels.back().nodes == p.disc.nodes->size());
    CHECK(rep.levels.back().update_h1 <= 1e-10);
  }

  TEST_CASE("precondition gate") {
    const auto p = load(interval_yaml("lambda1*s + 1"));
    CHECK_THROWS_AS(solve_semilinear(p.disc, p.problem.spec, 1e-10, test::pipeline_options(p)),
                    PreconditionError);
  }

  TEST_CASE("uniqueness probe") {
    const auto lin = load(
        "mode: solve\ndomain: {kind: box, lo: [0], hi: [1], h: 0.0625}\n"
        "problem: {f: \"0.5*lambda1*s + x1\", h: \"x1\", epsilon: \"0.5*lambda1\"}\n");
    const auto a = uniqueness_probe(lin.disc, lin.problem.spec, 3, 1e-10, 5,
                                    test::pipeline_options(lin));
    CHECK(a.pass);
    CHECK(a.max_distance <= a.threshold);

    const auto cubic = load(interval_yaml("-s^3 + 1"));
    CHECK(uniqueness_probe(cubic.disc, cubic.problem.spec, 3, 1e-10, 5,
                           test::pipeline_options(cubic))
              .pass);

    const auto wiggle = load(interval_yaml("-s^3 + 1 + 2*sin(s)", "3"));
    CHECK_THROWS_AS(uniqueness_probe(wiggle.disc, wiggle.problem.spec, 3, 1e-10, 5,
                                     test::pipeline_options(wiggle)),
                    PreconditionError);
  }
}
