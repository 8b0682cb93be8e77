#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include "doctest.h"
#include "semilin/expr.hpp"

using namespace semilin;

TEST_SUITE("expr") {
  TEST_CASE("grammar exercise parses and lists its variables") {
    const Expr e = parse_expr("(1 - 2)*s - s^3 + 0.5*gnorm", 1);
    CHECK(e.free_variables() == std::vector<std::string>{"s", "gnorm"});
    CHECK(e.eval({{"s", 2.0}, {"gnorm", 4.0}}) == doctest::Approx(-2.0 - 8.0 + 2.0));
    CHECK_NOTHROW(parse_expr("sign(s)*min(s^2, 1)", 1));
  }

  TEST_CASE("unknown identifier names the offender") {
    try {
      parse_expr("abs(s)*x3", 2);
      FAIL("expected an error");
    } catch (const ExprError& err) {
      CHECK(err.kind() == ExprError::Kind::UnknownIdentifier);
      CHECK(err.identifier() == "x3");
    }
  }

  TEST_CASE("syntax errors carry a position") {
    try {
      parse_expr("s + * 2", 1);
      FAIL("expected an error");
    } catch (const ExprError& err) {
      CHECK(err.kind() == ExprError::Kind::Syntax);
      CHECK(err.position() == 4);
    }
    CHECK_THROWS_AS(parse_expr("(s + 1", 1), ExprError);
    CHECK_THROWS_AS(parse_expr("min(s)", 1), ExprError);
    CHECK_THROWS_AS(parse_expr("", 1), ExprError);
  }

  TEST_CASE("pointwise examples") {
    CHECK(parse_expr("s^2", 1).eval({{"s", 3.0}}) == 9.0);
    CHECK(parse_expr("pospart(s)", 1).eval({{"s", -2.0}}) == 0.0);
    CHECK(parse_expr("sign(s)", 1).eval({{"s", 0.0}}) == 0.0);
    CHECK(parse_expr("-2^2", 1).eval({{"s", 0.0}}) == -4.0);
    CHECK(parse_expr("2^3^2", 1).eval({{"s", 0.0}}) == 512.0);
  }

  TEST_CASE("domain and unbound errors") {
    auto kind_of = [](const char* text, double s) {
      try {
        parse_expr(text, 1).eval({{"s", s}});
      } catch (const ExprError& err) {
        return static_cast<int>(err.kind());
      }
      return -1;
    };
    CHECK(kind_of("sqrt(s)", -1.0) == static_cast<int>(ExprError::Kind::Domain));
    CHECK(kind_of("1/s", 0.0) == static_cast<int>(ExprError::Kind::Domain));
    CHECK(kind_of("s^0.5", -4.0) == static_cast<int>(ExprError::Kind::Domain));
    CHECK(parse_expr("s^3", 1).eval({{"s", -2.0}}) == -8.0);
    CHECK_THROWS_AS(parse_expr("s + x1", 1).eval({{"s", 1.0}}), ExprError);
  }

  TEST_CASE("builtin table") {
    struct Row {
      Builtin fn;
      double a, b, expected;
    };
    const double e = std::exp(1.0);
    const std::vector<Row> rows = {
        {Builtin::Abs, -3.5, 0, 3.5},          {Builtin::Abs, 0.0, 0, 0.0},
        {Builtin::Abs, 2.25, 0, 2.25},         {Builtin::Sign, -7.0, 0, -1.0},
        {Builtin::Sign, 0.0, 0, 0.0},          {Builtin::Sign, 1e-300, 0, 1.0},
        {Builtin::Min, 1.0, 2.0, 1.0},         {Builtin::Min, -1.0, -2.0, -2.0},
        {Builtin::Max, 1.0, 2.0, 2.0},         {Builtin::Max, -1.0, -2.0, -1.0},
        {Builtin::Exp, 0.0, 0, 1.0},           {Builtin::Exp, 1.0, 0, e},
        {Builtin::Exp, -1.0, 0, 1.0 / e},      {Builtin::Sin, 0.0, 0, 0.0},
        {Builtin::Sin, M_PI / 2, 0, 1.0},      {Builtin::Sin, M_PI / 6, 0, 0.5},
        {Builtin::Cos, 0.0, 0, 1.0},           {Builtin::Cos, M_PI / 3, 0, 0.5},
        {Builtin::Cos, M_PI, 0, -1.0},         {Builtin::Sqrt, 4.0, 0, 2.0},
        {Builtin::Sqrt, 0.0, 0, 0.0},          {Builtin::Sqrt, 2.25, 0, 1.5},
        {Builtin::PosPart, -2.0, 0, 0.0},      {Builtin::PosPart, 3.0, 0, 3.0},
        {Builtin::PosPart, 0.0, 0, 0.0},
    };
    for (const auto& r : rows) {
      CAPTURE(static_cast<int>(r.fn));
      CAPTURE(r.a);
      CHECK(std::fabs(apply_builtin(r.fn, r.a, r.b) - r.expected) <= 1e-15);
    }
  }

  TEST_CASE("printing round-trips to an identical tree") {
    const char* sources[] = {"(1 - 2)*s - s^3 + 0.5*gnorm", "sign(s)*min(s^2, 1)",
                             "-x1 + -(-s)/2", "max(abs(xi1), sqrt(pospart(x2)))*exp(-s^2)",
                             "2^3^2 - cos(sin(gnorm))"};
    for (const char* src : sources) {
      const Expr a = parse_expr(src, 2);
      const Expr b = parse_expr(a.to_string(), 2);
      CHECK_MESSAGE(a == b, src);
      CHECK(b.to_string() == a.to_string());
    }
  }

  TEST_CASE("evaluation is bitwise deterministic") {
    const Expr e = parse_expr("sin(s)*exp(x1) + s^3/(1 + gnorm)", 1);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> slots{u(rng), u(rng), u(rng), std::fabs(u(rng))};
      const double a = e.eval(slots);
      const double b = e.eval(slots);
      CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    }
  }

  TEST_CASE("bind substitutes extra names") {
    const Expr e = parse_expr("lambda1*s + Lmax", 1, {"lambda1", "Lmax"});
    CHECK(e.uses("lambda1"));
    const Expr b = e.bind("lambda1", 2.0).bind("Lmax", 1.0);
    CHECK_FALSE(b.uses("lambda1"));
    CHECK(b.eval({{"s", 3.0}}) == 7.0);
  }
}
