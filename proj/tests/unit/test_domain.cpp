#include <cmath>

#include "doctest.h"
#include "semilin/domain.hpp"
#include "semilin/error.hpp"

using namespace semilin;

namespace {

Box box1(double lo, double hi) { return {1, {lo, 0, 0}, {hi, 0, 0}}; }
Box box2(double lo0, double lo1, double hi0, double hi1) {
  return {2, {lo0, lo1, 0}, {hi0, hi1, 0}};
}

void check_face_consistency(const GridDomain& dom) {
  std::vector<int> faces(dom.size(), 0);
  for (const auto& f : dom.boundary_faces()) {
    faces[static_cast<std::size_t>(f.row)] += 1;
    CHECK(dom.neighbor(f.row, f.axis, f.dir) == -1);
  }
  for (std::size_t r = 0; r < dom.size(); ++r) {
    int inner = 0;
    for (int a = 0; a < dom.dim(); ++a)
      for (int dir : {-1, 1}) inner += dom.neighbor(static_cast<int>(r), a, dir) >= 0;
    CHECK(inner + faces[r] == 2 * dom.dim());
  }
}

}  // namespace

TEST_SUITE("domain") {
  TEST_CASE("interval and square counts") {
    const auto line = build_domain(DomainSpec::box(), 0.25, box1(0, 1));
    REQUIRE(line->size() == 3);
    CHECK(line->coords(0)[0] == 0.25);
    CHECK(line->coords(1)[0] == 0.5);
    CHECK(line->coords(2)[0] == 0.75);
    CHECK(line->cell_volume() == 0.25);
    const auto square = build_domain(DomainSpec::box(), 0.25, box2(0, 0, 1, 1));
    CHECK(square->size() == 9);
    CHECK(square->measure() == doctest::Approx(9.0 / 16.0));
  }

  TEST_CASE("empty indicator is rejected") {
    CHECK_THROWS_AS(build_domain(DomainSpec::from_indicator(parse_expr("-1", 2)), 0.25,
                                 box2(0, 0, 1, 1)),
                    DomainError);
    CHECK_THROWS_AS(DomainSpec::from_indicator(parse_expr("s", 1)), DomainError);
  }

  TEST_CASE("row map is a bijection") {
    const auto dom = build_domain(DomainSpec::disk({0, 0, 0}, 1.0), 0.1, box2(-1, -1, 1, 1));
    for (std::size_t r = 0; r < dom->size(); ++r)
      CHECK(dom->row_at(dom->lattice_index(static_cast<int>(r))) == static_cast<int>(r));
  }

  TEST_CASE("boundary faces balance the neighbours") {
    check_face_consistency(*build_domain(DomainSpec::box(), 0.25, box1(0, 1)));
    check_face_consistency(*build_domain(DomainSpec::l_shape(), 0.125, box2(0, 0, 2, 2)));
    check_face_consistency(
        *build_domain(DomainSpec::annulus({0, 0, 0}, 0.3, 1.0), 0.1, box2(-1, -1, 1, 1)));
    check_face_consistency(*build_domain(
        DomainSpec::from_indicator(parse_expr("1 - x1^2 - 2*x2^2 - x3^2", 3)), 0.2,
        {3, {-1, -1, -1}, {1, 1, 1}}));
  }

  TEST_CASE("primitives match their indicators") {
    const Box b = box2(-1, -1, 1, 1);
    const auto disk = build_domain(DomainSpec::disk({0, 0, 0}, 0.67), 0.1, b);
    const auto ind =
        build_domain(DomainSpec::from_indicator(parse_expr("0.4489 - x1^2 - x2^2", 2)), 0.1, b);
    CHECK(disk->same_nodes(*ind));
    const auto u = build_domain(
        DomainSpec::union_of_boxes({box2(-1, -1, 0, 0), box2(-0.5, -0.5, 1, 1)}), 0.25, b);
    for (std::size_t r = 0; r < u->size(); ++r) {
      const auto x = u->coords(static_cast<int>(r));
      const bool first = x[0] < 0 && x[1] < 0;
      const bool second = x[0] > -0.5 && x[1] > -0.5;
      CHECK((first || second));
    }
  }

  TEST_CASE("exhaustion is monotone and saturates") {
    const auto dom = build_domain(DomainSpec::l_shape(), 0.125, box2(0, 0, 2, 2));
    DomainPtr prev;
    bool saturated = false;
    for (int k = 1; k <= 12; ++k) {
      const auto level = exhaustion(*dom, k, 0.2);
      if (!level) continue;
      if (prev) {
        const auto mask = node_mask(*level, *prev);
        std::size_t inside = 0;
        for (char c : mask) inside += c != 0;
        CHECK(inside == prev->size());
      }
      saturated = level->same_nodes(*dom);
      prev = level;
    }
    CHECK(saturated);
  }

  TEST_CASE("strip truncated at k = 3") {
    const auto strip = build_domain(DomainSpec::box(), 0.25, box2(0, -10, 1, 10));
    const auto level = exhaustion(*strip, 3, 1.0);
    REQUIRE(level);
    std::size_t expected = 0;
    for (std::size_t r = 0; r < strip->size(); ++r)
      expected += std::fabs(strip->coords(static_cast<int>(r))[1]) < 3.0;
    for (std::size_t r = 0; r < level->size(); ++r)
      CHECK(std::fabs(level->coords(static_cast<int>(r))[1]) < 3.0);
    CHECK(level->size() + 2 * 3 >= expected);
  }

  TEST_CASE("robin closure adds the exterior neighbours") {
    const auto line = build_domain(DomainSpec::box(), 0.5, box1(0, 1));
    const auto closure = robin_closure(*line);
    CHECK(closure->size() == 3);
    CHECK(closure->boundary_faces().size() == 2);
  }
}
