#include "doctest.h"

#include <random>

#include "canonlab/error.hpp"
#include "canonlab/ultra.hpp"

using namespace canonlab;

namespace {
Rational q(const char* s) { return parse_rational(s); }
}  // namespace

TEST_CASE("rational parsing") {
  CHECK(q("12") == Rational(12));
  CHECK(q("-3/6") == Rational(-1, 2));
  CHECK(q("0.25") == Rational(1, 4));
  CHECK(q("-1.5") == Rational(-3, 2));
  CHECK(to_string(Rational(-1, 2)) == "-1/2");
  CHECK_THROWS_AS(q("1/0"), InvalidInput);
  CHECK_THROWS_AS(q("abc"), InvalidInput);
  CHECK(ProjPoint::parse("inf").is_infinity());
}

TEST_CASE("valuation examples") {
  const PAdicContext two(2), three(3);
  CHECK(padic_abs(Rational(12), two) == Rational(1, 4));
  CHECK(padic_abs(Rational(12), three) == Rational(1, 3));
  CHECK(padic_abs(Rational(0), two) == Rational(0));
  CHECK(padic_abs(Rational(1, 8), two) == Rational(8));
  CHECK_THROWS_AS(PAdicContext(4), InvalidInput);
  CHECK_THROWS_AS(PAdicContext(1), InvalidInput);
}

TEST_CASE("distance examples") {
  const PAdicContext two(2);
  CHECK(proj_distance(Rational(2), Rational(1, 2), two) == Rational(1));
  CHECK(proj_distance(Rational(1, 2), ProjPoint::infinity(), two) == Rational(1, 2));
  CHECK(proj_distance(ProjPoint::infinity(), ProjPoint::infinity(), two) == Rational(0));
  CHECK(phi_ball(Rational(2), Ball(Rational(1, 2), Rational(1, 2)), two) == Rational(1, 2));
  const Ball a(Rational(0), Rational(1, 4)), b(Rational(4), Rational(1, 4));
  CHECK(ball_equal(a, b, two));
  CHECK_FALSE(ball_equal(a, Ball(Rational(0), Rational(1, 2)), two));
  CHECK(ball_distance(Ball(Rational(3), Rational(1)), Ball(ProjPoint::infinity(), Rational(1)), two) == Rational(0));
  CHECK(ball_distance(a, Ball(Rational(0), Rational(3, 4)), two) == Rational(1, 2));
  CHECK_THROWS_AS(Ball(Rational(0), Rational(3, 2)), InvalidInput);
  CHECK_THROWS_AS(sup_formula_check(a, b, {}, two), InvalidInput);
}

TEST_CASE("sampled metric properties") {
  for (long p : {2L, 3L, 5L}) {
    const PAdicContext ctx(p);
    const auto balls = sample_balls(40, ctx, 7);
    CHECK(balls.size() == 40);
    const auto tri = check_triangles(balls, ctx);
    CHECK(tri.triples == 40 * 39 * 38 / 6);
    CHECK(tri.violations == 0);
    for (const auto& a : balls)
      for (const auto& b : balls) {
        const Rational d = ball_distance(a, b, ctx);
        CHECK(d == ball_distance(b, a, ctx));
        CHECK(ball_equal(a, b, ctx) == (d == Rational(0)));
        const auto sc = sup_formula_check(a, b, standard_witnesses(a, b, ctx), ctx);
        CHECK(sc.sup == sc.distance);
        // phi_ball is 1-Lipschitz in the point
        const Rational dx = proj_distance(a.center, b.center, ctx);
        const Rational gap = phi_ball(a.center, b, ctx) - phi_ball(b.center, b, ctx);
        CHECK((gap < Rational(0) ? -gap : gap) <= dx);
        CHECK(dx >= Rational(0));
        CHECK(dx <= Rational(1));
      }
  }
}
