#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "support/instances.hpp"

#include "canonlab/error.hpp"
#include "canonlab/krivine.hpp"

using namespace canonlab;
using T = LatticeTerm;

namespace {

T random_term(std::mt19937_64& rng, std::size_t arity, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  std::uniform_int_distribution<std::size_t> var(0, arity - 1);
  std::uniform_int_distribution<int> num(-7, 7), den(1, 8);
  switch (pick(rng)) {
    case 0: return T::zero();
    case 1: return T::var(var(rng));
    case 2: return T::neg(random_term(rng, arity, depth - 1));
    case 3: return T::abs(random_term(rng, arity, depth - 1));
    case 4: return T::half_sum(random_term(rng, arity, depth - 1), random_term(rng, arity, depth - 1));
    case 5: return T::join(random_term(rng, arity, depth - 1), random_term(rng, arity, depth - 1));
    case 6: return T::meet(random_term(rng, arity, depth - 1), random_term(rng, arity, depth - 1));
    default: return T::scale(Rational64(num(rng), den(rng)), random_term(rng, arity, depth - 1));
  }
}

std::vector<double> unit(std::initializer_list<double> v) {
  std::vector<double> x(v);
  double s = 0;
  for (double c : x) s += c * c;
  for (double& c : x) c /= std::sqrt(s);
  return x;
}

}  // namespace

TEST_CASE("parser examples") {
  CHECK(parse_term("abs(x0)", 1) == T::abs(T::var(0)));
  CHECK(parse_term("x0 \\/ x1", 2) == T::join(T::var(0), T::var(1)));
  CHECK(parse_term("2*avg(x0, neg(x1))", 2) == T::scale(Rational64(2), T::half_sum(T::var(0), T::neg(T::var(1)))));
  CHECK(parse_term("-1/2*x0", 1) == T::scale(Rational64(-1, 2), T::var(0)));
  CHECK(parse_term("0.25*x0", 1) == T::scale(Rational64(1, 4), T::var(0)));
  CHECK(parse_term("x0 /\\ x1 \\/ 0", 2) == T::join(T::meet(T::var(0), T::var(1)), T::zero()));
  CHECK_THROWS_AS(parse_term("x2", 2), ParseError);
  CHECK_THROWS_AS(parse_term("abs(x0", 1), ParseError);
  CHECK_THROWS_AS(parse_term("x0 + x1", 2), ParseError);
  CHECK_THROWS_AS(parse_term("3", 1), ParseError);
  try {
    parse_term("avg(x0, ?)", 1);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == "position 8");
  }
}

TEST_CASE("scalar evaluation examples") {
  const double m3[] = {-3.0}, p12[] = {1.0, 2.0};
  CHECK(eval_scalar(T::abs(T::var(0)), m3) == 3.0);
  CHECK(eval_scalar(T::join(T::var(0), T::var(1)), p12) == 2.0);
  const double xm[] = {-1.0}, xp[] = {1.0};
  const T t = interpolating_term(xm, xp, 2.0, 3.0);
  CHECK(eval_scalar(t, xm) == 2.0);
  CHECK(eval_scalar(t, xp) == 3.0);
  CHECK_THROWS_AS(eval_scalar(T::var(1), xp), InvalidInput);
}

TEST_CASE("element evaluation examples") {
  const auto sp = make_space({1.0, 1.0});
  const LatticeElement f(sp, {1.0, 0.0}), g(sp, {0.0, 1.0});
  CHECK(approx_equal(eval_element(T::var(0), {f}), f));
  CHECK(approx_equal(eval_element(T::join(T::var(0), T::var(1)), {f, g}), LatticeElement(sp, {1, 1})));
  CHECK(approx_equal(eval_element(T::abs(T::var(0)), {LatticeElement(sp, {-2, 4})}), LatticeElement(sp, {2, 4})));
  CHECK_THROWS_AS(eval_element(T::join(T::var(0), T::var(1)), {f, LatticeElement(make_space({1.0}), {1.0})}),
                  InvalidInput);
}

TEST_CASE("interpolating term examples and random cases") {
  const double x[] = {1.0, 0.0}, y[] = {0.0, 1.0};
  const T t = interpolating_term(x, y, 1.0, 0.0);
  CHECK(eval_scalar(t, x) == 1.0);
  CHECK(eval_scalar(t, y) == 0.0);
  CHECK(interpolating_term(x, y, 0.0, 0.0) == T::zero());
  CHECK_THROWS_AS(interpolating_term(x, x, 1.0, 2.0), InvalidInput);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int it = 0; it < 2000; ++it) {
    const std::size_t n = 1 + it % 4;
    auto pts = sphere_samples(n, 2, rng());
    if (it % 7 == 0) {
      pts[1] = pts[0];
      pts[1][0] = -pts[1][0];
      if (pts[1][0] == pts[0][0]) continue;
    }
    const double a = g(rng), b = g(rng);
    const T s = interpolating_term(pts[0], pts[1], a, b);
    CHECK(std::abs(eval_scalar(s, pts[0]) - a) <= 1e-12 * std::max(1.0, std::abs(a)) * 10);
    CHECK(std::abs(eval_scalar(s, pts[1]) - b) <= 1e-12 * std::max(1.0, std::abs(b)) * 10);
  }
}

TEST_CASE("sup norm examples") {
  CHECK(term_sup_norm(T::var(0)) == 1.0);
  CHECK(term_sup_norm(T::join(T::var(0), T::var(1))) == 1.0);
  CHECK(term_sup_norm(T::scale(Rational64(3), T::abs(T::var(0)))) == 3.0);
  // x0 − x1 peaks at the corner (1, −1)
  CHECK(term_sup_norm(parse_term("2*avg(x0, neg(x1))", 2)) == 2.0);
  // inside the square: |x0| ∧ |x1| is 1 at the corners only
  CHECK(term_sup_norm(parse_term("abs(x0) /\\ abs(x1)", 2)) == 1.0);
  // arity three is an upper bound, within the Lipschitz slack
  const T three = parse_term("x0 \\/ x1 \\/ x2", 3);
  CHECK(term_sup_norm(three) >= 1.0);
  CHECK(term_sup_norm(three) <= 1.01);
}

TEST_CASE("random term properties") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 2.0), alpha(0.0, 5.0);
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 1 + it % 3;
    const T t = random_term(rng, n, 6);
    CHECK(parse_term(t.to_string(), n) == t);
    const CompiledTerm c(t);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(n), ax(n);
      const double a = alpha(rng);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = u(rng);
        ax[i] = a * x[i];
      }
      const double v = eval_scalar(t, x);
      CHECK(c(x) == v);
      CHECK(std::abs(eval_scalar(t, ax) - a * v) <= 1e-12 * std::max(1.0, std::abs(a * v)));
    }
    if (n <= 2) {
      // exact sup is attained on the grid-free edge walk; no grid point exceeds it
      const double s = term_sup_norm(t);
      for (int k = 0; k < 200; ++k) {
        std::vector<double> x(n);
        for (double& c2 : x) c2 = u(rng) / 2.0;
        CHECK(std::abs(eval_scalar(t, x)) <= s + 1e-12);
      }
    }
    // domination |t(f̄)| ≤ ‖t‖·⋁|f_i| atomwise
    const auto sp = make_space(std::vector<double>(7, 1.0));
    std::vector<LatticeElement> args;
    for (std::size_t i = 0; i < n; ++i) args.emplace_back(sp, testkit::random_values(rng, 7));
    const LatticeElement r = eval_element(t, args);
    const double s = term_sup_norm(t);
    for (std::size_t a = 0; a < 7; ++a) {
      double m = 0;
      for (const auto& f : args) m = std::max(m, std::abs(f[a]));
      CHECK(std::abs(r[a]) <= s * m + 1e-9);
    }
  }
}

TEST_CASE("homogeneous registry") {
  CHECK(homogeneous_by_name("euclid").arity == 2);
  CHECK(homogeneous_by_name("euclid(3)").arity == 3);
  const double pt[] = {4.0, 9.0};
  CHECK(homogeneous_by_name("geomean(0.5)").eval(pt) == doctest::Approx(6.0));
  CHECK(homogeneous_by_name("power(2,2)").eval(pt) == doctest::Approx(6.0));
  CHECK(homogeneous_by_name("halfsum_pq(1,1)").eval(pt) == doctest::Approx(6.5));
  CHECK_THROWS_AS(homogeneous_by_name("power(2,3)"), InvalidInput);
  CHECK_THROWS_AS(homogeneous_by_name("nope"), InvalidInput);
  CHECK_THROWS_AS(homogeneous_by_name("geomean(1.5)"), InvalidInput);
  for (const char* name : {"euclid", "identity", "geomean(0.3)", "power(3,1.5)", "halfsum_pq(2,3)"})
    CHECK(homogeneity_defect(homogeneous_by_name(name), 200, 1) <= 1e-12);
  // a non-homogeneous function is caught by the spot check
  HomogeneousFn bad{"square", 1, [](std::span<const double> z) { return z[0] * z[0]; }, {}};
  CHECK(homogeneity_defect(bad, 50, 0) > 0.1);
  CHECK_THROWS_AS(approximate_on_sphere(bad, 0.1, 100), InvalidInput);
}

TEST_CASE("sphere approximation") {
  SUBCASE("identity is exact") {
    const auto r = approximate_on_sphere(homogeneous_by_name("identity"), 0.01, 10);
    CHECK(r.term == T::var(0));
    CHECK(r.certified_error == 0.0);
  }
  SUBCASE("eight equiangular pieces for the euclidean norm") {
    ApproximationOptions opt;
    opt.initial_nodes = 8;
    const auto r = approximate_on_sphere(homogeneous_by_name("euclid"), 1.0, 8000, opt);
    CHECK(r.pieces == 8);
    const double bound = 1.0 - std::cos(std::numbers::pi / 8.0);
    CHECK(r.certified_error <= bound + 1e-12);
    // node values are shifted until over- and undershoot match
    const double c = std::cos(std::numbers::pi / 8.0);
    CHECK(r.certified_error == doctest::Approx((1.0 - c) / (1.0 + c)).epsilon(1e-3));
  }
  SUBCASE("reaches eps and survives a finer grid") {
    for (const char* name : {"euclid", "geomean(0.5)", "halfsum_pq(1,2)"}) {
      const HomogeneousFn phi = homogeneous_by_name(name);
      const auto r = approximate_on_sphere(phi, 0.05, 10000);
      CHECK(r.reached);
      CHECK(r.certified_error <= 0.05);
      const CompiledTerm c(r.term);
      double worst = 0;
      for (const auto& x : sphere_samples(2, 100000)) worst = std::max(worst, std::abs(c(x) - phi.eval(x)));
      CHECK(worst <= 2.0 * r.certified_error + 1e-12);
      CHECK(r.uniform_bound >= worst - 1e-12);
    }
  }
  SUBCASE("three variables") {
    ApproximationOptions opt;
    opt.max_pieces = 40;
    const auto r = approximate_on_sphere(homogeneous_by_name("euclid(3)"), 0.2, 400, opt);
    CHECK(r.certified_error <= 0.2);
    CHECK(r.term.min_arity() <= 3);
  }
  SUBCASE("budget exhaustion reports the best error") {
    ApproximationOptions opt;
    opt.max_pieces = 5;
    const auto r = approximate_on_sphere(homogeneous_by_name("euclid"), 1e-6, 1000, opt);
    CHECK_FALSE(r.reached);
    CHECK(r.certified_error > 1e-6);
    CHECK(r.pieces == 5);
  }
}

TEST_CASE("rational conversion") {
  CHECK(rational_from_double(0.75) == Rational64(3, 4));
  CHECK(rational_from_double(-6.0) == Rational64(-6));
  const double third = 1.0 / 3.0;
  const Rational64 q = rational_from_double(third);
  CHECK(static_cast<double>(q.numerator()) / static_cast<double>(q.denominator()) == third);
  CHECK_THROWS_AS(rational_from_double(std::nan("")), InvalidInput);
}
