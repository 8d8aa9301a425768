#include "doctest.h"

#include <random>

#include "canonlab/error.hpp"
#include "canonlab/legendre.hpp"

using namespace canonlab;

namespace {

// Ψ for fiber (−2, 4) with f₀ = 3: ½(3x+2)⁺ + ½(3x−4)⁺.
PLConvexFn psi_instance() { return PLConvexFn::hinge_mean(std::vector<double>{-2.0, 4.0}, 3.0); }

/// sup_x tx − φ(x) over breakpoints and domain ends; the brute-force oracle.
double conjugate_oracle(const PLConvexFn& phi, double t) {
  std::vector<double> xs = phi.breakpoints();
  if (phi.lower()) xs.push_back(*phi.lower());
  if (phi.upper()) xs.push_back(*phi.upper());
  if (xs.empty()) xs.push_back(0.0);
  double best = -1e300;
  for (double x : xs) best = std::max(best, t * x - phi(x));
  return best;
}

PLConvexFn random_pl(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 5), coin(0, 2);
  std::uniform_real_distribution<double> u(-3.0, 3.0), inc(0.1, 2.0);
  const int k = count(rng);
  std::vector<double> b, s;
  double x = u(rng), slope = u(rng);
  s.push_back(slope);
  for (int i = 0; i < k; ++i) {
    b.push_back(x);
    x += inc(rng);
    slope += coin(rng) == 0 ? 0.0 : inc(rng);
    s.push_back(slope);
  }
  std::optional<double> lo, hi;
  if (coin(rng) == 0) lo = (b.empty() ? 0.0 : b.front()) - inc(rng);
  if (coin(rng) == 0) hi = (b.empty() ? 0.0 : b.back()) + inc(rng);
  const double ax = b.empty() ? (lo ? *lo : 0.0) : b.front();
  return PLConvexFn(lo, hi, b, s, ax, u(rng));
}

}  // namespace

TEST_CASE("conjugate examples") {
  const PLConvexFn a = conjugate(PLConvexFn::absolute());
  CHECK(a.lower() == -1.0);
  CHECK(a.upper() == 1.0);
  CHECK(a(0.3) == 0.0);
  CHECK_THROWS_AS(a(1.5), InvalidInput);

  CHECK(conjugate(psi_instance())(1.5) == doctest::Approx(-1.0).epsilon(1e-12));

  const PLConvexFn l = conjugate(PLConvexFn::linear(2.0, 1.0));
  CHECK(l.is_point());
  CHECK(*l.lower() == 2.0);
  CHECK(l(2.0) == -1.0);
}

TEST_CASE("biconjugate examples") {
  CHECK(approx_equal(biconjugate(PLConvexFn::absolute()), PLConvexFn::absolute()));
  const PLConvexFn psi = psi_instance();
  const PLConvexFn bb = biconjugate(psi);
  CHECK(approx_equal(bb, psi));
  for (double x : psi.breakpoints()) CHECK(bb(x) == doctest::Approx(psi(x)).epsilon(1e-14));
  CHECK(approx_equal(biconjugate(PLConvexFn::linear(-1.5, 2.0)), PLConvexFn::linear(-1.5, 2.0)));
}

TEST_CASE("one-sided derivatives") {
  auto d = one_sided_derivs(PLConvexFn::absolute(), 0.0);
  CHECK(*d.left == -1.0);
  CHECK(*d.right == 1.0);
  d = one_sided_derivs(PLConvexFn::absolute(), 2.0);
  CHECK(*d.left == 1.0);
  CHECK(*d.right == 1.0);
  d = one_sided_derivs(psi_instance(), -2.0 / 3.0);
  CHECK(*d.left == 0.0);
  CHECK(*d.right == doctest::Approx(1.5));
  const PLConvexFn c = conjugate(PLConvexFn::absolute());
  d = one_sided_derivs(c, 1.0);
  CHECK(d.left.has_value());
  CHECK_FALSE(d.right.has_value());
  CHECK_THROWS_AS(one_sided_derivs(c, 1.5), InvalidInput);
}

TEST_CASE("attainment examples") {
  const PLConvexFn a = PLConvexFn::absolute();
  auto r = attainment_check(a, 0.0, 0.5);
  CHECK((r.equality && r.conjugate_subgradient && r.subgradient));
  r = attainment_check(a, 2.0, 0.5);
  CHECK((!r.equality && !r.conjugate_subgradient && !r.subgradient));
  r = attainment_check(a, 2.0, 1.0);
  CHECK((r.equality && r.conjugate_subgradient && r.subgradient));
  CHECK_THROWS_AS(attainment_check(a, 0.0, 2.0), InvalidInput);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(PLConvexFn(std::nullopt, std::nullopt, {0.0}, {1.0, 0.0}, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(PLConvexFn(std::nullopt, std::nullopt, {1.0, 0.0}, {0.0, 1.0, 2.0}, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(PLConvexFn(2.0, 1.0, {}, {0.0}, 1.5, 0.0), InvalidInput);
  CHECK_THROWS_AS(PLConvexFn(0.0, 1.0, {2.0}, {0.0, 1.0}, 0.5, 0.0), InvalidInput);
  // repeated slopes merge into one canonical form
  const PLConvexFn merged(std::nullopt, std::nullopt, {0.0, 1.0}, {0.0, 1.0, 1.0}, 0.0, 0.0);
  CHECK(merged.breakpoints().size() == 1);
}

TEST_CASE("random properties") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int it = 0; it < 2000; ++it) {
    const PLConvexFn phi = random_pl(rng);
    const PLConvexFn star = conjugate(phi);
    CHECK(approx_equal(biconjugate(phi), phi, 1e-9));
    for (int k = 0; k < 5; ++k) {
      double x = u(rng), t = u(rng);
      if (phi.lower()) x = std::max(x, *phi.lower());
      if (phi.upper()) x = std::min(x, *phi.upper());
      if (star.lower()) t = std::max(t, *star.lower());
      if (star.upper()) t = std::min(t, *star.upper());
      CHECK(phi(x) + star(t) >= t * x - 1e-9);
      CHECK(star(t) == doctest::Approx(conjugate_oracle(phi, t)).epsilon(1e-12));
      CHECK(attainment_check(phi, x, t).consistent());
    }
    // monotonicity: φ + c ≥ φ pointwise gives (φ + c)* ≤ φ*
    const PLConvexFn lifted(phi.lower(), phi.upper(), phi.breakpoints(), phi.slopes(), phi.anchor_x(),
                            phi.anchor_value() + 0.5);
    const PLConvexFn ls = conjugate(lifted);
    for (double t : star.breakpoints()) CHECK(ls(t) <= star(t) + 1e-12);
  }
}
