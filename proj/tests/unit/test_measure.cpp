#include "doctest.h"
#include "support/instances.hpp"

#include "canonlab/error.hpp"
#include "canonlab/measure.hpp"

using namespace canonlab;

namespace {

SpacePtr halves() { return make_space({0.5, 0.5}); }

}  // namespace

TEST_CASE("measure space rejects bad weights") {
  CHECK_THROWS_AS(MeasureSpace({}), InvalidInput);
  CHECK_THROWS_AS(MeasureSpace({1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(MeasureSpace({-1.0}), InvalidInput);
  CHECK_THROWS_AS(MeasureSpace({std::nan("")}), InvalidInput);
}

TEST_CASE("lp norm examples") {
  const LatticeElement f(halves(), {-2.0, 4.0});
  CHECK(lp_norm(LatticeElement::zero(halves()), 1.0) == 0.0);
  CHECK(lp_norm(f, 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
  CHECK_THROWS_AS(lp_norm(f, 0.5), InvalidInput);
  const LatticeElement g(halves(), {0.0, 2.0});
  CHECK(lp_distance(f, g, 1.0) == doctest::Approx(0.5 * (0.5 * 2 + 0.5 * 2)));
}

TEST_CASE("pointwise lattice operations") {
  const auto sp = halves();
  const LatticeElement a(sp, {-3.0, 2.0});
  CHECK(approx_equal(abs(a), LatticeElement(sp, {3.0, 2.0})));
  CHECK(approx_equal(dotminus(LatticeElement(sp, {1, 5}), LatticeElement(sp, {3, 2})), LatticeElement(sp, {0, 3})));
  CHECK(approx_equal(join(a, a), a));
  CHECK(approx_equal(lattice_op(LatticeOp::Scale, a, nullptr, -2.0), LatticeElement(sp, {6.0, -4.0})));
  const LatticeElement other(make_space({1.0}), {1.0});
  CHECK_THROWS_AS(join(a, other), InvalidInput);
  CHECK_THROWS_AS(lattice_op(LatticeOp::Meet, a), InvalidInput);
}

TEST_CASE("signed power convention") {
  CHECK(signed_power(-7.0, 2.0) == -49.0);
  CHECK(signed_power(4.0, 0.5) == 2.0);
  CHECK(signed_power(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(signed_power(1.0, 0.0), InvalidInput);
}

TEST_CASE("conditional expectation examples") {
  const auto sp = make_space({1.0, 3.0});
  CHECK(approx_equal(cond_exp(LatticeElement(sp, {4.0, 0.0}), SubStructure::trivial(2)),
                     LatticeElement::constant(sp, 1.0)));
  CHECK(approx_equal(cond_exp(LatticeElement(halves(), {-2, 4}), SubStructure::trivial(2)),
                     LatticeElement::constant(halves(), 1.0)));
  const LatticeElement c(sp, {2.0, 2.0});
  CHECK(approx_equal(cond_exp(c, SubStructure::trivial(2)), c));
  // off-support atoms are zero
  const auto sp3 = make_space({1, 1, 1});
  CHECK(approx_equal(cond_exp(LatticeElement(sp3, {1, 3, 9}), SubStructure({{0, 1}})),
                     LatticeElement(sp3, {2, 2, 0})));
  CHECK_THROWS_AS(SubStructure({{0}, {}}), InvalidInput);
  CHECK_THROWS_AS(SubStructure({{0, 1}, {1}}), InvalidInput);
}

TEST_CASE("band decomposition and orthogonality examples") {
  const auto sp = make_space({1, 1, 1});
  const LatticeElement f(sp, {1, 2, 3});
  const BandParts b = band_decompose(f, SubStructure({{0, 1}}));
  CHECK(approx_equal(b.inside, LatticeElement(sp, {1, 2, 0})));
  CHECK(approx_equal(b.outside, LatticeElement(sp, {0, 0, 3})));
  CHECK(orthogonal(LatticeElement(halves(), {1, 0}), LatticeElement(halves(), {0, 1})));
  CHECK_FALSE(orthogonal(LatticeElement(halves(), {1, 1}), LatticeElement(halves(), {0, 1})));
  CHECK(orthogonal(f, LatticeElement::zero(sp)));
}

TEST_CASE("extension pair layout") {
  const ExtensionPair pair({0.5, 1.5}, 4, true);
  CHECK(pair.total_space()->size() == 16);
  CHECK(pair.total_space()->weight(pair.cell(1, 2)) == doctest::Approx(1.5 / 4));
  CHECK(pair.total_space()->weight(pair.plus_cell(0)) == doctest::Approx(0.25));
  const LatticeElement g(pair.base_space(), {3.0, -1.0});
  const LatticeElement e = pair.embed(g);
  CHECK(approx_equal(pair.fiber_mean(e), g));
  CHECK(pair.plus_fiber(e)[0] == 0.0);
  CHECK_THROWS_AS(pair.from_rows({{1, 2, 3}, {1, 2, 3, 4}}), InvalidInput);
}

TEST_CASE("properties on random instances") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 200; ++it) {
    const ExtensionPair pair = testkit::random_pair(rng, 6, 5, it % 2 == 0);
    const LatticeElement f = testkit::random_element(rng, pair), g = testkit::random_element(rng, pair),
                         h = testkit::random_element(rng, pair);
    const SubStructure s = pair.base_structure();
    const LatticeElement e = cond_exp(f, s);
    for (double p : {1.0, 1.5, 2.0, 3.0}) CHECK(lp_norm(e, p) <= lp_norm(f, p) + 1e-12);
    for (const auto& block : s.blocks()) {
      double a = 0, b = 0;
      for (std::size_t i : block) {
        a += f.space()->weight(i) * f[i];
        b += f.space()->weight(i) * e[i];
      }
      CHECK(std::abs(a - b) <= kTolerance);
    }
    const BandParts bp = band_decompose(f, s);
    CHECK(approx_equal(bp.inside + bp.outside, f, 0.0));
    CHECK(orthogonal(bp.inside, bp.outside));
    // absorption and positive-scaling distributivity
    CHECK(approx_equal(join(f, meet(f, g)), f, 0.0));
    CHECK(approx_equal(meet(f, join(f, g)), f, 0.0));
    CHECK(approx_equal(join(f, g) * 2.5, join(f * 2.5, g * 2.5), 1e-12));
    CHECK(approx_equal(join(f, meet(g, h)), meet(join(f, g), join(f, h)), 0.0));
    CHECK(approx_equal(positive_part(f) - negative_part(f), f, 1e-15));
  }
}
