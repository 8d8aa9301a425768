#include "doctest.h"

#include <random>

#include "canonlab/error.hpp"
#include "canonlab/hilbert.hpp"

using namespace canonlab;
using Eigen::VectorXd;

namespace {

VectorXd gauss(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g;
  VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
  return v;
}

Subspace random_subspace(std::mt19937_64& rng, std::size_t d) {
  const std::size_t k = rng() % (d + 1);
  std::vector<VectorXd> span;
  for (std::size_t i = 0; i < k; ++i) span.push_back(gauss(rng, d));
  return Subspace::span(d, span);
}

}  // namespace

TEST_CASE("worked instance") {
  const Subspace e(3, {VectorXd::Unit(3, 0)});
  const VectorXd v = (VectorXd(3) << 1, 2, 3).finished(), u = (VectorXd(3) << 5, 0, 0).finished();
  const auto c = phi_identity_check({v}, {1.0}, u, e);
  CHECK(c.lhs == doctest::Approx(49.0));
  CHECK(c.rhs == doctest::Approx(14.0 - 1.0 + 36.0));
  const auto cb = hs_cb({v}, e);
  CHECK(cb.gram(0, 0) == doctest::Approx(14.0));
  CHECK(cb.projections[0](0) == doctest::Approx(1.0));
  CHECK(phi_from_base(cb, {1.0}, u) == doctest::Approx(49.0));
  CHECK_THROWS_AS(phi_identity_check({v}, {1.0}, v, e), InvalidInput);
  CHECK_THROWS_AS(Subspace(3, {(VectorXd(3) << 1, 1, 0).finished()}), InvalidInput);
}

TEST_CASE("random identity and projection properties") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 300; ++it) {
    const std::size_t d = 1 + rng() % 10;
    const Subspace e = random_subspace(rng, d);
    std::vector<VectorXd> vs;
    std::vector<double> lambda;
    for (std::size_t i = 0; i < 1 + rng() % 4; ++i) {
      vs.push_back(gauss(rng, d));
      lambda.push_back(std::normal_distribution<double>()(rng));
    }
    VectorXd u = project(gauss(rng, d), e);
    const auto c = phi_identity_check(vs, lambda, u, e);
    CHECK(std::abs(c.lhs - c.rhs) <= 1e-9 * std::max(1.0, c.lhs));
    CHECK(std::abs(phi_from_base(hs_cb(vs, e), lambda, u) - c.lhs) <= 1e-9 * std::max(1.0, c.lhs));
    const VectorXd a = gauss(rng, d), b = gauss(rng, d);
    CHECK(std::abs(project(a, e).dot(b) - a.dot(project(b, e))) <= 1e-9);
    CHECK((project(project(a, e), e) - project(a, e)).norm() <= 1e-9);
    CHECK(e.contains(project(a, e)));
    if (e.basis().size() < d) {
      const auto w = non_uniformity_witness(vs, e);
      const auto h1 = hs_cb(w.first, e), h2 = hs_cb(w.second, e);
      for (std::size_t i = 0; i < vs.size(); ++i) CHECK((h1.projections[i] - h2.projections[i]).norm() <= 1e-9);
      CHECK_FALSE(h1.equals(h2));
      CHECK(std::abs(w.phi_first - w.phi_second) > 1e-6);
    } else {
      CHECK_THROWS_AS(non_uniformity_witness(vs, e), InvalidInput);
    }
  }
}
