#pragma once

// The p-adic absolute value on ℚ, the projective-line distance and the
// metric on closed balls a_r.  All arithmetic is exact.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

namespace canonlab {

using BigInt = boost::multiprecision::checked_int128_t;
using Rational = boost::rational<BigInt>;

/// Parses "a", "-a/b" or a terminating decimal such as "0.25".
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);

class PAdicContext {
 public:
  explicit PAdicContext(long prime);

  long prime() const noexcept { return p_; }
  /// Net exponent of p in x ≠ 0.
  long valuation(const Rational& x) const;

 private:
  long p_;
};

Rational padic_abs(const Rational& x, const PAdicContext& ctx);

/// A point of ℚℙ¹: a rational or ∞.
class ProjPoint {
 public:
  ProjPoint(Rational x) : value_(std::move(x)) {}  // NOLINT(google-explicit-constructor)
  static ProjPoint infinity() { return ProjPoint(); }
  /// "inf" or a rational.
  static ProjPoint parse(const std::string& text);

  bool is_infinity() const noexcept { return !value_; }
  const Rational& value() const { return *value_; }
  bool operator==(const ProjPoint& other) const { return value_ == other.value_; }
  std::string to_string() const;

 private:
  ProjPoint() = default;
  std::optional<Rational> value_;
};

/// |x − y| / (max(|x|,1)·max(|y|,1)), and 1/max(|x|,1) against ∞.
Rational proj_distance(const ProjPoint& x, const ProjPoint& y, const PAdicContext& ctx);

struct Ball {
  ProjPoint center;
  Rational radius;

  Ball(ProjPoint c, Rational r);
};

/// |r − s| ∨ (d(a, b) ∸ (r ∧ s)).
Rational ball_distance(const Ball& a, const Ball& b, const PAdicContext& ctx);

/// d(x, a) ∸ r, the distance from x to the ball.
Rational phi_ball(const ProjPoint& x, const Ball& a, const PAdicContext& ctx);

bool ball_equal(const Ball& a, const Ball& b, const PAdicContext& ctx);

struct SupCheck {
  Rational sup;
  Rational distance;
};

SupCheck sup_formula_check(const Ball& a, const Ball& b, const std::vector<ProjPoint>& witnesses,
                           const PAdicContext& ctx);

/// Centers, ∞, 0 and 1/p: enough to realise d(a_r, b_s) in the sup formula.
std::vector<ProjPoint> standard_witnesses(const Ball& a, const Ball& b, const PAdicContext& ctx);

/// Seeded sample of balls: small rationals scaled by powers of p, the point
/// ∞, and radii from {0, 1, p^{-k}, j/12}.
std::vector<Ball> sample_balls(std::size_t count, const PAdicContext& ctx, std::uint64_t seed);

struct TriangleReport {
  std::size_t triples = 0;
  std::size_t violations = 0;
};

/// Checks all three triangle inequalities for every unordered triple.
TriangleReport check_triangles(const std::vector<Ball>& balls, const PAdicContext& ctx);

}  // namespace canonlab
