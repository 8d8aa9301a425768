#include "canonlab/ultra.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "canonlab/error.hpp"

namespace canonlab {

namespace {

Rational dotminus(const Rational& a, const Rational& b) { return a > b ? a - b : Rational(0); }

Rational rabs(const Rational& a) { return a < Rational(0) ? -a : a; }

BigInt parse_digits(const std::string& s, std::size_t& pos, const std::string& whole) {
  const std::size_t start = pos;
  BigInt v = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    if (pos - start >= 36) throw ParseError("numeral too long in '" + whole + "'", "position " + std::to_string(pos));
    v = v * 10 + (s[pos] - '0');
    ++pos;
  }
  if (pos == start) throw ParseError("expected digits in '" + whole + "'", "position " + std::to_string(pos));
  return v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) negative = text[pos++] == '-';
  Rational q(parse_digits(text, pos, text));
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    const BigInt den = parse_digits(text, pos, text);
    if (den == 0) throw ParseError("zero denominator in '" + text + "'", "position " + std::to_string(pos));
    q /= den;
  } else if (pos < text.size() && text[pos] == '.') {
    ++pos;
    const std::size_t start = pos;
    const BigInt frac = parse_digits(text, pos, text);
    BigInt scale = 1;
    for (std::size_t i = start; i < pos; ++i) scale *= 10;
    q += Rational(frac, scale);
  }
  if (pos != text.size()) throw ParseError("trailing characters in '" + text + "'", "position " + std::to_string(pos));
  return negative ? -q : q;
}

std::string to_string(const Rational& q) {
  std::string s = q.numerator().str();
  if (q.denominator() != 1) s += "/" + q.denominator().str();
  return s;
}

PAdicContext::PAdicContext(long prime) : p_(prime) {
  if (prime < 2) throw InvalidInput("prime must be at least 2");
  for (long d = 2; d * d <= prime; ++d)
    if (prime % d == 0) throw InvalidInput(std::to_string(prime) + " is not prime");
}

long PAdicContext::valuation(const Rational& x) const {
  if (x == Rational(0)) throw InvalidInput("valuation of 0 is infinite");
  auto count = [this](BigInt v) {
    long k = 0;
    if (v < 0) v = -v;
    while (v % p_ == 0) {
      v /= p_;
      ++k;
    }
    return k;
  };
  return count(x.numerator()) - count(x.denominator());
}

Rational padic_abs(const Rational& x, const PAdicContext& ctx) {
  if (x == Rational(0)) return Rational(0);
  const long v = ctx.valuation(x);
  BigInt pk = 1;
  for (long i = 0; i < std::abs(v); ++i) pk *= ctx.prime();
  return v >= 0 ? Rational(1, pk) : Rational(pk);
}

ProjPoint ProjPoint::parse(const std::string& text) {
  if (text == "inf" || text == "∞") return infinity();
  return ProjPoint(parse_rational(text));
}

std::string ProjPoint::to_string() const { return is_infinity() ? "inf" : canonlab::to_string(*value_); }

Rational proj_distance(const ProjPoint& x, const ProjPoint& y, const PAdicContext& ctx) {
  if (x.is_infinity() && y.is_infinity()) return Rational(0);
  auto height = [&](const Rational& a) { return std::max(padic_abs(a, ctx), Rational(1)); };
  if (x.is_infinity()) return Rational(1) / height(y.value());
  if (y.is_infinity()) return Rational(1) / height(x.value());
  return padic_abs(x.value() - y.value(), ctx) / (height(x.value()) * height(y.value()));
}

Ball::Ball(ProjPoint c, Rational r) : center(std::move(c)), radius(std::move(r)) {
  if (radius < Rational(0) || radius > Rational(1)) throw InvalidInput("ball radius must lie in [0,1], got " + canonlab::to_string(radius));
}

Rational ball_distance(const Ball& a, const Ball& b, const PAdicContext& ctx) {
  const Rational d = proj_distance(a.center, b.center, ctx);
  return std::max(rabs(a.radius - b.radius), dotminus(d, std::min(a.radius, b.radius)));
}

Rational phi_ball(const ProjPoint& x, const Ball& a, const PAdicContext& ctx) {
  return dotminus(proj_distance(x, a.center, ctx), a.radius);
}

bool ball_equal(const Ball& a, const Ball& b, const PAdicContext& ctx) { return ball_distance(a, b, ctx) == Rational(0); }

SupCheck sup_formula_check(const Ball& a, const Ball& b, const std::vector<ProjPoint>& witnesses,
                           const PAdicContext& ctx) {
  if (witnesses.empty()) throw InvalidInput("witness list is empty");
  SupCheck c{Rational(0), ball_distance(a, b, ctx)};
  for (const auto& x : witnesses) c.sup = std::max(c.sup, rabs(phi_ball(x, a, ctx) - phi_ball(x, b, ctx)));
  return c;
}

std::vector<ProjPoint> standard_witnesses(const Ball& a, const Ball& b, const PAdicContext& ctx) {
  return {a.center, b.center, ProjPoint::infinity(), ProjPoint(Rational(0)), ProjPoint(Rational(1, ctx.prime()))};
}

std::vector<Ball> sample_balls(std::size_t count, const PAdicContext& ctx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  std::vector<Ball> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ProjPoint c = ProjPoint::infinity();
    if (uniform(0, 19) != 0) {
      Rational x(BigInt(uniform(-60, 60)), BigInt(uniform(1, 60)));
      const long e = uniform(-3, 3);
      for (long k = 0; k < std::abs(e); ++k) x = e > 0 ? x * ctx.prime() : x / ctx.prime();
      c = ProjPoint(x);
    }
    Rational r(0);
    switch (uniform(0, 3)) {
      case 0: r = Rational(uniform(0, 1)); break;
      case 1: {
        BigInt pk = 1;
        for (long k = uniform(1, 4); k > 0; --k) pk *= ctx.prime();
        r = Rational(1, pk);
        break;
      }
      default: r = Rational(uniform(0, 12), 12); break;
    }
    out.emplace_back(std::move(c), std::move(r));
  }
  return out;
}

TriangleReport check_triangles(const std::vector<Ball>& balls, const PAdicContext& ctx) {
  const std::size_t n = balls.size();
  std::vector<Rational> d(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = ball_distance(balls[i], balls[j], ctx);
  TriangleReport rep;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        ++rep.triples;
        const Rational &ij = d[i * n + j], &jk = d[j * n + k], &ik = d[i * n + k];
        if (ik > ij + jk || ij > ik + jk || jk > ij + ik) ++rep.violations;
      }
  return rep;
}

}  // namespace canonlab
