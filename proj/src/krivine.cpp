#include "canonlab/krivine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Dense>

#include "canonlab/error.hpp"

namespace canonlab {

Rational64 rational_from_double(double x) {
  if (!std::isfinite(x)) throw InvalidInput("cannot convert a non-finite scalar to a rational");
  if (x == 0.0) return Rational64(0);
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant · 2^exp, 0.5 ≤ |mant| < 1
  auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  int e = exp - 53;
  while (e < 0 && (m % 2) == 0) {
    m /= 2;
    ++e;
  }
  if (e >= 0) {
    if (e > 62 || std::abs(m) > (std::numeric_limits<std::int64_t>::max() >> e))
      throw InvalidInput("scalar too large for a 64-bit rational");
    return Rational64(m * (std::int64_t{1} << e));
  }
  if (-e <= 62) return Rational64(m, std::int64_t{1} << -e);
  const double scaled = std::round(std::ldexp(x, 62));
  return Rational64(static_cast<std::int64_t>(scaled), std::int64_t{1} << 62);
}

// ---------------------------------------------------------------------------

struct LatticeTerm::Node {
  TermKind kind;
  std::size_t index = 0;
  Rational64 q{0};
  std::vector<LatticeTerm> kids;
  std::size_t arity = 0;
};

namespace {

std::string rational_text(const Rational64& q) {
  std::string s = std::to_string(q.numerator());
  if (q.denominator() != 1) s += "/" + std::to_string(q.denominator());
  return s;
}

}  // namespace

LatticeTerm LatticeTerm::zero() {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Zero;
  return LatticeTerm(std::move(n));
}

LatticeTerm LatticeTerm::var(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Var;
  n->index = index;
  n->arity = index + 1;
  return LatticeTerm(std::move(n));
}

namespace {

template <class NodeT, class TermT>
std::shared_ptr<NodeT> make_node(TermKind kind, std::vector<TermT> kids) {
  auto n = std::make_shared<NodeT>();
  n->kind = kind;
  for (const auto& k : kids) n->arity = std::max(n->arity, k.min_arity());
  n->kids = std::move(kids);
  return n;
}

}  // namespace

LatticeTerm LatticeTerm::neg(LatticeTerm t) { return LatticeTerm(make_node<Node>(TermKind::Neg, std::vector{std::move(t)})); }
LatticeTerm LatticeTerm::abs(LatticeTerm t) { return LatticeTerm(make_node<Node>(TermKind::Abs, std::vector{std::move(t)})); }
LatticeTerm LatticeTerm::half_sum(LatticeTerm a, LatticeTerm b) {
  return LatticeTerm(make_node<Node>(TermKind::HalfSum, std::vector{std::move(a), std::move(b)}));
}
LatticeTerm LatticeTerm::join(LatticeTerm a, LatticeTerm b) {
  return LatticeTerm(make_node<Node>(TermKind::Join, std::vector{std::move(a), std::move(b)}));
}
LatticeTerm LatticeTerm::meet(LatticeTerm a, LatticeTerm b) {
  return LatticeTerm(make_node<Node>(TermKind::Meet, std::vector{std::move(a), std::move(b)}));
}
LatticeTerm LatticeTerm::scale(Rational64 q, LatticeTerm t) {
  auto n = make_node<Node>(TermKind::Scale, std::vector{std::move(t)});
  n->q = q;
  return LatticeTerm(std::move(n));
}

LatticeTerm LatticeTerm::positive_part(LatticeTerm t) { return join(std::move(t), zero()); }
LatticeTerm LatticeTerm::negative_part(LatticeTerm t) { return join(neg(std::move(t)), zero()); }

LatticeTerm LatticeTerm::linear(std::span<const double> c) {
  if (c.empty()) return zero();
  // Balanced sum tree: a + b = 2·avg(a, b).
  std::vector<LatticeTerm> level;
  for (std::size_t i = 0; i < c.size(); ++i) level.push_back(scale(rational_from_double(c[i]), var(i)));
  while (level.size() > 1) {
    std::vector<LatticeTerm> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2)
      next.push_back(scale(Rational64(2), half_sum(level[i], level[i + 1])));
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

TermKind LatticeTerm::kind() const { return node_->kind; }
std::size_t LatticeTerm::var_index() const { return node_->index; }
const Rational64& LatticeTerm::scalar() const { return node_->q; }
const LatticeTerm& LatticeTerm::lhs() const { return node_->kids.at(0); }
const LatticeTerm& LatticeTerm::rhs() const { return node_->kids.at(1); }
std::size_t LatticeTerm::min_arity() const { return node_->arity; }

std::size_t LatticeTerm::node_count() const {
  std::unordered_set<const void*> seen;
  std::vector<const LatticeTerm*> stack{this};
  while (!stack.empty()) {
    const LatticeTerm* t = stack.back();
    stack.pop_back();
    if (!seen.insert(t->identity()).second) continue;
    for (const auto& k : t->node_->kids) stack.push_back(&k);
  }
  return seen.size();
}

std::string LatticeTerm::to_string() const {
  switch (kind()) {
    case TermKind::Zero: return "0";
    case TermKind::Var: return "x" + std::to_string(var_index());
    case TermKind::Neg: return "neg(" + lhs().to_string() + ")";
    case TermKind::Abs: return "abs(" + lhs().to_string() + ")";
    case TermKind::HalfSum: return "avg(" + lhs().to_string() + ", " + rhs().to_string() + ")";
    case TermKind::Join: return "(" + lhs().to_string() + " \\/ " + rhs().to_string() + ")";
    case TermKind::Meet: return "(" + lhs().to_string() + " /\\ " + rhs().to_string() + ")";
    case TermKind::Scale: return rational_text(scalar()) + "*" + lhs().to_string();
  }
  return {};
}

bool LatticeTerm::operator==(const LatticeTerm& o) const {
  if (node_ == o.node_) return true;
  if (kind() != o.kind()) return false;
  switch (kind()) {
    case TermKind::Zero: return true;
    case TermKind::Var: return var_index() == o.var_index();
    case TermKind::Scale: return scalar() == o.scalar() && lhs() == o.lhs();
    case TermKind::Neg:
    case TermKind::Abs: return lhs() == o.lhs();
    default: return lhs() == o.lhs() && rhs() == o.rhs();
  }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class TermParser {
 public:
  TermParser(const std::string& text, std::size_t arity) : s_(text), arity_(arity) {}

  LatticeTerm parse() {
    LatticeTerm t = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("term syntax error: " + what, "position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool starts(const char* tok) {
    skip_ws();
    return s_.compare(pos_, std::char_traits<char>::length(tok), tok) == 0;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  LatticeTerm expr() {
    LatticeTerm t = unary();
    for (;;) {
      if (starts("\\/")) {
        pos_ += 2;
        t = LatticeTerm::join(t, unary());
      } else if (starts("/\\")) {
        pos_ += 2;
        t = LatticeTerm::meet(t, unary());
      } else {
        return t;
      }
    }
  }

  bool at_number() {
    skip_ws();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '-' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]));
  }

  std::int64_t digits() {
    const std::size_t start = pos_;
    std::int64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      if (pos_ - start >= 18) fail("numeral too long");
      v = v * 10 + (s_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("expected digits");
    return v;
  }

  Rational64 number() {
    skip_ws();
    bool negative = false;
    if (s_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    Rational64 q(digits());
    if (pos_ + 1 < s_.size() && s_[pos_] == '/' && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      const std::int64_t den = digits();
      if (den == 0) fail("zero denominator");
      q /= den;
    } else if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      const std::size_t start = pos_;
      const std::int64_t frac = digits();
      std::int64_t scale = 1;
      for (std::size_t i = start; i < pos_; ++i) scale *= 10;
      q += Rational64(frac, scale);
    }
    return negative ? -q : q;
  }

  LatticeTerm unary() {
    if (at_number()) {
      const std::size_t at = pos_;
      const Rational64 q = number();
      if (starts("*")) {
        ++pos_;
        return LatticeTerm::scale(q, unary());
      }
      if (q.numerator() == 0) return LatticeTerm::zero();
      pos_ = at;
      fail("constant other than 0 must scale a term");
    }
    return primary();
  }

  LatticeTerm primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] == '(') {
      ++pos_;
      LatticeTerm t = expr();
      expect(')');
      return t;
    }
    if (s_[pos_] == 'x' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      const std::size_t at = pos_;
      ++pos_;
      const auto idx = static_cast<std::size_t>(digits());
      if (idx >= arity_) {
        pos_ = at;
        fail("variable x" + std::to_string(idx) + " out of range for arity " + std::to_string(arity_));
      }
      return LatticeTerm::var(idx);
    }
    for (const char* fn : {"neg", "abs", "avg"}) {
      if (starts(fn)) {
        pos_ += 3;
        expect('(');
        LatticeTerm a = expr();
        if (fn[1] == 'v') {
          expect(',');
          LatticeTerm b = expr();
          expect(')');
          return LatticeTerm::half_sum(std::move(a), std::move(b));
        }
        expect(')');
        return fn[0] == 'n' ? LatticeTerm::neg(std::move(a)) : LatticeTerm::abs(std::move(a));
      }
    }
    fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
  }

  const std::string& s_;
  std::size_t arity_;
  std::size_t pos_ = 0;
};

}  // namespace

LatticeTerm parse_term(const std::string& text, std::size_t arity) { return TermParser(text, arity).parse(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double to_double(const Rational64& q) {
  return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

}  // namespace

double eval_scalar(const LatticeTerm& t, std::span<const double> point) {
  switch (t.kind()) {
    case TermKind::Zero: return 0.0;
    case TermKind::Var:
      if (t.var_index() >= point.size())
        throw InvalidInput("term uses x" + std::to_string(t.var_index()) + " but the point has " +
                           std::to_string(point.size()) + " coordinates");
      return point[t.var_index()];
    case TermKind::Neg: return -eval_scalar(t.lhs(), point);
    case TermKind::Abs: return std::abs(eval_scalar(t.lhs(), point));
    case TermKind::HalfSum: return 0.5 * (eval_scalar(t.lhs(), point) + eval_scalar(t.rhs(), point));
    case TermKind::Join: return std::max(eval_scalar(t.lhs(), point), eval_scalar(t.rhs(), point));
    case TermKind::Meet: return std::min(eval_scalar(t.lhs(), point), eval_scalar(t.rhs(), point));
    case TermKind::Scale: return to_double(t.scalar()) * eval_scalar(t.lhs(), point);
  }
  return 0.0;
}

CompiledTerm::CompiledTerm(const LatticeTerm& t) : arity_(t.min_arity()) {
  std::unordered_map<const void*, std::size_t> slot;
  // Iterative post-order over the DAG.
  std::vector<std::pair<const LatticeTerm*, bool>> stack{{&t, false}};
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    stack.pop_back();
    if (slot.count(node->identity())) continue;
    const bool binary = node->kind() == TermKind::HalfSum || node->kind() == TermKind::Join ||
                        node->kind() == TermKind::Meet;
    const bool unary = node->kind() == TermKind::Neg || node->kind() == TermKind::Abs ||
                       node->kind() == TermKind::Scale;
    if (!expanded && (binary || unary)) {
      stack.push_back({node, true});
      stack.push_back({&node->lhs(), false});
      if (binary) stack.push_back({&node->rhs(), false});
      continue;
    }
    Op op{node->kind()};
    if (node->kind() == TermKind::Var) op.a = node->var_index();
    if (unary || binary) op.a = slot.at(node->lhs().identity());
    if (binary) op.b = slot.at(node->rhs().identity());
    if (node->kind() == TermKind::Scale) op.c = to_double(node->scalar());
    slot.emplace(node->identity(), ops_.size());
    ops_.push_back(op);
  }
  scratch_.resize(ops_.size());
}

double CompiledTerm::operator()(std::span<const double> x) const {
  if (x.size() < arity_) throw InvalidInput("point has fewer coordinates than the term's arity");
  auto& r = scratch_;
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    switch (op.kind) {
      case TermKind::Zero: r[i] = 0.0; break;
      case TermKind::Var: r[i] = x[op.a]; break;
      case TermKind::Neg: r[i] = -r[op.a]; break;
      case TermKind::Abs: r[i] = std::abs(r[op.a]); break;
      case TermKind::HalfSum: r[i] = 0.5 * (r[op.a] + r[op.b]); break;
      case TermKind::Join: r[i] = std::max(r[op.a], r[op.b]); break;
      case TermKind::Meet: r[i] = std::min(r[op.a], r[op.b]); break;
      case TermKind::Scale: r[i] = op.c * r[op.a]; break;
    }
  }
  return r.back();
}

LatticeElement eval_element(const LatticeTerm& t, const std::vector<LatticeElement>& args) {
  if (args.empty()) throw InvalidInput("eval_element needs at least one argument");
  if (args.size() < t.min_arity()) throw InvalidInput("too few arguments for the term's variables");
  for (const auto& a : args)
    if (!a.same_space(args.front())) throw InvalidInput("term arguments live on different spaces");
  const CompiledTerm compiled(t);
  std::vector<double> point(args.size()), out(args.front().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = 0; k < args.size(); ++k) point[k] = args[k][i];
    out[i] = compiled(point);
  }
  return LatticeElement(args.front().space(), std::move(out));
}

// ---------------------------------------------------------------------------

LatticeTerm interpolating_term(std::span<const double> x, std::span<const double> y, double a, double b) {
  if (x.size() != y.size() || x.empty()) throw InvalidInput("interpolation points need equal positive dimension");
  auto norm = [](std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
  };
  if (std::abs(norm(x) - 1.0) > kTolerance || std::abs(norm(y) - 1.0) > kTolerance)
    throw InvalidInput("interpolation points must lie on the unit sphere");
  std::size_t i = 0;
  while (i < x.size() && x[i] == y[i]) ++i;
  if (i == x.size()) throw InvalidInput("interpolation points must be distinct");
  if (a == 0.0 && b == 0.0) return LatticeTerm::zero();

  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  if (std::abs(xs[i]) == std::abs(ys[i])) {
    // x_i = −y_i ≠ 0; arrange x_i < 0 < y_i.
    if (xs[i] > 0) {
      std::swap(xs, ys);
      std::swap(a, b);
    }
    const double y0 = ys[i];
    const LatticeTerm v = LatticeTerm::var(i);
    return LatticeTerm::scale(
        Rational64(2),
        LatticeTerm::half_sum(LatticeTerm::scale(rational_from_double(a / y0), LatticeTerm::negative_part(v)),
                              LatticeTerm::scale(rational_from_double(b / y0), LatticeTerm::positive_part(v))));
  }
  if (std::abs(xs[i]) > std::abs(ys[i])) {
    std::swap(xs, ys);
    std::swap(a, b);
  }
  // |x_i| < |y_i| on the unit sphere forces |y_j| < |x_j| for some j.
  std::size_t j = 0;
  while (j < xs.size() && !(std::abs(ys[j]) < std::abs(xs[j]))) ++j;
  if (j == xs.size()) throw InvalidInput("points are not on a common sphere");
  const double det = xs[j] * ys[i] - xs[i] * ys[j];
  const double ci = (b * xs[j] - a * ys[j]) / det;
  const double cj = (a * ys[i] - b * xs[i]) / det;
  return LatticeTerm::scale(
      Rational64(2), LatticeTerm::half_sum(LatticeTerm::scale(rational_from_double(ci), LatticeTerm::var(i)),
                                           LatticeTerm::scale(rational_from_double(cj), LatticeTerm::var(j))));
}

// ---------------------------------------------------------------------------
// Sup norm

namespace {

/// Continuous piecewise-linear function on [−1, 1] given by its knots.
struct Knots {
  std::vector<double> x, y;

  double at(double t) const {
    const auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.begin()) return y.front();
    if (it == x.end()) return y.back();
    const std::size_t k = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + w * (y[k] - y[k - 1]);
  }
};

Knots map_values(Knots k, double c) {
  for (double& v : k.y) v *= c;
  return k;
}

std::vector<double> merged_knots(const Knots& a, const Knots& b) {
  std::vector<double> xs;
  std::merge(a.x.begin(), a.x.end(), b.x.begin(), b.x.end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

/// Combine with f applied knotwise; `crossing` inserts the zero crossings of
/// a − b so max/min/abs stay exact.
template <class F>
Knots combine(const Knots& a, const Knots& b, F f, bool crossing) {
  const std::vector<double> xs = merged_knots(a, b);
  Knots out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double da = a.at(xs[k]), db = b.at(xs[k]);
    if (crossing && k > 0) {
      const double pa = a.at(xs[k - 1]), pb = b.at(xs[k - 1]);
      const double d0 = pa - pb, d1 = da - db;
      if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
        const double t = xs[k - 1] + (xs[k] - xs[k - 1]) * d0 / (d0 - d1);
        if (t > xs[k - 1] && t < xs[k]) {
          out.x.push_back(t);
          out.y.push_back(f(a.at(t), b.at(t)));
        }
      }
    }
    out.x.push_back(xs[k]);
    out.y.push_back(f(da, db));
  }
  return out;
}

Knots restrict_to_edge(const LatticeTerm& t, std::size_t fixed, double sign,
                       std::unordered_map<const void*, Knots>& memo) {
  if (auto it = memo.find(t.identity()); it != memo.end()) return it->second;
  Knots r;
  switch (t.kind()) {
    case TermKind::Zero: r = {{-1.0, 1.0}, {0.0, 0.0}}; break;
    case TermKind::Var:
      if (t.var_index() == fixed) r = {{-1.0, 1.0}, {sign, sign}};
      else r = {{-1.0, 1.0}, {-1.0, 1.0}};
      break;
    case TermKind::Neg: r = map_values(restrict_to_edge(t.lhs(), fixed, sign, memo), -1.0); break;
    case TermKind::Scale: r = map_values(restrict_to_edge(t.lhs(), fixed, sign, memo), to_double(t.scalar())); break;
    case TermKind::Abs: {
      const Knots a = restrict_to_edge(t.lhs(), fixed, sign, memo);
      const Knots z{{-1.0, 1.0}, {0.0, 0.0}};
      r = combine(a, z, [](double u, double) { return std::abs(u); }, true);
      break;
    }
    case TermKind::HalfSum:
      r = combine(restrict_to_edge(t.lhs(), fixed, sign, memo), restrict_to_edge(t.rhs(), fixed, sign, memo),
                  [](double u, double v) { return 0.5 * (u + v); }, false);
      break;
    case TermKind::Join:
      r = combine(restrict_to_edge(t.lhs(), fixed, sign, memo), restrict_to_edge(t.rhs(), fixed, sign, memo),
                  [](double u, double v) { return std::max(u, v); }, true);
      break;
    case TermKind::Meet:
      r = combine(restrict_to_edge(t.lhs(), fixed, sign, memo), restrict_to_edge(t.rhs(), fixed, sign, memo),
                  [](double u, double v) { return std::min(u, v); }, true);
      break;
  }
  memo.emplace(t.identity(), r);
  return r;
}

}  // namespace

double term_lipschitz(const LatticeTerm& t) {
  switch (t.kind()) {
    case TermKind::Zero: return 0.0;
    case TermKind::Var: return 1.0;
    case TermKind::Neg:
    case TermKind::Abs: return term_lipschitz(t.lhs());
    case TermKind::HalfSum: return 0.5 * (term_lipschitz(t.lhs()) + term_lipschitz(t.rhs()));
    case TermKind::Join:
    case TermKind::Meet: return std::max(term_lipschitz(t.lhs()), term_lipschitz(t.rhs()));
    case TermKind::Scale: return std::abs(to_double(t.scalar())) * term_lipschitz(t.lhs());
  }
  return 0.0;
}

double term_sup_norm(const LatticeTerm& t) {
  const std::size_t n = t.min_arity();
  if (n == 0) return 0.0;
  if (n == 1) {
    const double p[] = {1.0}, m[] = {-1.0};
    return std::max(std::abs(eval_scalar(t, p)), std::abs(eval_scalar(t, m)));
  }
  if (n == 2) {
    // Homogeneity puts the sup on the boundary of the square; each edge
    // restriction is a one-variable PL function, tracked exactly.
    double best = 0.0;
    for (std::size_t fixed = 0; fixed < 2; ++fixed)
      for (double sign : {-1.0, 1.0}) {
        std::unordered_map<const void*, Knots> memo;
        const Knots k = restrict_to_edge(t, fixed, sign, memo);
        for (double v : k.y) best = std::max(best, std::abs(v));
      }
    return best;
  }
  // Boundary grid of each face plus Lipschitz slack.
  const CompiledTerm compiled(t);
  const double budget = 2e5 / static_cast<double>(2 * n);
  const auto g = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::floor(std::pow(budget, 1.0 / static_cast<double>(n - 1)))));
  const double h = 2.0 / static_cast<double>(g - 1);
  double best = 0.0;
  std::vector<double> point(n);
  std::vector<std::size_t> idx(n - 1);
  for (std::size_t face = 0; face < n; ++face)
    for (double sign : {-1.0, 1.0}) {
      std::fill(idx.begin(), idx.end(), 0);
      for (;;) {
        for (std::size_t d = 0, k = 0; d < n; ++d)
          point[d] = d == face ? sign : -1.0 + h * static_cast<double>(idx[k++]);
        best = std::max(best, std::abs(compiled(point)));
        std::size_t d = 0;
        while (d < idx.size() && ++idx[d] == g) idx[d++] = 0;
        if (d == idx.size()) break;
      }
    }
  return best + term_lipschitz(t) * h / 2.0;
}

// ---------------------------------------------------------------------------
// Homogeneous functions

namespace {

std::vector<double> parse_args(const std::string& text, std::string& name) {
  const auto open = text.find('(');
  name = text.substr(0, open);
  std::vector<double> args;
  if (open == std::string::npos) return args;
  const auto close = text.find(')', open);
  if (close == std::string::npos || close + 1 != text.size())
    throw ParseError("malformed function name '" + text + "'", "position " + std::to_string(text.size()));
  std::stringstream ss(text.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      args.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      throw ParseError("bad numeric argument '" + item + "'", "function '" + text + "'");
    }
  }
  return args;
}

HomogeneousFn geomean_fn(double alpha, const std::string& name) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("geomean exponent must lie in (0,1)");
  HomogeneousFn f;
  f.name = name;
  f.arity = 2;
  f.eval = [alpha](std::span<const double> z) { return signed_power(z[0], alpha) * signed_power(z[1], 1.0 - alpha); };
  f.modulus = [alpha](double h) {
    return std::pow(2.0, 1.0 - alpha) * std::pow(h, alpha) + std::pow(2.0, alpha) * std::pow(h, 1.0 - alpha);
  };
  return f;
}

}  // namespace

HomogeneousFn homogeneous_by_name(const std::string& text) {
  std::string name;
  const std::vector<double> args = parse_args(text, name);
  auto need = [&](std::size_t k) {
    if (args.size() != k)
      throw InvalidInput("function '" + name + "' takes " + std::to_string(k) + " argument(s)");
  };
  if (name == "identity") {
    need(0);
    return {text, 1, [](std::span<const double> z) { return z[0]; }, [](double h) { return h; }};
  }
  if (name == "euclid") {
    if (args.size() > 1) throw InvalidInput("euclid takes at most one argument (the arity)");
    const auto n = args.empty() ? std::size_t{2} : static_cast<std::size_t>(args[0]);
    if (n < 1) throw InvalidInput("euclid arity must be positive");
    return {text, n,
            [](std::span<const double> z) {
              double s = 0.0;
              for (double c : z) s += c * c;
              return std::sqrt(s);
            },
            [](double h) { return h; }};
  }
  if (name == "geomean") {
    need(1);
    return geomean_fn(args[0], text);
  }
  if (name == "power") {
    need(2);
    if (!(args[0] > 1.0 && args[1] > 1.0) || std::abs(1.0 / args[0] + 1.0 / args[1] - 1.0) > 1e-12)
      throw InvalidInput("power(p,q) needs conjugate exponents 1/p + 1/q = 1");
    return geomean_fn(1.0 / args[0], text);
  }
  if (name == "halfsum_pq") {
    need(2);
    const double p = args[0], q = args[1];
    if (!(p >= 1.0 && q >= 1.0)) throw InvalidInput("halfsum_pq needs p, q >= 1");
    const double r = p / q;
    return {text, 2,
            [r](std::span<const double> z) {
              return signed_power(0.5 * (signed_power(z[0], r) + signed_power(z[1], r)), 1.0 / r);
            },
            [r](double h) { return 2.0 * std::max(h, std::pow(h, std::min(r, 1.0 / r))); }};
  }
  throw InvalidInput("unknown function '" + name + "'");
}

std::vector<std::vector<double>> sphere_samples(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("sphere dimension must be positive");
  std::vector<std::vector<double>> out;
  if (n == 1) return {{1.0}, {-1.0}};
  if (n == 2) {
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
      out.push_back({std::cos(th), std::sin(th)});
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> v(n);
    double s = 0.0;
    do {
      s = 0.0;
      for (double& c : v) {
        c = gauss(rng);
        s += c * c;
      }
    } while (s < 1e-12);
    for (double& c : v) c /= std::sqrt(s);
    out.push_back(std::move(v));
  }
  return out;
}

double homogeneity_defect(const HomogeneousFn& phi, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha(0.0, 4.0);
  const auto pts = sphere_samples(phi.arity, std::max<std::size_t>(samples, 2), seed);
  double worst = 0.0;
  for (const auto& x : pts) {
    const double a = alpha(rng);
    std::vector<double> ax(x);
    for (double& c : ax) c *= a;
    worst = std::max(worst, std::abs(phi.eval(ax) - a * phi.eval(x)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Sphere approximation

namespace {

LatticeTerm balanced(std::vector<LatticeTerm> terms, bool use_join) {
  while (terms.size() > 1) {
    std::vector<LatticeTerm> next;
    for (std::size_t i = 0; i + 1 < terms.size(); i += 2)
      next.push_back(use_join ? LatticeTerm::join(terms[i], terms[i + 1]) : LatticeTerm::meet(terms[i], terms[i + 1]));
    if (terms.size() % 2) next.push_back(terms.back());
    terms = std::move(next);
  }
  return terms.front();
}

void certify(SphereApproximation& out, const HomogeneousFn& phi, const std::vector<std::vector<double>>& pts,
             const std::vector<double>& values, double spacing, double eps) {
  const CompiledTerm compiled(out.term);
  double worst = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) worst = std::max(worst, std::abs(compiled(pts[k]) - values[k]));
  out.certified_error = worst;
  // Euclidean Lipschitz constant of the term is at most sqrt(n) times its sup-norm one.
  const double lt = term_lipschitz(out.term) * std::sqrt(static_cast<double>(phi.arity));
  out.uniform_bound = worst + (phi.modulus ? phi.modulus(spacing) : 0.0) + lt * spacing;
  out.reached = worst <= eps;
}

SphereApproximation approximate_line(const HomogeneousFn& phi, double eps) {
  const double plus[] = {1.0}, minus[] = {-1.0};
  const double a = phi.eval(plus), b = phi.eval(minus);
  SphereApproximation out;
  if (b == -a) {
    out.term = a == 1.0 ? LatticeTerm::var(0) : LatticeTerm::scale(rational_from_double(a), LatticeTerm::var(0));
  } else {
    const LatticeTerm v = LatticeTerm::var(0);
    out.term = LatticeTerm::scale(
        Rational64(2), LatticeTerm::half_sum(LatticeTerm::scale(rational_from_double(a), LatticeTerm::positive_part(v)),
                                             LatticeTerm::scale(rational_from_double(b), LatticeTerm::negative_part(v))));
  }
  out.pieces = 2;
  certify(out, phi, {{1.0}, {-1.0}}, {a, b}, 0.0, eps);
  return out;
}

/// Linear functional through (u, a) and (v, b) for independent u, v ∈ ℝ².
std::array<double, 2> plane_through(const std::vector<double>& u, double a, const std::vector<double>& v, double b) {
  const double det = u[0] * v[1] - u[1] * v[0];
  return {(a * v[1] - b * u[1]) / det, (b * u[0] - a * v[0]) / det};
}

SphereApproximation approximate_circle(const HomogeneousFn& phi, double eps, std::size_t grid,
                                       const ApproximationOptions& options) {
  if (grid < 8) throw InvalidInput("circle grid needs at least 8 samples");
  const auto pts = sphere_samples(2, grid);
  std::vector<double> values(grid);
  for (std::size_t k = 0; k < grid; ++k) values[k] = phi.eval(pts[k]);

  const std::size_t start = std::clamp<std::size_t>(options.initial_nodes, 3, grid);
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < start; ++k) nodes.push_back(k * grid / start);
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  auto pieces_for = [&](const std::vector<std::size_t>& nd, const std::vector<double>& level) {
    std::vector<std::array<double, 2>> c(nd.size());
    for (std::size_t i = 0; i < nd.size(); ++i) {
      const std::size_t j = (i + 1) % nd.size();
      c[i] = plane_through(pts[nd[i]], level[i], pts[nd[j]], level[j]);
    }
    return c;
  };
  // Signed error range of each sector, both end nodes included.
  struct Range {
    double lo, hi;
  };
  auto sector_errors = [&](const std::vector<std::size_t>& nd, const std::vector<std::array<double, 2>>& c,
                           std::size_t* worst_at) {
    std::vector<Range> r(nd.size());
    double worst = -1.0;
    for (std::size_t i = 0; i < nd.size(); ++i) {
      const std::size_t from = nd[i];
      const std::size_t to = i + 1 < nd.size() ? nd[i + 1] : nd[0] + grid;
      r[i] = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (std::size_t k = from; k <= to; ++k) {
        const std::size_t kk = k % grid;
        const double err = c[i][0] * pts[kk][0] + c[i][1] * pts[kk][1] - values[kk];
        r[i].lo = std::min(r[i].lo, err);
        r[i].hi = std::max(r[i].hi, err);
        if (worst_at && std::abs(err) > worst) {
          worst = std::abs(err);
          *worst_at = kk;
        }
      }
    }
    return r;
  };
  auto worst_of = [](const std::vector<Range>& r) {
    double w = 0.0;
    for (const auto& x : r) w = std::max({w, -x.lo, x.hi});
    return w;
  };
  auto node_values = [&](const std::vector<std::size_t>& nd) {
    std::vector<double> v(nd.size());
    for (std::size_t i = 0; i < nd.size(); ++i) v[i] = values[nd[i]];
    return v;
  };

  SphereApproximation out;
  for (;;) {
    ++out.iterations;
    std::size_t worst_at = 0;
    const auto r = sector_errors(nodes, pieces_for(nodes, node_values(nodes)), &worst_at);
    if (worst_of(r) <= eps || nodes.size() >= options.max_pieces) break;
    nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), worst_at), worst_at);
  }

  // Interpolating at the nodes leaves one-signed error on convex or concave
  // stretches; shift each node value to centre the error range next to it.
  const std::size_t m = nodes.size();
  std::vector<double> level = node_values(nodes);
  auto ranges = sector_errors(nodes, pieces_for(nodes, level), nullptr);
  double best = worst_of(ranges);
  double step = 1.0;
  for (int it = 0; it < 80 && step > 1e-3 && best > 0.0; ++it) {
    std::vector<double> trial(level);
    for (std::size_t i = 0; i < m; ++i) {
      const Range& a = ranges[(i + m - 1) % m];
      const Range& b = ranges[i];
      trial[i] -= step * 0.5 * (std::max(a.hi, b.hi) + std::min(a.lo, b.lo));
    }
    const auto tr = sector_errors(nodes, pieces_for(nodes, trial), nullptr);
    const double w = worst_of(tr);
    if (w < best) {
      best = w;
      level = std::move(trial);
      ranges = tr;
    } else {
      step *= 0.5;
    }
  }
  const auto coeffs = pieces_for(nodes, level);

  // Max–min form: cone i contributes min over the pieces that dominate
  // piece i on that cone (checked on its two boundary rays).
  std::vector<LatticeTerm> linear;
  for (const auto& c : coeffs) linear.push_back(LatticeTerm::linear(c));
  std::vector<LatticeTerm> mins;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& u = pts[nodes[i]];
    const auto& v = pts[nodes[(i + 1) % m]];
    const double scale = std::max({1.0, std::abs(level[i]), std::abs(level[(i + 1) % m])});
    std::vector<LatticeTerm> dominating;
    for (std::size_t j = 0; j < m; ++j) {
      const double du = (coeffs[j][0] - coeffs[i][0]) * u[0] + (coeffs[j][1] - coeffs[i][1]) * u[1];
      const double dv = (coeffs[j][0] - coeffs[i][0]) * v[0] + (coeffs[j][1] - coeffs[i][1]) * v[1];
      if (j == i || (du >= -1e-12 * scale && dv >= -1e-12 * scale)) dominating.push_back(linear[j]);
    }
    mins.push_back(balanced(std::move(dominating), false));
  }
  out.term = balanced(std::move(mins), true);
  out.pieces = m;
  certify(out, phi, pts, values, 2.0 * std::sin(std::numbers::pi / static_cast<double>(2 * grid)), eps);
  return out;
}

/// Convex hull of unit vectors around the origin, grown one vertex at a time.
/// Facet F is the hyperplane c_F·x = 1 through its n vertices and carries the
/// linear piece ℓ_F matching φ there; the ray through z leaves the hull
/// through the facet maximising c_F·z.
class SphereHull {
 public:
  struct Facet {
    std::vector<std::size_t> vertices;  // sorted
    Eigen::VectorXd c, ell;
    bool alive = true;
  };

  SphereHull(const std::vector<std::vector<double>>& pts, const std::vector<double>& values, std::size_t n)
      : pts_(pts), values_(values), n_(n) {
    // cross-polytope on ±e_i, stored as points 2i and 2i+1
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<std::size_t> v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = 2 * i + ((mask >> i) & 1);
      Facet f;
      if (!make(std::move(v), f)) throw InvalidInput("degenerate starting polytope");
      facets_.push_back(std::move(f));
    }
  }

  const std::vector<Facet>& facets() const noexcept { return facets_; }

  std::size_t locate(const std::vector<double>& z, std::size_t from = 0) const {
    std::size_t best = 0;
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t f = from; f < facets_.size(); ++f) {
      if (!facets_[f].alive) continue;
      const double h = dot(facets_[f].c, z);
      if (h > top) {
        top = h;
        best = f;
      }
    }
    return best;
  }

  double piece(std::size_t f, const std::vector<double>& z) const { return dot(facets_[f].ell, z); }

  /// Adds point k as a vertex; false when it is not strictly outside or the
  /// new facets would be degenerate.
  bool insert(std::size_t k) {
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < facets_.size(); ++f)
      if (facets_[f].alive && dot(facets_[f].c, pts_[k]) > 1.0 + 1e-12) visible.push_back(f);
    if (visible.empty()) return false;
    std::map<std::vector<std::size_t>, int> ridges;
    for (std::size_t f : visible) {
      const auto& v = facets_[f].vertices;
      for (std::size_t drop = 0; drop < v.size(); ++drop) {
        std::vector<std::size_t> r;
        for (std::size_t i = 0; i < v.size(); ++i)
          if (i != drop) r.push_back(v[i]);
        ++ridges[r];
      }
    }
    std::vector<Facet> fresh;
    for (const auto& [r, count] : ridges) {
      if (count != 1) continue;
      std::vector<std::size_t> v(r);
      v.insert(std::upper_bound(v.begin(), v.end(), k), k);
      Facet f;
      if (!make(std::move(v), f)) return false;
      fresh.push_back(std::move(f));
    }
    for (std::size_t f : visible) facets_[f].alive = false;
    for (auto& f : fresh) facets_.push_back(std::move(f));
    return true;
  }

 private:
  static double dot(const Eigen::VectorXd& c, const std::vector<double>& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) s += c(i) * z[static_cast<std::size_t>(i)];
    return s;
  }

  bool make(std::vector<std::size_t> v, Facet& f) const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd x(n, n);
    Eigen::VectorXd phi(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& p = pts_[v[static_cast<std::size_t>(r)]];
      for (Eigen::Index c = 0; c < n; ++c) x(r, c) = p[static_cast<std::size_t>(c)];
      phi(r) = values_[v[static_cast<std::size_t>(r)]];
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
    if (std::abs(lu.determinant()) < 1e-12) return false;
    f.vertices = std::move(v);
    f.c = lu.solve(Eigen::VectorXd::Ones(n));
    f.ell = lu.solve(phi);
    return true;
  }

  const std::vector<std::vector<double>>& pts_;
  const std::vector<double>& values_;
  std::size_t n_;
  std::vector<Facet> facets_;
};

SphereApproximation approximate_general(const HomogeneousFn& phi, double eps, std::size_t grid,
                                        const ApproximationOptions& options) {
  const std::size_t n = phi.arity;
  if (n > 16) throw InvalidInput("arity above 16 is not supported by the sphere approximation");
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < n; ++i)
    for (double s : {1.0, -1.0}) {
      std::vector<double> e(n, 0.0);
      e[i] = s;
      pts.push_back(std::move(e));
    }
  const auto extra = sphere_samples(n, grid, options.seed);
  pts.insert(pts.end(), extra.begin(), extra.end());
  std::vector<double> values(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) values[k] = phi.eval(pts[k]);

  SphereHull hull(pts, values, n);
  std::vector<std::size_t> owner(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) owner[k] = hull.locate(pts[k]);
  std::vector<bool> blocked(pts.size(), false);
  for (std::size_t k = 0; k < 2 * n; ++k) blocked[k] = true;
  std::size_t vertices = 2 * n;

  SphereApproximation out;
  for (;;) {
    ++out.iterations;
    double worst = 0.0;
    std::size_t worst_at = pts.size();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double err = std::abs(hull.piece(owner[k], pts[k]) - values[k]);
      if (!blocked[k] && err > worst) {
        worst = err;
        worst_at = k;
      }
    }
    if (worst <= eps || vertices >= options.max_pieces || worst_at == pts.size()) break;
    blocked[worst_at] = true;
    const std::size_t before = hull.facets().size();
    if (!hull.insert(worst_at)) continue;
    ++vertices;
    // only samples in the cones of removed facets change hands
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (!hull.facets()[owner[k]].alive) owner[k] = hull.locate(pts[k], before);
  }

  // Max–min form over the live facets: cone F contributes the min of the
  // pieces that dominate ℓ_F at every vertex of F.
  std::vector<std::size_t> live;
  for (std::size_t f = 0; f < hull.facets().size(); ++f)
    if (hull.facets()[f].alive) live.push_back(f);
  std::vector<LatticeTerm> linear;
  for (std::size_t f : live) {
    const auto& e = hull.facets()[f].ell;
    linear.push_back(LatticeTerm::linear(std::vector<double>(e.data(), e.data() + e.size())));
  }
  std::vector<LatticeTerm> mins;
  for (std::size_t a = 0; a < live.size(); ++a) {
    const auto& fa = hull.facets()[live[a]];
    std::vector<LatticeTerm> dominating;
    for (std::size_t b = 0; b < live.size(); ++b) {
      bool dom = true;
      for (std::size_t v : fa.vertices) {
        const double pa = hull.piece(live[a], pts[v]), pb = hull.piece(live[b], pts[v]);
        if (pb < pa - 1e-12 * std::max(1.0, std::abs(pa))) {
          dom = false;
          break;
        }
      }
      if (a == b || dom) dominating.push_back(linear[b]);
    }
    mins.push_back(balanced(std::move(dominating), false));
  }
  out.term = balanced(std::move(mins), true);
  out.pieces = vertices;
  // Covering radius of random samples is not known a priori; use the
  // largest nearest-neighbour distance among samples as the spacing.
  double spacing = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    double nearest = 2.0;
    for (std::size_t l = 0; l < pts.size(); ++l) {
      if (l == k) continue;
      double g = 0.0;
      for (std::size_t d = 0; d < n; ++d) g += pts[k][d] * pts[l][d];
      nearest = std::min(nearest, std::sqrt(std::max(0.0, 2.0 - 2.0 * g)));
    }
    spacing = std::max(spacing, nearest);
  }
  certify(out, phi, pts, values, spacing, eps);
  return out;
}

}  // namespace

SphereApproximation approximate_on_sphere(const HomogeneousFn& phi, double eps, std::size_t grid,
                                          const ApproximationOptions& options) {
  if (!(eps > 0.0)) throw InvalidInput("approximation tolerance must be positive");
  if (phi.arity == 0 || !phi.eval) throw InvalidInput("function has no arity or evaluator");
  if (homogeneity_defect(phi, 64, options.seed) > 1e-9)
    throw InvalidInput("function '" + phi.name + "' fails the homogeneity spot check");
  if (phi.arity == 1) return approximate_line(phi, eps);
  if (phi.arity == 2) return approximate_circle(phi, eps, grid, options);
  return approximate_general(phi, eps, grid, options);
}

}  // namespace canonlab
