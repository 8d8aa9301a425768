#include "canonlab/rv_canon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "canonlab/error.hpp"

namespace canonlab {

namespace {

void check_range(const LatticeElement& x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= 0.0 && x[i] <= 1.0))
      throw InvalidInput("random variable value " + std::to_string(x[i]) + " at atom " + std::to_string(i) +
                         " is outside [0,1]");
}

LatticeElement product_power(const std::vector<RVElement>& xs, const std::vector<unsigned>& k, const SpacePtr& sp) {
  if (xs.size() != k.size()) throw InvalidInput("exponent tuple length differs from variable tuple length");
  std::vector<double> out(sp->size(), 1.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i].space() == sp || *xs[i].space() == *sp)) throw InvalidInput("variables live on different spaces");
    for (std::size_t a = 0; a < out.size(); ++a) out[a] *= std::pow(xs[i][a], static_cast<double>(k[i]));
  }
  return LatticeElement(sp, std::move(out));
}

/// Distinct values (merged at kTolerance) with their conditional masses.
std::vector<std::pair<double, double>> block_distribution(const LatticeElement& x, const std::vector<std::size_t>& block) {
  const auto& sp = *x.space();
  double total = 0.0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t a : block) {
    pts.push_back({x[a], sp.weight(a)});
    total += sp.weight(a);
  }
  std::sort(pts.begin(), pts.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& [v, w] : pts) {
    if (!out.empty() && v - out.back().first <= kTolerance) out.back().second += w / total;
    else out.push_back({v, w / total});
  }
  return out;
}

}  // namespace

RVElement::RVElement(LatticeElement values) : x_(std::move(values)) { check_range(x_); }
RVElement::RVElement(SpacePtr space, std::vector<double> values) : x_(std::move(space), std::move(values)) {
  check_range(x_);
}

RVElement rv_op(RVOp op, const RVElement& x, const RVElement* y) {
  switch (op) {
    case RVOp::Not: return RVElement(LatticeElement::constant(x.space(), 1.0) - x.element());
    case RVOp::Half: return RVElement(x.element() * 0.5);
    case RVOp::Join:
    case RVOp::Meet:
      if (!y) throw InvalidInput("binary random-variable operation needs a second operand");
      return RVElement(op == RVOp::Join ? join(x.element(), y->element()) : meet(x.element(), y->element()));
  }
  throw InvalidInput("unknown operation");
}

double expectation(const RVElement& x) { return lp_norm(x.element(), 1.0); }

void require_partition(const SubStructure& s, const MeasureSpace& space) {
  s.validate(space);
  if (s.support().size() != space.size()) throw InvalidInput("conditioning blocks must cover every atom");
}

RVElement cond_moment(const std::vector<RVElement>& xs, const std::vector<unsigned>& k, const SubStructure& s) {
  if (xs.empty()) throw InvalidInput("empty variable tuple");
  require_partition(s, *xs.front().space());
  LatticeElement e = cond_exp(product_power(xs, k, xs.front().space()), s);
  // Block means of values in [0,1] can overshoot 1 by one ulp.
  std::vector<double> v(e.values().begin(), e.values().end());
  for (double& c : v) c = std::clamp(c, 0.0, 1.0);
  return RVElement(e.space(), std::move(v));
}

LeastSquaresReport least_squares_check(const RVElement& x, unsigned k, const SubStructure& s,
                                       std::size_t candidates) {
  if (candidates == 0) throw InvalidInput("need at least one candidate step");
  const RVElement y = cond_moment({x}, {k}, s);
  const LatticeElement xk = product_power({x}, {k}, x.space());
  const auto& sp = *x.space();
  LeastSquaresReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& block : s.blocks()) {
    auto err = [&](double c) {
      double e = 0.0;
      for (std::size_t a : block) e += sp.weight(a) * (xk[a] - c) * (xk[a] - c);
      return e;
    };
    const double best = err(y[block.front()]);
    rep.optimum += best;
    for (std::size_t i = 0; i <= candidates; ++i) {
      const double c = static_cast<double>(i) / static_cast<double>(candidates);
      const double excess = err(c) - best;
      if (excess < -kTolerance) ok = false;
      if (std::abs(c - y[block.front()]) > 1e-6) {
        rep.margin = std::min(rep.margin, excess);
        if (!(excess > 0.0)) ok = false;
      }
    }
  }
  rep.optimum = std::sqrt(rep.optimum);
  rep.passed = ok;
  return rep;
}

ProductCheck product_formula_check(const std::vector<RVElement>& xs, const std::vector<unsigned>& k,
                                   const std::vector<RVElement>& ys, const std::vector<unsigned>& l,
                                   const SubStructure& s) {
  if (xs.empty()) throw InvalidInput("empty variable tuple");
  const SpacePtr& sp = xs.front().space();
  require_partition(s, *sp);
  for (const auto& y : ys)
    for (const auto& block : s.blocks())
      for (std::size_t a : block)
        if (std::abs(y[a] - y[block.front()]) > 1e-12)
          throw InvalidInput("Y is not measurable with respect to the conditioning blocks");
  const LatticeElement xk = product_power(xs, k, sp);
  const LatticeElement yl = product_power(ys, l, sp);
  const RVElement m = cond_moment(xs, k, s);
  ProductCheck c;
  for (std::size_t a = 0; a < sp->size(); ++a) {
    c.lhs += sp->weight(a) * xk[a] * yl[a];
    c.rhs += sp->weight(a) * m[a] * yl[a];
  }
  return c;
}

std::vector<AprEntry> apr_cb(const std::vector<RVElement>& events, const SubStructure& s) {
  if (events.empty()) throw InvalidInput("no events given");
  if (events.size() > 20) throw InvalidInput("at most 20 events are supported");
  for (std::size_t i = 0; i < events.size(); ++i)
    for (std::size_t a = 0; a < events[i].size(); ++a)
      if (events[i][a] != 0.0 && events[i][a] != 1.0)
        throw InvalidInput("event " + std::to_string(i) + " is not an indicator (value " +
                           std::to_string(events[i][a]) + " at atom " + std::to_string(a) + ")");
  std::vector<AprEntry> out;
  const std::uint32_t full = (std::uint32_t{1} << events.size()) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    std::vector<unsigned> k(events.size(), 0);
    for (std::size_t i = 0; i < events.size(); ++i)
      if (mask & (std::uint32_t{1} << i)) k[i] = 1;
    out.push_back({mask, cond_moment(events, k, s)});
  }
  return out;
}

LiftedEvent lift_event(const RVElement& x, std::size_t fiber_cells) {
  if (fiber_cells == 0) throw InvalidInput("fiber_cells must be positive");
  const auto n = static_cast<double>(fiber_cells);
  const auto w = x.space()->weights();
  ExtensionPair pair(std::vector<double>(w.begin(), w.end()), fiber_cells, false);
  std::vector<std::vector<double>> rows(x.size(), std::vector<double>(fiber_cells, 0.0));
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double scaled = x[a] * n;
    const double k = std::round(scaled);
    if (std::abs(scaled - k) > kTolerance)
      throw InvalidInput("value " + std::to_string(x[a]) + " at atom " + std::to_string(a) + " is off the grid {k/" +
                         std::to_string(fiber_cells) + "}; nearest grid value " + std::to_string(k / n));
    std::fill_n(rows[a].begin(), static_cast<std::size_t>(k), 1.0);
  }
  LatticeElement ind = pair.from_rows(rows);
  return {std::move(pair), std::move(ind)};
}

MomentReport moments_determine_check(const RVElement& x, const RVElement& y, const SubStructure& s,
                                     unsigned max_k) {
  if (!(x.space() == y.space() || *x.space() == *y.space())) throw InvalidInput("X and Y live on different spaces");
  require_partition(s, *x.space());
  MomentReport rep;
  rep.moments_equal = true;
  rep.distributions_equal = true;
  for (unsigned k = 0; k <= max_k; ++k)
    if (!approx_equal(cond_moment({x}, {k}, s).element(), cond_moment({y}, {k}, s).element()))
      rep.moments_equal = false;

  for (const auto& block : s.blocks()) {
    const auto dx = block_distribution(x.element(), block);
    const auto dy = block_distribution(y.element(), block);
    std::vector<double> support;
    for (const auto& [v, m] : dx) support.push_back(v);
    for (const auto& [v, m] : dy) support.push_back(v);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end(), [](double a, double b) { return b - a <= kTolerance; }),
                  support.end());
    rep.max_support = std::max(rep.max_support, support.size());

    bool same = dx.size() == dy.size();
    for (std::size_t i = 0; same && i < dx.size(); ++i)
      same = std::abs(dx[i].first - dy[i].first) <= kTolerance && std::abs(dx[i].second - dy[i].second) <= kTolerance;
    rep.distributions_equal = rep.distributions_equal && same;

    // Vandermonde inversion: recover X's masses on the union support from its moments.
    const auto u = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd V(u, u);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(u), truth = Eigen::VectorXd::Zero(u);
    for (Eigen::Index r = 0; r < u; ++r)
      for (Eigen::Index c = 0; c < u; ++c) V(r, c) = std::pow(support[static_cast<std::size_t>(c)], static_cast<double>(r));
    for (const auto& [v, m] : dx) {
      const auto at = std::lower_bound(support.begin(), support.end(), v - kTolerance) - support.begin();
      truth(at) += m;
    }
    double total = 0.0;
    for (std::size_t a : block) total += x.space()->weight(a);
    for (Eigen::Index r = 0; r < u; ++r)
      for (std::size_t a : block) mom(r) += x.space()->weight(a) * std::pow(x[a], static_cast<double>(r)) / total;
    const Eigen::VectorXd rec = V.colPivHouseholderQr().solve(mom);
    rep.reconstruction_error = std::max(rep.reconstruction_error, (rec - truth).cwiseAbs().maxCoeff());
  }
  rep.sufficient = rep.max_support <= static_cast<std::size_t>(max_k) + 1;
  rep.passed = rep.sufficient && rep.moments_equal == rep.distributions_equal && rep.reconstruction_error <= 1e-6;
  return rep;
}

}  // namespace canonlab
