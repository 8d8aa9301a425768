#include "canonlab/lp_canon.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "canonlab/error.hpp"
#include "canonlab/krivine.hpp"

namespace canonlab {

namespace {

void require_unit(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput(std::string(what) + " must lie in [0,1]");
}

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("exponent must be a finite real >= 1");
}

std::size_t order_index(double t, std::size_t n) {
  const double k = std::ceil(t * static_cast<double>(n) - kTolerance);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(k, 1.0)), 1, n);
}

}  // namespace

LatticeElement f_zero(const LatticeElement& f, const ExtensionPair& pair) { return pair.fiber_mean(abs(f)); }

LatticeElement PsiFamily::operator()(double x) const {
  std::vector<double> out(fibers.size());
  for (std::size_t w = 0; w < fibers.size(); ++w) out[w] = fibers[w](x);
  return LatticeElement(f0.space(), std::move(out));
}

PsiFamily psi(const LatticeElement& f, const ExtensionPair& pair) {
  PsiFamily fam{{}, f_zero(f, pair)};
  for (std::size_t w = 0; w < pair.base_atoms(); ++w) {
    if (fam.f0[w] == 0.0) fam.fibers.push_back(PLConvexFn::linear(0.0));
    else fam.fibers.push_back(PLConvexFn::hinge_mean(pair.row(f, w), fam.f0[w]));
  }
  return fam;
}

LatticeElement partial_cond_exp(const LatticeElement& f, const ExtensionPair& pair, double t) {
  require_unit(t, "t");
  const PsiFamily fam = psi(f, pair);
  std::vector<double> out(pair.base_atoms(), 0.0);
  for (std::size_t w = 0; w < out.size(); ++w) {
    if (fam.f0[w] == 0.0) continue;
    out[w] = conjugate(fam.fibers[w])(t * fam.f0[w]);
  }
  return LatticeElement(pair.base_space(), std::move(out));
}

LatticeElement interval_cond_exp(const LatticeElement& f, const ExtensionPair& pair, double t, double s) {
  require_unit(t, "t");
  require_unit(s, "s");
  if (!(t < s)) throw InvalidInput("interval needs t < s");
  return partial_cond_exp(f, pair, s) - partial_cond_exp(f, pair, t);
}

LatticeElement SliceFamily::at(double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("slice parameter must lie in (0,1]");
  std::vector<double> out(sorted.size());
  for (std::size_t w = 0; w < sorted.size(); ++w) out[w] = sorted[w][order_index(t, sorted[w].size()) - 1];
  return LatticeElement(base, std::move(out));
}

SliceFamily slices(const LatticeElement& f, const ExtensionPair& pair) {
  SliceFamily s{pair.base_space(), {}};
  for (std::size_t w = 0; w < pair.base_atoms(); ++w) {
    const auto r = pair.row(f, w);
    s.sorted.emplace_back(r.begin(), r.end());
    std::stable_sort(s.sorted.back().begin(), s.sorted.back().end());
  }
  return s;
}

LatticeElement slice_from_conjugate(const LatticeElement& f, const ExtensionPair& pair, double t) {
  if (!(t > 0.0 && t <= 1.0)) throw InvalidInput("slice parameter must lie in (0,1]");
  const PsiFamily fam = psi(f, pair);
  std::vector<double> out(pair.base_atoms(), 0.0);
  for (std::size_t w = 0; w < out.size(); ++w) {
    if (fam.f0[w] == 0.0) continue;
    const OneSided d = one_sided_derivs(conjugate(fam.fibers[w]), t * fam.f0[w]);
    out[w] = fam.f0[w] * *d.left;
  }
  return LatticeElement(pair.base_space(), std::move(out));
}

LatticeElement increasing_realisation(const LatticeElement& f, const ExtensionPair& pair, double p) {
  require_p(p);
  const SliceFamily s = slices(f, pair);
  if (!pair.has_orthogonal()) return pair.from_rows(s.sorted);
  const OrthogonalNorms n = orthogonal_norms(f, pair, p);
  return pair.from_rows(s.sorted, std::vector<double>(pair.fiber_cells(), n.pos),
                        std::vector<double>(pair.fiber_cells(), -n.neg));
}

BoundCheck slice_norm_bound_check(const LatticeElement& f, const ExtensionPair& pair, double p, double t) {
  require_p(p);
  if (!(t > 0.0 && t < 1.0)) throw InvalidInput("t must lie in (0,1)");
  pair.require_total(f);
  return {lp_norm(slices(f, pair).at(t), p), lp_norm(f, p) / std::pow(t - t * t, 1.0 / p)};
}

GridApprox grid_approx(const LatticeElement& f, const ExtensionPair& pair, double t, double N, std::size_t n_grid) {
  if (!(t > 0.0 && t < 1.0)) throw InvalidInput("t must lie in (0,1)");
  if (!(N > 0.0) || !std::isfinite(N)) throw InvalidInput("N must be positive and finite");
  if (n_grid == 0) throw InvalidInput("n_grid must be at least 1");
  const PsiFamily fam = psi(f, pair);
  std::vector<double> g(pair.base_atoms(), 0.0), h(pair.base_atoms(), 0.0);
  const auto n = static_cast<double>(n_grid);
  for (std::size_t w = 0; w < g.size(); ++w) {
    const double f0 = fam.f0[w];
    if (f0 == 0.0) continue;
    const PLConvexFn& P = fam.fibers[w];
    auto objective = [&](double x) { return t * x * f0 - P(x); };
    double gw = objective(-N);
    for (long k = -static_cast<long>(n_grid); k <= static_cast<long>(n_grid); ++k)
      gw = std::max(gw, objective(N * static_cast<double>(k) / n));
    // Concave PL objective: the sup over [−N, N] sits at an end or a breakpoint.
    double hw = std::max(objective(-N), objective(N));
    for (double b : P.breakpoints())
      if (b > -N && b < N) hw = std::max(hw, objective(b));
    g[w] = gw;
    h[w] = hw;
  }
  return {LatticeElement(pair.base_space(), std::move(g)), LatticeElement(pair.base_space(), std::move(h))};
}

LatticeElement lq_transport(const LatticeElement& f, double p, double q) {
  require_p(p);
  require_p(q);
  return signed_power(f, p / q);
}

double duality_pairing(const LatticeElement& f, const LatticeElement& g, double p, double q) {
  require_p(p);
  if (!(q > 1.0) || !std::isfinite(q)) throw InvalidInput("pairing needs 1 < q < ∞ (conjugate exponent undefined)");
  if (!f.same_space(g)) throw InvalidInput("pairing arguments live on different spaces");
  const double qc = q / (q - 1.0);
  const auto& sp = *f.space();
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    total += sp.weight(i) * signed_power(signed_power(f[i], 1.0 / q) * signed_power(g[i], 1.0 / qc), p);
  return total;
}

PairingCheck cond_exp_pairing_check(const LatticeElement& f, const ExtensionPair& pair, double p,
                                    const LatticeElement& h) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw InvalidInput("pairing characterisation of conditional expectation needs p > 1");
  pair.require_total(f);
  pair.require_base(h);
  const LatticeElement hp = signed_power(h, p - 1.0);
  const LatticeElement lifted = pair.embed(hp);
  double lhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) lhs += f.space()->weight(i) * f[i] * lifted[i];
  const LatticeElement e = pair.fiber_mean(f);
  double rhs = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) rhs += e.space()->weight(i) * e[i] * hp[i];
  return {lhs, rhs};
}

std::vector<double> transported_interval_convergence(const LatticeElement& f, const ExtensionPair& pair, double t,
                                                     double s, const std::vector<double>& qs) {
  if (!(t > 0.0 && t < s && s < 1.0)) throw InvalidInput("need 0 < t < s < 1");
  const LatticeElement direct = interval_cond_exp(f, pair, t, s);
  std::vector<double> out;
  for (double q : qs) {
    if (!(q > 1.0) || !std::isfinite(q)) throw InvalidInput("each q must exceed 1");
    const LatticeElement back = signed_power(interval_cond_exp(lq_transport(f, 1.0, q), pair, t, s), q);
    double dev = 0.0;
    for (std::size_t w = 0; w < back.size(); ++w) dev = std::max(dev, std::abs(back[w] - direct[w]));
    out.push_back(dev);
  }
  return out;
}

double transported_interval_bound(double t, double s, double q) {
  if (!(t > 0.0 && t < s && s < 1.0)) throw InvalidInput("need 0 < t < s < 1");
  if (!(q > 1.0)) throw InvalidInput("q must exceed 1");
  const double M = std::max(1.0 / t, 1.0 / (1.0 - s));
  const double L = s - t;
  // δ1 = max_{0≤v≤M} |v^{1/q} − v|; interior extremum at v = q^{−q/(q−1)}.
  double d1 = std::abs(std::pow(M, 1.0 / q) - M);
  if (const double v = std::pow(q, -q / (q - 1.0)); v <= M) d1 = std::max(d1, std::pow(v, 1.0 / q) - v);
  // δ2 = max_{0≤a≤A} |a^q − a| with A = L·M^{1/q}; interior extremum at a = q^{−1/(q−1)}.
  const double A = L * std::pow(M, 1.0 / q);
  double d2 = std::abs(std::pow(A, q) - A);
  if (const double a = std::pow(q, -1.0 / (q - 1.0)); a <= A) d2 = std::max(d2, a - std::pow(a, q));
  return L * d1 + d2;
}

std::vector<double> uniform_grid(std::size_t n) {
  if (n == 0) throw InvalidInput("grid size must be positive");
  std::vector<double> g(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g[k] = static_cast<double>(k) / static_cast<double>(n);
  return g;
}

bool LpCanonicalBase::equals(const LpCanonicalBase& o, double tol) const {
  if (p != o.p || intervals != o.intervals || grid != o.grid || values.size() != o.values.size()) return false;
  if (std::abs(pos_norm - o.pos_norm) > tol || std::abs(neg_norm - o.neg_norm) > tol) return false;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!approx_equal(values[i], o.values[i], tol)) return false;
  return true;
}

LpCanonicalBase canonical_base_1type(const LatticeElement& f, const ExtensionPair& pair, double p,
                                     const std::vector<double>& grid, bool intervals) {
  require_p(p);
  pair.require_total(f);
  if (grid.empty()) throw InvalidInput("grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_unit(grid[i], "grid point");
    if (i > 0 && !(grid[i - 1] < grid[i])) throw InvalidInput("grid must increase strictly");
  }
  LpCanonicalBase cb;
  cb.p = p;
  cb.pos_norm = lp_norm(positive_part(f), p);
  cb.neg_norm = lp_norm(negative_part(f), p);
  cb.grid = grid;
  cb.intervals = intervals;
  std::vector<LatticeElement> partials;
  for (double t : grid) partials.push_back(partial_cond_exp(f, pair, t));
  if (!intervals) {
    cb.values = std::move(partials);
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = i + 1; j < grid.size(); ++j) cb.values.push_back(partials[j] - partials[i]);
  }
  return cb;
}

std::vector<std::vector<double>> reconstruct_sorted(const LpCanonicalBase& cb, std::size_t n) {
  const std::vector<double> g = uniform_grid(n);
  if (cb.intervals || cb.grid.size() != g.size())
    throw InvalidInput("reconstruction needs the partial family on the full grid {k/n}");
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(cb.grid[k] - g[k]) > kTolerance) throw InvalidInput("grid is not {k/n}");
  const std::size_t atoms = cb.values.front().size();
  std::vector<std::vector<double>> out(atoms, std::vector<double>(n));
  for (std::size_t w = 0; w < atoms; ++w)
    for (std::size_t k = 1; k <= n; ++k)
      out[w][k - 1] = static_cast<double>(n) * (cb.values[k][w] - cb.values[k - 1][w]);
  return out;
}

NTypeBase canonical_base_ntype(const std::vector<LatticeElement>& fs, const ExtensionPair& pair, double p,
                               const std::vector<double>& grid, int k_range) {
  if (fs.empty()) throw InvalidInput("empty tuple");
  if (k_range < 1) throw InvalidInput("k_range must be at least 1");
  NTypeBase out;
  out.summary = DirectionalMass(fs, p);
  std::vector<int> k(fs.size(), -k_range);
  for (;;) {
    if (std::any_of(k.begin(), k.end(), [](int c) { return c != 0; })) {
      LatticeElement comb = LatticeElement::zero(fs.front().space());
      for (std::size_t i = 0; i < fs.size(); ++i) comb = comb + fs[i] * static_cast<double>(k[i]);
      out.coefficients.push_back(k);
      out.bases.push_back(canonical_base_1type(comb, pair, p, grid));
    }
    std::size_t d = 0;
    while (d < k.size() && ++k[d] > k_range) k[d++] = -k_range;
    if (d == k.size()) break;
  }
  return out;
}

P1Report p1_counterexample(std::size_t m, double p, std::size_t fiber_cells, const std::vector<double>& base_weights) {
  require_p(p);
  if (m == 0) throw InvalidInput("ε = 1/m needs m ≥ 1");
  if (fiber_cells == 0) fiber_cells = m;
  if (fiber_cells % m != 0)
    throw InvalidInput("m = " + std::to_string(m) + " does not divide fiber_cells = " + std::to_string(fiber_cells));
  double mass = 0.0;
  for (double w : base_weights) mass += w;
  if (std::abs(mass - 1.0) > kTolerance) throw InvalidInput("base space must have total mass 1");
  const ExtensionPair pair(base_weights, fiber_cells, false);
  const double eps = 1.0 / static_cast<double>(m);
  const double level = -std::pow(static_cast<double>(m), 1.0 / p);
  std::vector<std::vector<double>> rows(base_weights.size(), std::vector<double>(fiber_cells, 0.0));
  for (auto& r : rows) std::fill_n(r.begin(), fiber_cells / m, level);
  const LatticeElement f = pair.from_rows(rows);
  P1Report rep{m, p, eps, lp_norm(f, p), 0.0, std::pow(eps, 1.0 - 1.0 / p), partial_cond_exp(f, pair, eps)};
  rep.e_norm = lp_norm(rep.partial, p);
  return rep;
}

RemarkReport remark_counterexample(int k_range) {
  if (k_range < 0) throw InvalidInput("k_range must be nonnegative");
  const SpacePtr sp = make_space({1.0, 1.0, 1.0});
  const LatticeElement g(sp, {1.0, -1.0, 0.0}), h(sp, {1.0, 1.0, -2.0});
  RemarkReport rep;
  rep.k_range = k_range;
  for (int k = -k_range; k <= k_range; ++k)
    for (int l = -k_range; l <= k_range; ++l) {
      const LatticeElement a = g * k + h * l, b = g * k - h * l;
      const bool norms = std::abs(lp_norm(positive_part(a), 1.0) - lp_norm(positive_part(b), 1.0)) <= kTolerance &&
                         std::abs(lp_norm(negative_part(a), 1.0) - lp_norm(negative_part(b), 1.0)) <= kTolerance;
      rep.one_types_agree = rep.one_types_agree && norms && absolute_type_equal({a}, {b}, 1.0);
      ++rep.pairs_checked;
    }
  rep.joint_types_differ = !absolute_type_equal({g, h}, {g, neg(h)}, 1.0);
  const LatticeTerm tau = LatticeTerm::positive_part(LatticeTerm::meet(LatticeTerm::var(0), LatticeTerm::var(1)));
  rep.witness_gh = eval_element(tau, {g, h}).integral();
  rep.witness_g_minus_h = eval_element(tau, {g, neg(h)}).integral();
  return rep;
}

}  // namespace canonlab
