#include "canonlab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "canonlab/error.hpp"

namespace canonlab {

namespace {

void require_tuple(const std::vector<LatticeElement>& tuple) {
  if (tuple.empty()) throw InvalidInput("empty tuple");
  for (const auto& f : tuple)
    if (!f.same_space(tuple.front())) throw InvalidInput("tuple elements live on different spaces");
}

/// Lexicographic order that treats coordinates within tol as equal.
bool lex_less(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return false;
}

bool close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

DirectionalMass::DirectionalMass(const std::vector<LatticeElement>& tuple, double p,
                                 const std::vector<std::size_t>& atoms) {
  require_tuple(tuple);
  if (!(p >= 1.0)) throw InvalidInput("exponent p must be at least 1");
  const auto& space = *tuple.front().space();
  std::vector<std::size_t> which = atoms;
  if (which.empty()) {
    which.resize(space.size());
    for (std::size_t i = 0; i < which.size(); ++i) which[i] = i;
  }
  std::vector<Entry> raw;
  for (std::size_t a : which) {
    if (a >= space.size()) throw InvalidInput("atom index out of range");
    std::vector<double> v(tuple.size());
    double sup = 0.0;
    for (std::size_t k = 0; k < tuple.size(); ++k) {
      v[k] = tuple[k][a];
      sup = std::max(sup, std::abs(v[k]));
    }
    if (sup == 0.0) continue;
    for (double& c : v) c /= sup;
    raw.push_back({std::move(v), space.weight(a) * std::pow(sup, p)});
  }
  std::sort(raw.begin(), raw.end(),
            [](const Entry& x, const Entry& y) { return lex_less(x.direction, y.direction, kTolerance); });
  for (auto& e : raw) {
    if (!entries_.empty() && close(entries_.back().direction, e.direction, kTolerance))
      entries_.back().mass += e.mass;
    else
      entries_.push_back(std::move(e));
  }
}

bool DirectionalMass::equals(const DirectionalMass& other, double tol) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!close(entries_[i].direction, other.entries_[i].direction, tol)) return false;
    if (std::abs(entries_[i].mass - other.entries_[i].mass) > tol) return false;
  }
  return true;
}

ConditionalDistribution conditional_distribution(const std::vector<LatticeElement>& tuple, const ExtensionPair& pair,
                                                 double p) {
  require_tuple(tuple);
  for (const auto& f : tuple) pair.require_total(f);
  ConditionalDistribution d;
  d.fibers.resize(pair.base_atoms());
  for (std::size_t w = 0; w < pair.base_atoms(); ++w) {
    auto& fiber = d.fibers[w];
    for (std::size_t j = 0; j < pair.fiber_cells(); ++j) {
      std::vector<double> v(tuple.size());
      for (std::size_t k = 0; k < tuple.size(); ++k) v[k] = tuple[k][pair.cell(w, j)];
      fiber.push_back(std::move(v));
    }
    std::sort(fiber.begin(), fiber.end(),
              [](const auto& a, const auto& b) { return lex_less(a, b, kTolerance); });
  }
  std::vector<std::size_t> orth;
  if (pair.has_orthogonal())
    for (std::size_t j = 0; j < 2 * pair.fiber_cells(); ++j) orth.push_back(pair.plus_cell(0) + j);
  if (!orth.empty()) d.orthogonal = DirectionalMass(tuple, p, orth);
  return d;
}

bool ConditionalDistribution::equals(const ConditionalDistribution& other, double tol) const {
  if (fibers.size() != other.fibers.size()) return false;
  for (std::size_t w = 0; w < fibers.size(); ++w) {
    if (fibers[w].size() != other.fibers[w].size()) return false;
    for (std::size_t j = 0; j < fibers[w].size(); ++j)
      if (!close(fibers[w][j], other.fibers[w][j], tol)) return false;
  }
  return orthogonal.equals(other.orthogonal, tol);
}

OrthogonalNorms orthogonal_norms(const LatticeElement& f, const ExtensionPair& pair, double p) {
  pair.require_total(f);
  if (!(p >= 1.0)) throw InvalidInput("exponent p must be at least 1");
  OrthogonalNorms n;
  if (!pair.has_orthogonal()) return n;
  const double w = 1.0 / static_cast<double>(pair.fiber_cells());
  for (std::size_t j = 0; j < 2 * pair.fiber_cells(); ++j) {
    const double v = f[pair.plus_cell(0) + j];
    if (v > 0) n.pos += w * std::pow(v, p);
    if (v < 0) n.neg += w * std::pow(-v, p);
  }
  n.pos = std::pow(n.pos, 1.0 / p);
  n.neg = std::pow(n.neg, 1.0 / p);
  return n;
}

bool type_equal_1(const LatticeElement& f, const LatticeElement& g, const ExtensionPair& pair, double p) {
  pair.require_total(f);
  pair.require_total(g);
  std::vector<double> a, b;
  for (std::size_t w = 0; w < pair.base_atoms(); ++w) {
    const auto ra = pair.row(f, w), rb = pair.row(g, w);
    a.assign(ra.begin(), ra.end());
    b.assign(rb.begin(), rb.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t j = 0; j < a.size(); ++j)
      if (std::abs(a[j] - b[j]) > kTolerance) return false;
  }
  const OrthogonalNorms nf = orthogonal_norms(f, pair, p), ng = orthogonal_norms(g, pair, p);
  return std::abs(nf.pos - ng.pos) <= kTolerance && std::abs(nf.neg - ng.neg) <= kTolerance;
}

bool type_equal_n(const std::vector<LatticeElement>& fs, const std::vector<LatticeElement>& gs,
                  const ExtensionPair& pair, double p) {
  if (fs.size() != gs.size()) throw InvalidInput("tuples of different length");
  return conditional_distribution(fs, pair, p).equals(conditional_distribution(gs, pair, p));
}

bool absolute_type_equal(const std::vector<LatticeElement>& fs, const std::vector<LatticeElement>& gs, double p) {
  if (fs.size() != gs.size()) throw InvalidInput("tuples of different length");
  return DirectionalMass(fs, p).equals(DirectionalMass(gs, p));
}

}  // namespace canonlab
