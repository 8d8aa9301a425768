#include "canonlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "canonlab/error.hpp"

namespace canonlab {

MeasureSpace::MeasureSpace(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InvalidInput("measure space needs at least one atom");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w <= 0.0)
      throw InvalidInput("atom " + std::to_string(i) + " has non-positive or non-finite weight");
    total_ += w;
  }
}

SpacePtr make_space(std::vector<double> weights) {
  return std::make_shared<const MeasureSpace>(std::move(weights));
}

LatticeElement::LatticeElement(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) throw InvalidInput("element without a measure space");
  if (values_.size() != space_->size())
    throw InvalidInput("element has " + std::to_string(values_.size()) + " values for " +
                       std::to_string(space_->size()) + " atoms");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidInput("element value is not finite");
}

LatticeElement LatticeElement::zero(SpacePtr space) { return constant(std::move(space), 0.0); }

LatticeElement LatticeElement::constant(SpacePtr space, double c) {
  const std::size_t n = space->size();
  return LatticeElement(std::move(space), std::vector<double>(n, c));
}

bool LatticeElement::same_space(const LatticeElement& other) const {
  return space_ == other.space_ || *space_ == *other.space_;
}

double LatticeElement::integral() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) sum += space_->weight(i) * values_[i];
  return sum;
}

namespace {

void require_same(const LatticeElement& f, const LatticeElement& g) {
  if (!f.same_space(g)) throw InvalidInput("elements live on different measure spaces");
}

template <class Fn>
LatticeElement pointwise(const LatticeElement& f, Fn fn) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return LatticeElement(f.space(), std::move(out));
}

template <class Fn>
LatticeElement pointwise(const LatticeElement& f, const LatticeElement& g, Fn fn) {
  require_same(f, g);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i], g[i]);
  return LatticeElement(f.space(), std::move(out));
}

}  // namespace

LatticeElement LatticeElement::operator+(const LatticeElement& other) const {
  return pointwise(*this, other, [](double a, double b) { return a + b; });
}

LatticeElement LatticeElement::operator-(const LatticeElement& other) const {
  return pointwise(*this, other, [](double a, double b) { return a - b; });
}

LatticeElement LatticeElement::operator*(double c) const {
  return pointwise(*this, [c](double a) { return a * c; });
}

// ---------------------------------------------------------------------------

SubStructure::SubStructure(std::vector<std::vector<std::size_t>> blocks) : blocks_(std::move(blocks)) {
  std::vector<std::size_t> seen;
  for (const auto& b : blocks_) {
    if (b.empty()) throw InvalidInput("substructure has an empty block");
    seen.insert(seen.end(), b.begin(), b.end());
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw InvalidInput("substructure blocks overlap");
}

SubStructure SubStructure::trivial(std::size_t atoms) {
  std::vector<std::size_t> all(atoms);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return SubStructure({std::move(all)});
}

SubStructure SubStructure::discrete(std::size_t atoms) {
  std::vector<std::vector<std::size_t>> blocks(atoms);
  for (std::size_t i = 0; i < atoms; ++i) blocks[i] = {i};
  return SubStructure(std::move(blocks));
}

std::vector<std::size_t> SubStructure::support() const {
  std::vector<std::size_t> out;
  for (const auto& b : blocks_) out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool SubStructure::in_support(std::size_t atom) const {
  for (const auto& b : blocks_)
    if (std::find(b.begin(), b.end(), atom) != b.end()) return true;
  return false;
}

void SubStructure::validate(const MeasureSpace& space) const {
  for (const auto& b : blocks_)
    for (std::size_t i : b)
      if (i >= space.size())
        throw InvalidInput("block index " + std::to_string(i) + " outside a space of " +
                           std::to_string(space.size()) + " atoms");
}

// ---------------------------------------------------------------------------

ExtensionPair::ExtensionPair(std::vector<double> base_weights, std::size_t fiber_cells, bool has_orthogonal)
    : cells_(fiber_cells), orthogonal_(has_orthogonal) {
  if (cells_ == 0) throw InvalidInput("fiber_cells must be positive");
  base_ = make_space(std::move(base_weights));
  std::vector<double> total;
  total.reserve((base_->size() + (orthogonal_ ? 2 : 0)) * cells_);
  for (double w : base_->weights())
    for (std::size_t j = 0; j < cells_; ++j) total.push_back(w / static_cast<double>(cells_));
  if (orthogonal_)
    for (std::size_t j = 0; j < 2 * cells_; ++j) total.push_back(1.0 / static_cast<double>(cells_));
  total_ = make_space(std::move(total));
}

std::size_t ExtensionPair::plus_cell(std::size_t j) const {
  if (!orthogonal_) throw InvalidInput("extension has no orthogonal part");
  return base_atoms() * cells_ + j;
}

std::size_t ExtensionPair::minus_cell(std::size_t j) const {
  if (!orthogonal_) throw InvalidInput("extension has no orthogonal part");
  return (base_atoms() + 1) * cells_ + j;
}

std::span<const double> ExtensionPair::row(const LatticeElement& f, std::size_t base_atom) const {
  require_total(f);
  return f.values().subspan(cell(base_atom, 0), cells_);
}

std::span<const double> ExtensionPair::plus_fiber(const LatticeElement& f) const {
  require_total(f);
  if (!orthogonal_) return {};
  return f.values().subspan(plus_cell(0), cells_);
}

std::span<const double> ExtensionPair::minus_fiber(const LatticeElement& f) const {
  require_total(f);
  if (!orthogonal_) return {};
  return f.values().subspan(minus_cell(0), cells_);
}

SubStructure ExtensionPair::base_structure() const {
  std::vector<std::vector<std::size_t>> blocks(base_atoms());
  for (std::size_t i = 0; i < base_atoms(); ++i) {
    blocks[i].resize(cells_);
    std::iota(blocks[i].begin(), blocks[i].end(), cell(i, 0));
  }
  return SubStructure(std::move(blocks));
}

LatticeElement ExtensionPair::embed(const LatticeElement& g) const {
  require_base(g);
  std::vector<double> out(total_->size(), 0.0);
  for (std::size_t i = 0; i < base_atoms(); ++i)
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(cell(i, 0)), cells_, g[i]);
  return LatticeElement(total_, std::move(out));
}

LatticeElement ExtensionPair::fiber_mean(const LatticeElement& f) const {
  require_total(f);
  std::vector<double> out(base_atoms());
  for (std::size_t i = 0; i < base_atoms(); ++i) {
    double s = 0.0;
    for (double v : row(f, i)) s += v;
    out[i] = s / static_cast<double>(cells_);
  }
  return LatticeElement(base_, std::move(out));
}

LatticeElement ExtensionPair::from_rows(const std::vector<std::vector<double>>& rows,
                                        const std::vector<double>& plus,
                                        const std::vector<double>& minus) const {
  if (rows.size() != base_atoms())
    throw InvalidInput("expected " + std::to_string(base_atoms()) + " rows, got " +
                       std::to_string(rows.size()));
  std::vector<double> out;
  out.reserve(total_->size());
  for (const auto& r : rows) {
    if (r.size() != cells_) throw InvalidInput("row length differs from fiber_cells");
    out.insert(out.end(), r.begin(), r.end());
  }
  auto orth = [&](const std::vector<double>& fib, const char* name) {
    if (fib.empty()) {
      if (orthogonal_) out.insert(out.end(), cells_, 0.0);
      return;
    }
    if (!orthogonal_)
      throw InvalidInput(std::string("nonzero '") + name + "' fiber on a pair without orthogonal part");
    if (fib.size() != cells_) throw InvalidInput(std::string("'") + name + "' fiber length differs from fiber_cells");
    out.insert(out.end(), fib.begin(), fib.end());
  };
  orth(plus, "plus");
  orth(minus, "minus");
  return LatticeElement(total_, std::move(out));
}

void ExtensionPair::require_total(const LatticeElement& f) const {
  if (!(f.space() == total_ || *f.space() == *total_))
    throw InvalidInput("element does not live on the extension E'");
}

void ExtensionPair::require_base(const LatticeElement& g) const {
  if (!(g.space() == base_ || *g.space() == *base_))
    throw InvalidInput("element does not live on the base E");
}

bool ExtensionPair::operator==(const ExtensionPair& other) const {
  return cells_ == other.cells_ && orthogonal_ == other.orthogonal_ && *base_ == *other.base_;
}

// ---------------------------------------------------------------------------

double lp_norm(const LatticeElement& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidInput("L_p exponent must be a finite p >= 1");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f.space()->weight(i) * std::pow(std::abs(f[i]), p);
  return std::pow(sum, 1.0 / p);
}

double lp_distance(const LatticeElement& f, const LatticeElement& g, double p) {
  return lp_norm((f - g) * 0.5, p);
}

double signed_power(double x, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("signed power needs a positive exponent");
  return x < 0.0 ? -std::pow(-x, alpha) : std::pow(x, alpha);
}

LatticeElement signed_power(const LatticeElement& f, double alpha) {
  if (!(alpha > 0.0)) throw InvalidInput("signed power needs a positive exponent");
  return pointwise(f, [alpha](double x) { return signed_power(x, alpha); });
}

LatticeElement neg(const LatticeElement& f) {
  return pointwise(f, [](double a) { return -a; });
}
LatticeElement abs(const LatticeElement& f) {
  return pointwise(f, [](double a) { return std::abs(a); });
}
LatticeElement join(const LatticeElement& f, const LatticeElement& g) {
  return pointwise(f, g, [](double a, double b) { return std::max(a, b); });
}
LatticeElement meet(const LatticeElement& f, const LatticeElement& g) {
  return pointwise(f, g, [](double a, double b) { return std::min(a, b); });
}
LatticeElement halfsum(const LatticeElement& f, const LatticeElement& g) {
  return pointwise(f, g, [](double a, double b) { return 0.5 * (a + b); });
}
LatticeElement dotminus(const LatticeElement& f, const LatticeElement& g) {
  return pointwise(f, g, [](double a, double b) { return std::max(a - b, 0.0); });
}
LatticeElement positive_part(const LatticeElement& f) {
  return pointwise(f, [](double a) { return std::max(a, 0.0); });
}
LatticeElement negative_part(const LatticeElement& f) {
  return pointwise(f, [](double a) { return std::max(-a, 0.0); });
}

LatticeElement lattice_op(LatticeOp op, const LatticeElement& f, const LatticeElement* g, double scalar) {
  auto other = [&]() -> const LatticeElement& {
    if (!g) throw InvalidInput("binary lattice operation needs a second operand");
    return *g;
  };
  switch (op) {
    case LatticeOp::Neg: return neg(f);
    case LatticeOp::Abs: return abs(f);
    case LatticeOp::Join: return join(f, other());
    case LatticeOp::Meet: return meet(f, other());
    case LatticeOp::HalfSum: return halfsum(f, other());
    case LatticeOp::DotMinus: return dotminus(f, other());
    case LatticeOp::Scale: return f * scalar;
  }
  throw InvalidInput("unknown lattice operation");
}

LatticeElement cond_exp(const LatticeElement& f, const SubStructure& s) {
  s.validate(*f.space());
  const auto& w = f.space()->weights();
  std::vector<double> out(f.size(), 0.0);
  for (const auto& block : s.blocks()) {
    double mass = 0.0, sum = 0.0;
    for (std::size_t i : block) {
      mass += w[i];
      sum += w[i] * f[i];
    }
    const double mean = sum / mass;
    for (std::size_t i : block) out[i] = mean;
  }
  return LatticeElement(f.space(), std::move(out));
}

BandParts band_decompose(const LatticeElement& f, const SubStructure& s) {
  s.validate(*f.space());
  std::vector<double> inside(f.size(), 0.0), outside(f.values().begin(), f.values().end());
  for (std::size_t i : s.support()) {
    inside[i] = f[i];
    outside[i] = 0.0;
  }
  return {LatticeElement(f.space(), std::move(inside)), LatticeElement(f.space(), std::move(outside))};
}

bool orthogonal(const LatticeElement& f, const LatticeElement& g) {
  require_same(f, g);
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::min(std::abs(f[i]), std::abs(g[i])) != 0.0) return false;
  return true;
}

bool approx_equal(const LatticeElement& f, const LatticeElement& g, double tol) {
  if (!f.same_space(g)) return false;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f[i] - g[i]) > tol) return false;
  return true;
}

}  // namespace canonlab
