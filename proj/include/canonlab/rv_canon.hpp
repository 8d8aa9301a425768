#pragma once

// [0,1]-valued random variables over a finite probability space: conditional
// moments, probability-algebra bases and the event lift B_X.

#include <cstdint>
#include <vector>

#include "canonlab/measure.hpp"

namespace canonlab {

/// A lattice element with every value in [0, 1].
class RVElement {
 public:
  explicit RVElement(LatticeElement values);
  RVElement(SpacePtr space, std::vector<double> values);

  const LatticeElement& element() const noexcept { return x_; }
  const SpacePtr& space() const noexcept { return x_.space(); }
  std::size_t size() const noexcept { return x_.size(); }
  double operator[](std::size_t i) const { return x_[i]; }

 private:
  LatticeElement x_;
};

enum class RVOp { Not, Half, Join, Meet };

/// ¬X = 1 − X, ½X, X ∨ Y, X ∧ Y.
RVElement rv_op(RVOp op, const RVElement& x, const RVElement* y = nullptr);

/// E[X] = d(X, 0) on a probability space.
double expectation(const RVElement& x);

/// Throws unless `s` partitions every atom of `space` (a conditioning algebra).
void require_partition(const SubStructure& s, const MeasureSpace& space);

/// E[Π X_i^{k_i} | s].
RVElement cond_moment(const std::vector<RVElement>& xs, const std::vector<unsigned>& k, const SubStructure& s);

struct LeastSquaresReport {
  bool passed = false;
  /// smallest excess ‖X^k − y‖² − ‖X^k − Y‖² over candidates y away from Y
  double margin = 0.0;
  double optimum = 0.0;
};

/// Compares Y = E[X^k|s] against block-constant candidates from a grid of
/// `candidates` + 1 values per block.
LeastSquaresReport least_squares_check(const RVElement& x, unsigned k, const SubStructure& s,
                                       std::size_t candidates = 64);

struct ProductCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// E[X̄^k̄ Ȳ^ℓ̄] against E[E[X̄^k̄|s] Ȳ^ℓ̄]; each Y must be constant on blocks.
ProductCheck product_formula_check(const std::vector<RVElement>& xs, const std::vector<unsigned>& k,
                                   const std::vector<RVElement>& ys, const std::vector<unsigned>& l,
                                   const SubStructure& s);

struct AprEntry {
  std::uint32_t subset = 0;  // bit i set when event i is in the meet
  RVElement probability;
};

/// P[⋀_{i∈S} A_i | s] for every nonempty S, in increasing bitmask order.
std::vector<AprEntry> apr_cb(const std::vector<RVElement>& events, const SubStructure& s);

struct LiftedEvent {
  ExtensionPair pair;
  LatticeElement indicator;
};

/// B_X = {(ω, r): r ≤ X(ω)} with cell j of fiber ω lit when j < X(ω)·n.
/// X must take values in {k/n}.
LiftedEvent lift_event(const RVElement& x, std::size_t fiber_cells);

struct MomentReport {
  bool sufficient = false;
  std::size_t max_support = 0;
  bool moments_equal = false;
  bool distributions_equal = false;
  double reconstruction_error = 0.0;
  bool passed = false;
};

/// Whether equal conditional moments up to max_k coincide with equal block
/// distributions.  Needs max_k ≥ |support of X and Y in a block| − 1; when
/// that fails `sufficient` is false and `passed` stays false.
MomentReport moments_determine_check(const RVElement& x, const RVElement& y, const SubStructure& s,
                                     unsigned max_k);

}  // namespace canonlab
