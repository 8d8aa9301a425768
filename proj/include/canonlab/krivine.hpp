#pragma once

// Krivine calculus: vector-lattice terms, their evaluation on reals and on
// lattice elements, and approximation of continuous positively homogeneous
// functions by lattice terms.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "canonlab/measure.hpp"

namespace canonlab {

using Rational64 = boost::rational<std::int64_t>;

/// Exact dyadic value of `x` when numerator and denominator fit in 64 bits,
/// otherwise the nearest fraction with denominator 2^62.
Rational64 rational_from_double(double x);

enum class TermKind { Zero, Var, Neg, HalfSum, Abs, Join, Meet, Scale };

/// Immutable lattice-term AST.  Subterms are shared, so terms built by the
/// approximation routines are DAGs rather than trees.
class LatticeTerm {
 public:
  static LatticeTerm zero();
  static LatticeTerm var(std::size_t index);
  static LatticeTerm neg(LatticeTerm t);
  static LatticeTerm half_sum(LatticeTerm a, LatticeTerm b);
  static LatticeTerm abs(LatticeTerm t);
  static LatticeTerm join(LatticeTerm a, LatticeTerm b);
  static LatticeTerm meet(LatticeTerm a, LatticeTerm b);
  static LatticeTerm scale(Rational64 q, LatticeTerm t);

  /// z⁺ = z ∨ 0 and z⁻ = (−z) ∨ 0
  static LatticeTerm positive_part(LatticeTerm t);
  static LatticeTerm negative_part(LatticeTerm t);
  /// Σ c_i x_i built from half-sums and rational scalings.
  static LatticeTerm linear(std::span<const double> coefficients);

  TermKind kind() const;
  std::size_t var_index() const;
  const Rational64& scalar() const;
  const LatticeTerm& lhs() const;
  const LatticeTerm& rhs() const;

  /// One more than the largest variable index (0 for closed terms).
  std::size_t min_arity() const;
  std::size_t node_count() const;

  /// Concrete syntax accepted by parse_term.
  std::string to_string() const;

  bool operator==(const LatticeTerm& other) const;

  const void* identity() const { return node_.get(); }

 private:
  struct Node;
  explicit LatticeTerm(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Grammar: `0`, `x<i>`, `neg(a)`, `abs(a)`, `avg(a, b)`, `a \/ b`, `a /\ b`,
/// `q*a` with q an integer, fraction or decimal, and parentheses.  Join and
/// meet share one precedence level and associate to the left.
LatticeTerm parse_term(const std::string& text, std::size_t arity);

double eval_scalar(const LatticeTerm& t, std::span<const double> point);

/// Pointwise evaluation on elements sharing one measure space.
LatticeElement eval_element(const LatticeTerm& t, const std::vector<LatticeElement>& args);

/// Flattened DAG for repeated evaluation; each shared node runs once per point.
class CompiledTerm {
 public:
  explicit CompiledTerm(const LatticeTerm& t);
  double operator()(std::span<const double> point) const;
  std::size_t min_arity() const noexcept { return arity_; }

 private:
  struct Op {
    TermKind kind;
    std::size_t a = 0, b = 0;
    double c = 0.0;
  };
  std::vector<Op> ops_;
  std::size_t arity_ = 0;
  mutable std::vector<double> scratch_;
};

/// Term with t(x) = a and t(y) = b for distinct unit vectors x, y.
LatticeTerm interpolating_term(std::span<const double> x, std::span<const double> y, double a, double b);

/// Exact sup of |t| over [−1,1]^n for arity ≤ 2.  For larger arity the result
/// is a certified upper bound (boundary grid maximum plus Lipschitz slack).
double term_sup_norm(const LatticeTerm& t);

/// Lipschitz constant of t with respect to the sup norm on inputs.
double term_lipschitz(const LatticeTerm& t);

// ---------------------------------------------------------------------------

/// A continuous ℝ⁺-homogeneous degree-one function with a declared modulus
/// of continuity on the unit sphere.
struct HomogeneousFn {
  std::string name;
  std::size_t arity = 0;
  std::function<double(std::span<const double>)> eval;
  std::function<double(double)> modulus;
};

/// Registry: `euclid`, `identity`, `geomean(α)`, `power(p,q)` (with
/// 1/p + 1/q = 1), `halfsum_pq(p,q)`.
HomogeneousFn homogeneous_by_name(const std::string& text);

/// Max deviation of φ(αx) − αφ(x) over random sphere points and α ∈ [0, 4].
double homogeneity_defect(const HomogeneousFn& phi, std::size_t samples, std::uint64_t seed);

struct SphereApproximation {
  LatticeTerm term = LatticeTerm::zero();
  /// max |t − φ| over the sample grid, measured on the final term
  double certified_error = 0.0;
  /// certified_error plus the modulus slack between grid points
  double uniform_bound = 0.0;
  std::size_t pieces = 0;
  std::size_t iterations = 0;
  bool reached = false;
};

struct ApproximationOptions {
  std::size_t max_pieces = 400;
  /// equiangular starting nodes on the circle
  std::size_t initial_nodes = 4;
  std::uint64_t seed = 0;
};

/// Lattice-term approximation of φ on the unit sphere.  Arity 1 is exact;
/// arity 2 refines a max–min of linear pieces at the worst grid sample;
/// higher arity interpolates φ on the facets of the convex hull of a greedy
/// node set.
SphereApproximation approximate_on_sphere(const HomogeneousFn& phi, double eps, std::size_t grid,
                                          const ApproximationOptions& options = {});

/// Sample points of the unit sphere used for certification: equiangular on
/// the circle for n = 2, ±1 for n = 1, seeded Gaussian directions otherwise.
std::vector<std::vector<double>> sphere_samples(std::size_t n, std::size_t count, std::uint64_t seed = 0);

}  // namespace canonlab
