#pragma once

// Finite measure spaces and the L_p vector-lattice structure on functions
// over their atoms.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace canonlab {

/// Absolute tolerance used for every floating comparison in the library.
inline constexpr double kTolerance = 1e-9;

class MeasureSpace {
 public:
  explicit MeasureSpace(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  double total() const noexcept { return total_; }

  bool operator==(const MeasureSpace& other) const { return weights_ == other.weights_; }

 private:
  std::vector<double> weights_;
  double total_ = 0.0;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

SpacePtr make_space(std::vector<double> weights);

/// A real function on the atoms of a finite measure space.
class LatticeElement {
 public:
  LatticeElement(SpacePtr space, std::vector<double> values);

  static LatticeElement zero(SpacePtr space);
  static LatticeElement constant(SpacePtr space, double c);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_space(const LatticeElement& other) const;

  /// Weighted integral, summed left to right over atom index.
  double integral() const;

  LatticeElement operator+(const LatticeElement& other) const;
  LatticeElement operator-(const LatticeElement& other) const;
  LatticeElement operator*(double c) const;

 private:
  SpacePtr space_;
  std::vector<double> values_;
};

/// Block decomposition of a subset of atoms; the atoms of a conditioning
/// sub-algebra.
class SubStructure {
 public:
  explicit SubStructure(std::vector<std::vector<std::size_t>> blocks);

  /// One block holding every atom of the space.
  static SubStructure trivial(std::size_t atoms);
  /// Every atom its own block.
  static SubStructure discrete(std::size_t atoms);

  const std::vector<std::vector<std::size_t>>& blocks() const noexcept { return blocks_; }
  std::vector<std::size_t> support() const;
  bool in_support(std::size_t atom) const;

  /// Throws InvalidInput unless every index is an atom of `space`.
  void validate(const MeasureSpace& space) const;

 private:
  std::vector<std::vector<std::size_t>> blocks_;
};

/// The discretized standard extension E ⊆ E'.  E lives on the base atoms;
/// E' has `fiber_cells` equal cells above each base atom and, optionally,
/// the two orthogonal fibers {+} and {−} of total mass one each.
class ExtensionPair {
 public:
  ExtensionPair(std::vector<double> base_weights, std::size_t fiber_cells, bool has_orthogonal);

  std::size_t base_atoms() const noexcept { return base_->size(); }
  std::size_t fiber_cells() const noexcept { return cells_; }
  bool has_orthogonal() const noexcept { return orthogonal_; }

  const SpacePtr& base_space() const noexcept { return base_; }
  const SpacePtr& total_space() const noexcept { return total_; }

  std::size_t cell(std::size_t base_atom, std::size_t j) const { return base_atom * cells_ + j; }
  std::size_t plus_cell(std::size_t j) const;
  std::size_t minus_cell(std::size_t j) const;

  /// Fiber values of `f` above `base_atom`.
  std::span<const double> row(const LatticeElement& f, std::size_t base_atom) const;
  std::span<const double> plus_fiber(const LatticeElement& f) const;
  std::span<const double> minus_fiber(const LatticeElement& f) const;

  /// Fibers over the base atoms; the conditioning structure for E.
  SubStructure base_structure() const;

  /// Fiber-constant copy of an element of E, zero on the orthogonal part.
  LatticeElement embed(const LatticeElement& base_element) const;

  /// Fiberwise average, as an element of E.
  LatticeElement fiber_mean(const LatticeElement& f) const;

  LatticeElement from_rows(const std::vector<std::vector<double>>& rows,
                           const std::vector<double>& plus = {},
                           const std::vector<double>& minus = {}) const;

  void require_total(const LatticeElement& f) const;
  void require_base(const LatticeElement& g) const;

  bool operator==(const ExtensionPair& other) const;

 private:
  std::size_t cells_;
  bool orthogonal_;
  SpacePtr base_;
  SpacePtr total_;
};

// ---------------------------------------------------------------------------
// L_p structure

double lp_norm(const LatticeElement& f, double p);

/// Structure distance ‖½(f − g)‖_p.
double lp_distance(const LatticeElement& f, const LatticeElement& g, double p);

/// x^α for x ≥ 0 and −|x|^α for x < 0.
double signed_power(double x, double alpha);
LatticeElement signed_power(const LatticeElement& f, double alpha);

enum class LatticeOp { Neg, Abs, Join, Meet, HalfSum, DotMinus, Scale };

/// Pointwise lattice operation.  Binary ops need `g`; Scale reads `scalar`.
LatticeElement lattice_op(LatticeOp op, const LatticeElement& f,
                          const LatticeElement* g = nullptr, double scalar = 1.0);

LatticeElement neg(const LatticeElement& f);
LatticeElement abs(const LatticeElement& f);
LatticeElement join(const LatticeElement& f, const LatticeElement& g);
LatticeElement meet(const LatticeElement& f, const LatticeElement& g);
LatticeElement halfsum(const LatticeElement& f, const LatticeElement& g);
/// (f − g) ∨ 0
LatticeElement dotminus(const LatticeElement& f, const LatticeElement& g);
LatticeElement positive_part(const LatticeElement& f);
LatticeElement negative_part(const LatticeElement& f);

/// Block means on the support of `s`, zero elsewhere.
LatticeElement cond_exp(const LatticeElement& f, const SubStructure& s);

struct BandParts {
  LatticeElement inside;
  LatticeElement outside;
};

/// f = f·1_support + f·1_complement.
BandParts band_decompose(const LatticeElement& f, const SubStructure& s);

/// |f| ∧ |g| = 0
bool orthogonal(const LatticeElement& f, const LatticeElement& g);

bool approx_equal(const LatticeElement& f, const LatticeElement& g, double tol = kTolerance);

}  // namespace canonlab
