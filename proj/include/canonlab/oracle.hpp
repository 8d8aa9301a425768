#pragma once

// Brute-force type comparison at the atomic level.  These are the ground
// truth for every canonical-base claim.

#include <vector>

#include "canonlab/measure.hpp"

namespace canonlab {

/// Finite measure on rays: each entry is a direction with sup-norm 1 and the
/// mass w·‖v‖∞^p it carries.  Entries are sorted and merged at kTolerance.
class DirectionalMass {
 public:
  struct Entry {
    std::vector<double> direction;
    double mass = 0.0;
  };

  DirectionalMass() = default;
  /// Atoms listed in `atoms` (all atoms when empty) of the tuple's common space.
  DirectionalMass(const std::vector<LatticeElement>& tuple, double p, const std::vector<std::size_t>& atoms = {});

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool equals(const DirectionalMass& other, double tol = kTolerance) const;

 private:
  std::vector<Entry> entries_;
};

/// Per base atom, the fiber value-vectors of a tuple sorted lexicographically.
struct ConditionalDistribution {
  std::vector<std::vector<std::vector<double>>> fibers;
  DirectionalMass orthogonal;

  bool equals(const ConditionalDistribution& other, double tol = kTolerance) const;
};

ConditionalDistribution conditional_distribution(const std::vector<LatticeElement>& tuple, const ExtensionPair& pair,
                                                 double p);

/// ‖f⁺↾E⊥‖_p and ‖f⁻↾E⊥‖_p (the mass on the {±} fibers).
struct OrthogonalNorms {
  double pos = 0.0;
  double neg = 0.0;
};
OrthogonalNorms orthogonal_norms(const LatticeElement& f, const ExtensionPair& pair, double p);

bool type_equal_1(const LatticeElement& f, const LatticeElement& g, const ExtensionPair& pair, double p);
bool type_equal_n(const std::vector<LatticeElement>& fs, const std::vector<LatticeElement>& gs,
                  const ExtensionPair& pair, double p);
/// Parameter-free comparison; the tuples may live on different spaces.
bool absolute_type_equal(const std::vector<LatticeElement>& fs, const std::vector<LatticeElement>& gs, double p);

}  // namespace canonlab
