#pragma once

// Canonical bases for types over a sublattice E ⊆ E' of an L_p space:
// Ψ_f, partial and interval conditional expectations, slices, increasing
// realisations, grid approximations and the L_p ↔ L_q transport.

#include <optional>
#include <vector>

#include "canonlab/legendre.hpp"
#include "canonlab/measure.hpp"
#include "canonlab/oracle.hpp"

namespace canonlab {

/// E[|f| | E], fiberwise mean of |f| over the base atoms.
LatticeElement f_zero(const LatticeElement& f, const ExtensionPair& pair);

struct PsiFamily {
  /// Per base atom, x ↦ (1/n) Σ_j (x·f₀ − v_j)⁺.  Identically 0 where f₀ = 0.
  std::vector<PLConvexFn> fibers;
  LatticeElement f0;

  /// Ψ_f(x) as an element of E.
  LatticeElement operator()(double x) const;
};

PsiFamily psi(const LatticeElement& f, const ExtensionPair& pair);

/// E_t[f|E] = Ψ_f*(t), evaluated per atom at slope t·f₀.
LatticeElement partial_cond_exp(const LatticeElement& f, const ExtensionPair& pair, double t);
/// E_s − E_t for 0 ≤ t < s ≤ 1.
LatticeElement interval_cond_exp(const LatticeElement& f, const ExtensionPair& pair, double t, double s);

struct SliceFamily {
  SpacePtr base;
  /// Sorted fiber values per base atom.
  std::vector<std::vector<double>> sorted;

  /// f_t for t ∈ (0,1]: the ⌈tn⌉-th order statistic per atom.
  LatticeElement at(double t) const;
};

SliceFamily slices(const LatticeElement& f, const ExtensionPair& pair);

/// f_t computed as f₀·D⁻ of the conjugate at t·f₀ (the derivative route).
LatticeElement slice_from_conjugate(const LatticeElement& f, const ExtensionPair& pair, double t);

/// Rows sorted; constants ±‖f^±↾E⊥‖_p on the {±} fibers.
LatticeElement increasing_realisation(const LatticeElement& f, const ExtensionPair& pair, double p);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double tol = kTolerance) const { return lhs <= rhs + tol; }
};

/// lhs = ‖f_t‖_p on E, rhs = ‖f‖_p/(t − t²)^{1/p}.
BoundCheck slice_norm_bound_check(const LatticeElement& f, const ExtensionPair& pair, double p, double t);

struct GridApprox {
  LatticeElement g;  // join over the k-grid
  LatticeElement h;  // exact sup over x ∈ [−N, N]
};

GridApprox grid_approx(const LatticeElement& f, const ExtensionPair& pair, double t, double N, std::size_t n_grid);

/// θf = f^{p/q} atomwise (signed power).
LatticeElement lq_transport(const LatticeElement& f, double p, double q);

/// Σ w·(f^{1/q} g^{1/q'})^p over atoms, the integral of θf·θ'g with θ' the
/// transport to L_{q'}.
double duality_pairing(const LatticeElement& f, const LatticeElement& g, double p, double q);

struct PairingCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = ∫ f·h^{p−1} over E', rhs = ∫ E[f|E]·h^{p−1} over E.  Needs p > 1.
PairingCheck cond_exp_pairing_check(const LatticeElement& f, const ExtensionPair& pair, double p,
                                    const LatticeElement& h);

/// For p = 1: max over base atoms of |E_{[t,s]}[f^{1/q}|E]^q − E_{[t,s]}[f|E]|, per q.
std::vector<double> transported_interval_convergence(const LatticeElement& f, const ExtensionPair& pair, double t,
                                                     double s, const std::vector<double>& qs);

/// Per-atom deviation bound ε(q)·f₀ from the slice range [−1/t, 1/(1−s)].
double transported_interval_bound(double t, double s, double q);

/// {0, 1/n, …, 1}.
std::vector<double> uniform_grid(std::size_t n);

struct LpCanonicalBase {
  double p = 1.0;
  double pos_norm = 0.0;
  double neg_norm = 0.0;
  std::vector<double> grid;
  bool intervals = false;
  /// E_t for t in grid, or E_{[grid_i, grid_j]} for i < j in row-major order.
  std::vector<LatticeElement> values;

  bool equals(const LpCanonicalBase& other, double tol = kTolerance) const;
};

/// Grid points must lie in [0, 1] and increase strictly.
LpCanonicalBase canonical_base_1type(const LatticeElement& f, const ExtensionPair& pair, double p,
                                     const std::vector<double>& grid, bool intervals = false);

/// Sorted fiber values recovered by first differences n·(E_{k/n} − E_{(k−1)/n})
/// from a partial-family base on uniform_grid(n).
std::vector<std::vector<double>> reconstruct_sorted(const LpCanonicalBase& cb, std::size_t n);

struct NTypeBase {
  std::vector<std::vector<int>> coefficients;
  std::vector<LpCanonicalBase> bases;
  DirectionalMass summary;
};

/// Bases of every k̄·f̄ with |k_i| ≤ k_range, plus the absolute joint summary.
NTypeBase canonical_base_ntype(const std::vector<LatticeElement>& fs, const ExtensionPair& pair, double p,
                               const std::vector<double>& grid, int k_range);

struct P1Report {
  std::size_t m = 0;
  double p = 1.0;
  double eps = 0.0;
  double f_norm = 0.0;
  double e_norm = 0.0;
  double expected_e_norm = 0.0;
  LatticeElement partial;
};

/// f_ε = −ε^{−1/p} on the first n/m cells of each fiber over Ω, μ(Ω) = 1.
P1Report p1_counterexample(std::size_t m, double p, std::size_t fiber_cells = 0,
                           const std::vector<double>& base_weights = {1.0});

struct RemarkReport {
  int k_range = 5;
  std::size_t pairs_checked = 0;
  bool one_types_agree = true;
  bool joint_types_differ = false;
  double witness_gh = 0.0;
  double witness_g_minus_h = 0.0;
};

RemarkReport remark_counterexample(int k_range = 5);

}  // namespace canonlab
