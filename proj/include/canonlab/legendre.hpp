#pragma once

// Exact Legendre–Fenchel conjugation of piecewise-linear convex functions of
// one real variable.

#include <optional>
#include <span>
#include <vector>

#include "canonlab/measure.hpp"

namespace canonlab {

/// A convex piecewise-linear function on a closed interval [lower, upper]
/// (either end may be unbounded) and +∞ outside it.
///
/// `slopes[i]` is the slope between `breakpoints[i-1]` and `breakpoints[i]`,
/// so there is one more slope than breakpoint.  Repeated slopes are merged
/// on construction, which makes the stored form canonical.  A one-point
/// domain keeps no breakpoints and the single slope 0.
class PLConvexFn {
 public:
  PLConvexFn(std::optional<double> lower, std::optional<double> upper, std::vector<double> breakpoints,
             std::vector<double> slopes, double anchor_x, double anchor_value);

  /// x ↦ slope·x + intercept on ℝ.
  static PLConvexFn linear(double slope, double intercept = 0.0);
  /// x ↦ |x| on ℝ.
  static PLConvexFn absolute();
  /// x ↦ (1/n) Σ_j (scale·x − v_j)⁺ on ℝ.  `scale` must be positive.
  static PLConvexFn hinge_mean(std::span<const double> values, double scale);

  const std::optional<double>& lower() const noexcept { return lower_; }
  const std::optional<double>& upper() const noexcept { return upper_; }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<double>& slopes() const noexcept { return slopes_; }
  /// Values at the breakpoints.
  const std::vector<double>& break_values() const noexcept { return values_; }

  /// Canonical reference point: first breakpoint, else a finite domain end, else 0.
  double anchor_x() const;
  double anchor_value() const { return (*this)(anchor_x()); }

  bool is_point() const { return lower_ && upper_ && *lower_ == *upper_; }
  bool in_domain(double x, double tol = kTolerance) const;

  /// Value at x; throws InvalidInput outside the closed domain.
  double operator()(double x) const;

 private:
  double eval_unchecked(double x) const;

  std::optional<double> lower_, upper_;
  std::vector<double> breaks_;
  std::vector<double> slopes_;
  std::vector<double> values_;
  double base_x_ = 0.0, base_value_ = 0.0;
};

/// One-sided derivatives.  An empty `left` stands for −∞ and an empty
/// `right` for +∞ (outward derivative at a domain end).
struct OneSided {
  std::optional<double> left;
  std::optional<double> right;
};

PLConvexFn conjugate(const PLConvexFn& phi);
PLConvexFn biconjugate(const PLConvexFn& phi);

OneSided one_sided_derivs(const PLConvexFn& phi, double x);

/// The three conditions of the attainment equivalence, each evaluated on
/// its own: φ(x) + φ*(t) = tx;  D⁻φ*(t) ≤ x ≤ D⁺φ*(t);  D⁻φ(x) ≤ t ≤ D⁺φ(x).
struct Attainment {
  bool equality = false;
  bool conjugate_subgradient = false;
  bool subgradient = false;

  bool consistent() const { return equality == conjugate_subgradient && equality == subgradient; }
};

Attainment attainment_check(const PLConvexFn& phi, double x, double t);

/// Same domain, breakpoints, slopes and anchor value up to `tol`.
bool approx_equal(const PLConvexFn& a, const PLConvexFn& b, double tol = kTolerance);

}  // namespace canonlab
