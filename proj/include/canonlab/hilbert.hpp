#pragma once

// Canonical bases of tuples in a finite-dimensional inner-product space over
// a subspace E: projections plus the Gram matrix.

#include <vector>

#include <Eigen/Dense>

namespace canonlab {

/// Subspace of ℝ^dim given by an orthonormal basis.
class Subspace {
 public:
  Subspace(std::size_t dim, std::vector<Eigen::VectorXd> orthonormal_basis);

  /// Orthonormalised span of arbitrary vectors (rank-revealing QR).
  static Subspace span(std::size_t dim, const std::vector<Eigen::VectorXd>& vectors);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Eigen::VectorXd>& basis() const noexcept { return basis_; }
  bool contains(const Eigen::VectorXd& v, double tol = 1e-9) const;

 private:
  std::size_t dim_;
  std::vector<Eigen::VectorXd> basis_;
};

Eigen::VectorXd project(const Eigen::VectorXd& v, const Subspace& e);

struct HilbertBase {
  std::vector<Eigen::VectorXd> projections;
  Eigen::MatrixXd gram;

  bool equals(const HilbertBase& other, double tol = 1e-9) const;
};

HilbertBase hs_cb(const std::vector<Eigen::VectorXd>& vs, const Subspace& e);

struct PhiCheck {
  double lhs = 0.0;  // ‖Σλv + u‖²
  double rhs = 0.0;  // ‖Σλv‖² − ‖ΣλPv‖² + ‖ΣλPv + u‖²
};

/// u must lie in E.
PhiCheck phi_identity_check(const std::vector<Eigen::VectorXd>& vs, const std::vector<double>& lambda,
                            const Eigen::VectorXd& u, const Subspace& e);

/// φ(v̄, u) computed from the canonical base alone.
double phi_from_base(const HilbertBase& cb, const std::vector<double>& lambda, const Eigen::VectorXd& u);

struct NonUniformityWitness {
  std::vector<Eigen::VectorXd> first, second;
  std::vector<double> lambda;
  double phi_first = 0.0, phi_second = 0.0;
};

/// Tuples with equal projections onto E but different Gram matrices, and
/// coefficients λ with φ(·, 0) telling them apart.  Needs E ≠ ℝ^dim.
NonUniformityWitness non_uniformity_witness(const std::vector<Eigen::VectorXd>& vs, const Subspace& e);

}  // namespace canonlab
