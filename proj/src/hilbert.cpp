#include "canonlab/hilbert.hpp"

#include <cmath>
#include <string>

#include "canonlab/error.hpp"

namespace canonlab {

namespace {

void require_dim(const Eigen::VectorXd& v, std::size_t dim) {
  if (static_cast<std::size_t>(v.size()) != dim)
    throw InvalidInput("vector of dimension " + std::to_string(v.size()) + " in a space of dimension " +
                       std::to_string(dim));
}

Eigen::VectorXd combine(const std::vector<Eigen::VectorXd>& vs, const std::vector<double>& lambda, std::size_t dim) {
  if (vs.size() != lambda.size()) throw InvalidInput("need one coefficient per vector");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < vs.size(); ++i) s += lambda[i] * vs[i];
  return s;
}

}  // namespace

Subspace::Subspace(std::size_t dim, std::vector<Eigen::VectorXd> basis) : dim_(dim), basis_(std::move(basis)) {
  if (dim == 0) throw InvalidInput("ambient dimension must be positive");
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    require_dim(basis_[i], dim);
    for (std::size_t j = 0; j <= i; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(basis_[i].dot(basis_[j]) - expected) > 1e-12)
        throw InvalidInput("subspace basis is not orthonormal");
    }
  }
}

Subspace Subspace::span(std::size_t dim, const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.empty()) return Subspace(dim, {});
  Eigen::MatrixXd A(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    require_dim(vectors[i], dim);
    A.col(static_cast<Eigen::Index>(i)) = vectors[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  const Eigen::MatrixXd Q = qr.householderQ();
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::Index c = 0; c < qr.rank(); ++c) basis.push_back(Q.col(c));
  return Subspace(dim, std::move(basis));
}

bool Subspace::contains(const Eigen::VectorXd& v, double tol) const {
  return (v - project(v, *this)).norm() <= tol;
}

Eigen::VectorXd project(const Eigen::VectorXd& v, const Subspace& e) {
  require_dim(v, e.dim());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (const auto& b : e.basis()) out += v.dot(b) * b;
  return out;
}

bool HilbertBase::equals(const HilbertBase& o, double tol) const {
  if (projections.size() != o.projections.size() || gram.rows() != o.gram.rows()) return false;
  for (std::size_t i = 0; i < projections.size(); ++i)
    if ((projections[i] - o.projections[i]).cwiseAbs().maxCoeff() > tol) return false;
  return gram.size() == 0 || (gram - o.gram).cwiseAbs().maxCoeff() <= tol;
}

HilbertBase hs_cb(const std::vector<Eigen::VectorXd>& vs, const Subspace& e) {
  HilbertBase cb;
  const auto n = static_cast<Eigen::Index>(vs.size());
  cb.gram.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cb.projections.push_back(project(vs[static_cast<std::size_t>(i)], e));
    for (Eigen::Index j = 0; j < n; ++j) cb.gram(i, j) = vs[static_cast<std::size_t>(i)].dot(vs[static_cast<std::size_t>(j)]);
  }
  return cb;
}

PhiCheck phi_identity_check(const std::vector<Eigen::VectorXd>& vs, const std::vector<double>& lambda,
                            const Eigen::VectorXd& u, const Subspace& e) {
  require_dim(u, e.dim());
  if (!e.contains(u)) throw InvalidInput("u does not lie in the subspace E");
  for (const auto& v : vs) require_dim(v, e.dim());
  const Eigen::VectorXd s = combine(vs, lambda, e.dim());
  const Eigen::VectorXd ps = project(s, e);
  return {(s + u).squaredNorm(), s.squaredNorm() - ps.squaredNorm() + (ps + u).squaredNorm()};
}

double phi_from_base(const HilbertBase& cb, const std::vector<double>& lambda, const Eigen::VectorXd& u) {
  if (lambda.size() != cb.projections.size()) throw InvalidInput("need one coefficient per vector");
  const Eigen::Map<const Eigen::VectorXd> l(lambda.data(), static_cast<Eigen::Index>(lambda.size()));
  Eigen::VectorXd ps = Eigen::VectorXd::Zero(u.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) ps += lambda[i] * cb.projections[i];
  return l.dot(cb.gram * l) - ps.squaredNorm() + (ps + u).squaredNorm();
}

NonUniformityWitness non_uniformity_witness(const std::vector<Eigen::VectorXd>& vs, const Subspace& e) {
  if (vs.empty()) throw InvalidInput("empty tuple");
  for (const auto& v : vs) require_dim(v, e.dim());
  // A unit vector orthogonal to E: residual of the first coordinate vector not in E.
  Eigen::VectorXd w;
  for (std::size_t i = 0; i < e.dim(); ++i) {
    Eigen::VectorXd ei = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(e.dim()), static_cast<Eigen::Index>(i));
    Eigen::VectorXd r = ei - project(ei, e);
    if (r.norm() > 1e-6) {
      w = r.normalized();
      break;
    }
  }
  if (w.size() == 0) throw InvalidInput("E is the whole space; projections determine everything");
  NonUniformityWitness out;
  out.first = vs;
  out.second = vs;
  // ‖v + cw‖² − ‖v‖² = 2c⟨v,w⟩ + c² vanishes for at most one c > 0.
  const double c = std::abs(2.0 * vs.front().dot(w) + 1.0) > 1e-3 ? 1.0 : 2.0;
  out.second.front() += c * w;
  out.lambda.assign(vs.size(), 0.0);
  out.lambda.front() = 1.0;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e.dim()));
  out.phi_first = phi_from_base(hs_cb(out.first, e), out.lambda, zero);
  out.phi_second = phi_from_base(hs_cb(out.second, e), out.lambda, zero);
  return out;
}

}  // namespace canonlab
