#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "clab/fields.hpp"
#include "clab/lattice.hpp"

namespace clab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Coefficients of the lattice operator
///   L u = -div(a grad u + u b_tilde) + b . grad u + c u
/// with scalar edge conductances a, edge drifts b / b_tilde, zero-order term c
/// and the spectral weight W.
struct OperatorSpec {
  EdgeField a = EdgeField::parse("unit");
  EdgeField b = EdgeField::parse("zero");
  EdgeField b_tilde = EdgeField::parse("zero");
  NodeField c = NodeField::parse("zero");
  NodeField W = NodeField::parse("unit");

  /// Stable FNV-1a hash of the coefficient descriptions.
  std::uint64_t hash() const;
};

/// L and its nu-adjoint on the interior of one box, zero outside.
struct AssembledOperator {
  int radius = 0;
  double shift = 0.0;
  std::uint64_t spec_hash = 0;
  bool symmetric = false;
  NodeSet nodes;
  SparseMatrix L;
  SparseMatrix L_adj;
  Vector nu;
  Vector W;
  Coord anchor{};

  Eigen::Index size() const noexcept { return L.rows(); }
  /// Row of the exhaustion anchor in this box.
  Eigen::Index anchor_index() const;
};

AssembledOperator assemble(const OperatorSpec& spec, const Exhaustion& ex, int k);

/// L - lambda diag(W), for both L and its adjoint.
AssembledOperator shift(const AssembledOperator& op, double lambda, const Vector& W);
inline AssembledOperator shift(const AssembledOperator& op, double lambda) { return shift(op, lambda, op.W); }

/// L^h = h^{-1} L (h .), i.e. D_h^{-1} L D_h. The adjoint becomes D_h L* D_h^{-1}.
AssembledOperator doob_transform(const AssembledOperator& op, const Vector& h);

/// nu-weighted inner product sum_x u v nu.
double nu_dot(const Vector& u, const Vector& v, const Vector& nu);

/// max |L* - D_nu^{-1} L^T D_nu| over all entries, relative to max |L|.
double transpose_identity_defect(const AssembledOperator& op);

}  // namespace clab
