#pragma once

#include <memory>

#include "clab/operator.hpp"

namespace clab {

/// Solves with M = L - sigma W on one box, and with its transpose.
///
/// Small boxes (and 2D boxes up to a few tens of thousands of nodes) use a
/// sparse LU factorization. Larger boxes go iterative: conjugate gradients on
/// D_nu M when the operator is symmetric, ILUT-preconditioned BiCGSTAB
/// otherwise.
class ShiftedSolver {
 public:
  ShiftedSolver(const AssembledOperator& op, double sigma);
  ~ShiftedSolver();
  ShiftedSolver(ShiftedSolver&&) noexcept;
  ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

  /// x with M x = rhs.
  Vector solve(const Vector& rhs) const;
  /// x with M^T x = rhs.
  Vector solve_transposed(const Vector& rhs) const;

  bool direct() const noexcept;
  double sigma() const noexcept { return sigma_; }
  Eigen::Index size() const noexcept { return n_; }

  /// Force the iterative path regardless of size (tests only).
  static ShiftedSolver iterative(const AssembledOperator& op, double sigma);

 private:
  struct Impl;
  ShiftedSolver(const AssembledOperator& op, double sigma, bool force_iterative);
  std::unique_ptr<Impl> impl_;
  double sigma_ = 0.0;
  Eigen::Index n_ = 0;
};

/// Whether a box of this size is factorized directly.
bool prefers_direct(int dim, Eigen::Index n) noexcept;

}  // namespace clab
