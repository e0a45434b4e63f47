#pragma once

#include "clab/operator.hpp"

namespace clab {

struct RitzPairs {
  Vector theta;    ///< generalized eigenvalues of L u = theta W u, ascending
  Matrix vectors;  ///< matching eigenvectors, W nu-orthonormal columns
  Vector residual; ///< relative shift-invert residuals
  int applications = 0;
  bool converged = false;
};

struct KrylovOptions {
  int nev = 1;
  int block = 2;
  int max_basis = 120;
  int max_restarts = 30;
  double tol = 1e-10;
  unsigned seed = 7;
};

/// Lowest nev eigenpairs of L u = theta W u for an operator that is
/// self-adjoint in <., .>_nu, by block Krylov shift-invert with
/// Rayleigh-Ritz in the W nu inner product. sigma must lie below the
/// spectrum. start, if non-empty, seeds the first block column.
RitzPairs symmetric_lowest(const AssembledOperator& op, double sigma, const KrylovOptions& opt,
                           const Vector& start = Vector());

}  // namespace clab
