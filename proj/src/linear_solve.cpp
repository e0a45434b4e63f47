#include "clab/linear_solve.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include "clab/errors.hpp"

namespace clab {
namespace {

constexpr double kIterTol = 1e-14;
constexpr double kAcceptTol = 1e-10;

template <class Solver>
Vector checked_solve(const Solver& s, const Vector& rhs, const char* what) {
  if (rhs.squaredNorm() == 0.0) return Vector::Zero(rhs.size());
  Vector x = s.solve(rhs);
  if (s.info() != Eigen::Success && !(s.error() <= kAcceptTol)) {
    fail(ErrorKind::SolverNoConvergence, std::string(what) + " stalled at relative residual " +
                                             std::to_string(s.error()) + " after " +
                                             std::to_string(s.iterations()) + " iterations");
  }
  return x;
}

}  // namespace

bool prefers_direct(int dim, Eigen::Index n) noexcept { return n <= 6000 || (dim <= 2 && n <= 40000); }

struct ShiftedSolver::Impl {
  SparseMatrix M;
  Vector nu;
  bool symmetric = false;
  bool use_direct = true;

  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;

  // iterative, symmetric: S = D_nu M is SPD below the principal eigenvalue
  SparseMatrix S;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;

  // iterative, general
  mutable SparseMatrix Mt;
  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> bicg;
  mutable std::unique_ptr<Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>> bicg_t;
};

ShiftedSolver::ShiftedSolver(const AssembledOperator& op, double sigma)
    : ShiftedSolver(op, sigma, false) {}

ShiftedSolver ShiftedSolver::iterative(const AssembledOperator& op, double sigma) {
  return ShiftedSolver(op, sigma, true);
}

ShiftedSolver::ShiftedSolver(const AssembledOperator& op, double sigma, bool force_iterative)
    : impl_(std::make_unique<Impl>()), sigma_(sigma), n_(op.size()) {
  auto& s = *impl_;
  s.M = shift(op, sigma).L;
  s.nu = op.nu;
  s.symmetric = op.symmetric;
  s.use_direct = !force_iterative && prefers_direct(op.nodes.dim(), n_);
  if (s.use_direct) {
    s.lu.compute(s.M);
    if (s.lu.info() != Eigen::Success) {
      fail(ErrorKind::SolverNoConvergence, "sparse LU failed at shift " + std::to_string(sigma) + ": " +
                                               s.lu.lastErrorMessage());
    }
    return;
  }
  if (s.symmetric) {
    s.S = op.nu.asDiagonal() * s.M;
    s.cg.setTolerance(kIterTol);
    s.cg.setMaxIterations(std::max<Eigen::Index>(20000, 4 * n_));
    s.cg.compute(s.S);
  } else {
    s.bicg.setTolerance(kIterTol);
    s.bicg.setMaxIterations(std::max<Eigen::Index>(20000, 4 * n_));
    s.bicg.preconditioner().setDroptol(1e-5);
    s.bicg.compute(s.M);
  }
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;
ShiftedSolver& ShiftedSolver::operator=(ShiftedSolver&&) noexcept = default;

bool ShiftedSolver::direct() const noexcept { return impl_->use_direct; }

Vector ShiftedSolver::solve(const Vector& rhs) const {
  const auto& s = *impl_;
  if (rhs.size() != n_) fail(ErrorKind::BoxMismatch, "right-hand side does not match the box");
  if (s.use_direct) {
    Vector x = s.lu.solve(rhs);
    if (s.lu.info() != Eigen::Success) fail(ErrorKind::SolverNoConvergence, "sparse LU solve failed");
    return x;
  }
  if (s.symmetric) {
    const Vector b = s.nu.cwiseProduct(rhs);
    return checked_solve(s.cg, b, "conjugate gradients");
  }
  return checked_solve(s.bicg, rhs, "BiCGSTAB");
}

Vector ShiftedSolver::solve_transposed(const Vector& rhs) const {
  const auto& s = *impl_;
  if (rhs.size() != n_) fail(ErrorKind::BoxMismatch, "right-hand side does not match the box");
  if (s.use_direct) {
    Vector x = s.lu.transpose().solve(rhs);
    if (s.lu.info() != Eigen::Success) fail(ErrorKind::SolverNoConvergence, "sparse LU solve failed");
    return x;
  }
  if (s.symmetric) {
    // M^T = S D_nu^{-1}, so M^T x = r is S z = r with x = D_nu z
    const Vector z = checked_solve(s.cg, rhs, "conjugate gradients");
    return s.nu.cwiseProduct(z);
  }
  if (!s.bicg_t) {
    auto& mt = s.Mt;
    mt = s.M.transpose();
    s.bicg_t = std::make_unique<Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>>>();
    s.bicg_t->setTolerance(kIterTol);
    s.bicg_t->setMaxIterations(std::max<Eigen::Index>(20000, 4 * n_));
    s.bicg_t->preconditioner().setDroptol(1e-5);
    s.bicg_t->compute(mt);
  }
  return checked_solve(*s.bicg_t, rhs, "BiCGSTAB");
}

}  // namespace clab
