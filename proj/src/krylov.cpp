#include "clab/krylov.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "clab/errors.hpp"
#include "clab/linear_solve.hpp"

namespace clab {
namespace {

// Orthonormalize column j of X against V(:, 0..m) and earlier columns of X
// under the weighted inner product; classical Gram-Schmidt applied twice.
bool orthonormalize(const Matrix& V, Eigen::Index m, Vector& x, const Vector& bw) {
  const double before = std::sqrt((x.array().square() * bw.array()).sum());
  if (before == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    if (m > 0) {
      const Vector coeff = V.leftCols(m).transpose() * bw.cwiseProduct(x);
      x -= V.leftCols(m) * coeff;
    }
  }
  const double after = std::sqrt((x.array().square() * bw.array()).sum());
  if (after <= 1e-10 * before) return false;
  x /= after;
  return true;
}

}  // namespace

RitzPairs symmetric_lowest(const AssembledOperator& op, double sigma, const KrylovOptions& opt, const Vector& start) {
  const Eigen::Index n = op.size();
  if (opt.nev < 1 || opt.nev > n) fail(ErrorKind::SpecDomainMismatch, "requested more eigenpairs than nodes");
  const Vector bw = op.W.cwiseProduct(op.nu);
  const ShiftedSolver solver(op, sigma);
  const auto apply = [&](const Vector& x) { return solver.solve(op.W.cwiseProduct(x)); };

  const Eigen::Index cap = std::min<Eigen::Index>(n, std::max(opt.max_basis, 2 * opt.nev + 2 * opt.block));
  Matrix V(n, cap), TV(n, cap);
  Eigen::Index m = 0;
  RitzPairs out;

  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Vector> block;
  if (start.size() == n) block.push_back(start);
  while (static_cast<int>(block.size()) < opt.block) {
    Vector r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = uni(rng);
    block.push_back(r);
  }

  const auto extend = [&](std::vector<Vector>& blk) {
    for (auto& x : blk) {
      if (m >= cap) break;
      if (!orthonormalize(V, m, x, bw)) continue;
      V.col(m) = x;
      TV.col(m) = apply(x);
      ++out.applications;
      ++m;
    }
  };

  Eigen::SelfAdjointEigenSolver<Matrix> es;
  Matrix S;
  Vector mu;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    while (m < cap) {
      const Eigen::Index before = m;
      extend(block);
      if (m == before) {
        // Krylov space exhausted; refill with random directions
        block.clear();
        for (int j = 0; j < opt.block; ++j) {
          Vector r(n);
          for (Eigen::Index i = 0; i < n; ++i) r[i] = uni(rng);
          block.push_back(r);
        }
        extend(block);
        if (m == before) break;
      }
      block.clear();
      for (Eigen::Index j = before; j < m; ++j) block.push_back(TV.col(j));

      if (m < opt.nev) continue;
      Matrix H = V.leftCols(m).transpose() * bw.asDiagonal() * TV.leftCols(m);
      H = 0.5 * (H + H.transpose()).eval();
      es.compute(H);
      // descending mu, i.e. ascending theta
      S = es.eigenvectors().rowwise().reverse();
      mu = es.eigenvalues().reverse();
      bool ok = true;
      out.residual.resize(opt.nev);
      for (int j = 0; j < opt.nev; ++j) {
        const Vector z = V.leftCols(m) * S.col(j);
        const Vector tz = TV.leftCols(m) * S.col(j);
        const Vector r = tz - mu[j] * z;
        out.residual[j] = std::sqrt((r.array().square() * bw.array()).sum()) / std::abs(mu[j]);
        ok = ok && out.residual[j] <= opt.tol;
      }
      if (ok) {
        out.converged = true;
        break;
      }
    }
    if (out.converged || restart == opt.max_restarts || m < cap) break;
    // thick restart: keep the leading Ritz vectors, continue from their images
    const Eigen::Index keep = std::min<Eigen::Index>(m - opt.block, opt.nev + 2 * opt.block);
    Matrix Vk = V.leftCols(m) * S.leftCols(keep);
    Matrix TVk = TV.leftCols(m) * S.leftCols(keep);
    V.leftCols(keep) = Vk;
    TV.leftCols(keep) = TVk;
    m = keep;
    block.clear();
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(keep, opt.block); ++j) block.push_back(TVk.col(j));
  }

  if (mu.size() < opt.nev) fail(ErrorKind::SolverNoConvergence, "Krylov basis too small for the requested pairs");
  out.theta.resize(opt.nev);
  out.vectors.resize(n, opt.nev);
  for (int j = 0; j < opt.nev; ++j) {
    Vector z = V.leftCols(m) * S.col(j);
    const Vector Lz = op.L * z;
    const double wz = (z.array().square() * bw.array()).sum();
    out.theta[j] = (z.array() * Lz.array() * op.nu.array()).sum() / wz;
    out.vectors.col(j) = z / std::sqrt(wz);
  }
  return out;
}

}  // namespace clab
