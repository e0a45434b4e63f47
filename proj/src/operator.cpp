#include "clab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "clab/errors.hpp"

namespace clab {
namespace {

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  h ^= 0xff;
  h *= 1099511628211ULL;
  return h;
}

struct Stencil {
  std::vector<Eigen::Triplet<double>> entries;
};

// Row x of L, with b in advection position and bt in flux position:
//   nu(x) (L u)(x) = sum_axis  a+ (u(x) - u(x+e)) + a- (u(x) - u(x-e))
//                            - bt+ (u(x) + u(x+e))/2 + bt- (u(x-e) + u(x))/2
//                            + b+ (u(x+e) - u(x))/2 + b- (u(x) - u(x-e))/2
//                  + nu(x) c(x) u(x)
// where +/- label the edges (x, x+e) and (x-e, x). The adjoint swaps b and bt.
void assemble_rows(const OperatorSpec& spec, const NodeSet& nodes, const Vector& nu, const Vector& c, bool adjoint,
                   Stencil& out) {
  const int dim = nodes.dim();
  const EdgeField& adv = adjoint ? spec.b_tilde : spec.b;
  const EdgeField& flux = adjoint ? spec.b : spec.b_tilde;
  out.entries.reserve(nodes.size() * static_cast<std::size_t>(2 * dim + 1));
  for (std::size_t row = 0; row < nodes.size(); ++row) {
    const Coord& x = nodes[row];
    const double inv_nu = 1.0 / nu[static_cast<Eigen::Index>(row)];
    double diag = c[static_cast<Eigen::Index>(row)];
    for (int axis = 0; axis < dim; ++axis) {
      Coord fwd = x;
      ++fwd[axis];
      Coord bwd = x;
      --bwd[axis];
      const double a_p = spec.a(x, axis), a_m = spec.a(bwd, axis);
      const double f_p = flux(x, axis), f_m = flux(bwd, axis);
      const double v_p = adv(x, axis), v_m = adv(bwd, axis);
      diag += inv_nu * (a_p + a_m - 0.5 * f_p + 0.5 * f_m - 0.5 * v_p + 0.5 * v_m);
      const double off_p = inv_nu * (-a_p - 0.5 * f_p + 0.5 * v_p);
      const double off_m = inv_nu * (-a_m + 0.5 * f_m - 0.5 * v_m);
      for (auto [nb, val] : {std::pair{fwd, off_p}, std::pair{bwd, off_m}}) {
        if (!(val < 0.0)) {
          fail(ErrorKind::DriftTooStrong, "off-diagonal entry " + std::to_string(val) + " between " +
                                              to_string(x, dim) + " and " + to_string(nb, dim));
        }
        if (auto col = nodes.index_of(nb)) {
          out.entries.emplace_back(static_cast<int>(row), static_cast<int>(*col), val);
        }
      }
    }
    out.entries.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
  }
}

}  // namespace

std::uint64_t OperatorSpec::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto* s : {&a.description(), &b.description(), &b_tilde.description(), &c.description(),
                        &W.description()}) {
    h = fnv1a(h, *s);
  }
  return h;
}

Eigen::Index AssembledOperator::anchor_index() const {
  auto idx = nodes.index_of(anchor);
  if (!idx) fail(ErrorKind::SpecDomainMismatch, "anchor outside box");
  return static_cast<Eigen::Index>(*idx);
}

AssembledOperator assemble(const OperatorSpec& spec, const Exhaustion& ex, int k) {
  ex.radius_index(k);
  spec.a.check_domain(ex.ambient);
  spec.b.check_domain(ex.ambient);
  spec.b_tilde.check_domain(ex.ambient);
  spec.c.check_domain(ex.ambient);
  spec.W.check_domain(ex.ambient);

  for (const auto& x : ex.ambient) {
    for (int axis = 0; axis < ex.dim; ++axis) {
      Coord bwd = x;
      --bwd[axis];
      for (const Coord& tail : {x, bwd}) {
        const double a = spec.a(tail, axis);
        if (!(a > 0.0)) {
          fail(ErrorKind::NonPositiveConductance,
               "conductance " + std::to_string(a) + " on edge at " + to_string(tail, ex.dim));
        }
      }
    }
  }

  AssembledOperator op;
  op.radius = k;
  op.spec_hash = spec.hash();
  op.nodes = ex.box(k);
  op.anchor = ex.anchor;
  op.nu = ex.measure_on(op.nodes);
  op.W = spec.W.on(op.nodes);
  for (Eigen::Index i = 0; i < op.W.size(); ++i) {
    if (!(op.W[i] > 0.0)) {
      fail(ErrorKind::NonPositiveWeight, "W = " + std::to_string(op.W[i]) + " at node " +
                                             to_string(op.nodes[static_cast<std::size_t>(i)], ex.dim));
    }
  }
  const Vector c = spec.c.on(op.nodes);

  op.symmetric = true;
  for (const auto& x : op.nodes) {
    for (int axis = 0; axis < ex.dim && op.symmetric; ++axis) {
      Coord bwd = x;
      --bwd[axis];
      if (spec.b(x, axis) != spec.b_tilde(x, axis) || spec.b(bwd, axis) != spec.b_tilde(bwd, axis)) {
        op.symmetric = false;
      }
    }
    if (!op.symmetric) break;
  }

  const auto n = static_cast<Eigen::Index>(op.nodes.size());
  Stencil fwd, adj;
  assemble_rows(spec, op.nodes, op.nu, c, false, fwd);
  assemble_rows(spec, op.nodes, op.nu, c, true, adj);
  op.L.resize(n, n);
  op.L.setFromTriplets(fwd.entries.begin(), fwd.entries.end());
  op.L_adj.resize(n, n);
  op.L_adj.setFromTriplets(adj.entries.begin(), adj.entries.end());
  op.L.makeCompressed();
  op.L_adj.makeCompressed();
  return op;
}

AssembledOperator shift(const AssembledOperator& op, double lambda, const Vector& W) {
  if (W.size() != op.size()) fail(ErrorKind::SpecDomainMismatch, "weight does not match the box");
  AssembledOperator out = op;
  if (lambda == 0.0) return out;
  for (Eigen::Index i = 0; i < op.size(); ++i) {
    out.L.coeffRef(i, i) -= lambda * W[i];
    out.L_adj.coeffRef(i, i) -= lambda * W[i];
  }
  out.shift = op.shift + lambda;
  return out;
}

AssembledOperator doob_transform(const AssembledOperator& op, const Vector& h) {
  if (h.size() != op.size()) fail(ErrorKind::SpecDomainMismatch, "transform function does not match the box");
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) {
      fail(ErrorKind::NonPositiveTransformFunction, "h = " + std::to_string(h[i]) + " at row " + std::to_string(i));
    }
  }
  AssembledOperator out = op;
  const Vector inv_h = h.cwiseInverse();
  out.L = inv_h.asDiagonal() * op.L * h.asDiagonal();
  out.L_adj = h.asDiagonal() * op.L_adj * inv_h.asDiagonal();
  out.L.makeCompressed();
  out.L_adj.makeCompressed();
  // D_h^{-1} L D_h stays nu-symmetric only for constant h
  out.symmetric = op.symmetric && h.maxCoeff() == h.minCoeff();
  return out;
}

double nu_dot(const Vector& u, const Vector& v, const Vector& nu) { return (u.array() * v.array() * nu.array()).sum(); }

double transpose_identity_defect(const AssembledOperator& op) {
  const SparseMatrix expected = op.nu.cwiseInverse().asDiagonal() * SparseMatrix(op.L.transpose()) * op.nu.asDiagonal();
  const SparseMatrix diff = op.L_adj - expected;
  double worst = 0.0, scale = 1e-300;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  for (int k = 0; k < op.L.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op.L, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  }
  return worst / scale;
}

}  // namespace clab
