#include "clab/perturbation.hpp"

#include <algorithm>
#include <cmath>

#include "clab/errors.hpp"

namespace clab {
namespace {

constexpr double kResolvedFraction = 1e-9;

// Same lattice and measure, single radius equal to the (possibly smaller) ambient box.
Exhaustion ambient_exhaustion(const Exhaustion& ex, int K) {
  Exhaustion out;
  out.dim = ex.dim;
  out.radii = {K};
  out.ambient_radius = K;
  out.anchor = ex.anchor;
  out.ambient = NodeSet::box(ex.dim, K);
  out.measure = ex.measure_on(out.ambient);
  return out;
}

AssembledOperator swapped(const AssembledOperator& op) {
  AssembledOperator s = op;
  std::swap(s.L, s.L_adj);
  return s;
}

double certify_subcritical(const AssembledOperator& op) {
  const auto [lo, hi] = collatz_wielandt(op, Vector::Ones(op.size()));
  (void)hi;
  if (lo > 0.0) return lo;
  const PrincipalPair pp = principal_pair(op);
  if (!(pp.lambda0 > 0.0)) {
    fail(ErrorKind::NotSubcritical, "principal eigenvalue " + std::to_string(pp.lambda0) + " on the ambient box");
  }
  return pp.lower > 0.0 ? pp.lower : pp.lambda0;
}

std::vector<Eigen::Index> tail_rows(const AssembledOperator& op, int k) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < op.nodes.size(); ++i) {
    if (sup_norm(op.nodes[i]) > k) rows.push_back(static_cast<Eigen::Index>(i));
  }
  return rows;
}

// sup over y in the tail of sum_z G(x,z)|V(z)|G(z,y)nu(z) / G(x,y), for the row r = G(x, .)
double tail_sup_from_row(const ShiftedSolver& solver, const AssembledOperator& op, const Vector& r,
                         const Vector& absV, const std::vector<Eigen::Index>& tail) {
  Vector h = Vector::Zero(op.size());
  for (auto z : tail) h[z] = r[z] * absV[z] * op.nu[z];
  if (h.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Vector s = solver.solve_transposed(h).cwiseQuotient(op.nu);
  // iterative solves carry an absolute error near 1e-14 max|r|; far entries below this floor are noise
  const double floor = solver.direct() ? 0.0 : kResolvedFraction * r.maxCoeff();
  double best = 0.0;
  for (auto y : tail) {
    if (r[y] > floor) best = std::max(best, s[y] / r[y]);
  }
  return best;
}

std::vector<Coord> small_probes(int dim, int k, int K) {
  std::vector<Coord> probes;
  const int mid = std::min(K, std::max(k + 1, (k + 1 + K) / 2));
  for (int dist : {k + 1, mid, K}) {
    for (int sgn : {1, -1}) {
      Coord x{};
      x[0] = sgn * dist;
      probes.push_back(x);
    }
    Coord diag{};
    for (int i = 0; i < dim; ++i) diag[i] = dist;
    probes.push_back(diag);
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  return probes;
}

struct ProfileCore {
  std::vector<double> S;
  bool exact = true;
  double certified = 0.0;
};

ProfileCore compute_profile(const OperatorSpec& spec, const Exhaustion& amb_ex, const std::vector<int>& radii,
                            const NodeField& V, SmallnessMode mode, const SmallnessOptions& opt, bool allow_empty) {
  const AssembledOperator base = assemble(spec, amb_ex, amb_ex.ambient_radius);
  const AssembledOperator op = mode == SmallnessMode::semismall_adjoint ? swapped(base) : base;
  ProfileCore core;
  core.certified = certify_subcritical(op);
  const Vector absV = V.on(op.nodes).cwiseAbs();
  const ShiftedSolver solver(op, 0.0);

  if (mode == SmallnessMode::small && op.size() <= opt.dense_small_limit) {
    const GreenKernel gk = dirichlet_green(op, 0.0, core.certified);
    for (int k : radii) {
      const auto tail = tail_rows(op, k);
      if (tail.empty()) {
        if (!allow_empty) fail(ErrorKind::TailEmpty, "tail beyond radius " + std::to_string(k) + " is empty");
        core.S.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const auto t = static_cast<Eigen::Index>(tail.size());
      Matrix A(t, t), B(t, t), D(t, t);
      Vector vz(t);
      for (Eigen::Index i = 0; i < t; ++i) {
        vz[i] = absV[tail[static_cast<std::size_t>(i)]] * op.nu[tail[static_cast<std::size_t>(i)]];
        for (Eigen::Index j = 0; j < t; ++j) {
          A(i, j) = gk.G(tail[static_cast<std::size_t>(i)], tail[static_cast<std::size_t>(j)]);
        }
      }
      const Matrix H = A * vz.asDiagonal() * A;
      core.S.push_back(H.cwiseQuotient(A).maxCoeff());
    }
    return core;
  }

  if (mode == SmallnessMode::small) {
    core.exact = false;
    for (int k : radii) {
      const auto tail = tail_rows(op, k);
      if (tail.empty()) {
        if (!allow_empty) fail(ErrorKind::TailEmpty, "tail beyond radius " + std::to_string(k) + " is empty");
        core.S.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double best = 0.0;
      for (const auto& x : small_probes(amb_ex.dim, k, amb_ex.ambient_radius)) {
        const auto xi = op.nodes.index_of(x);
        if (!xi) continue;
        const Vector r = green_row(solver, op, static_cast<Eigen::Index>(*xi));
        best = std::max(best, tail_sup_from_row(solver, op, r, absV, tail));
      }
      core.S.push_back(best);
    }
    return core;
  }

  const Vector r = green_row(solver, op, op.anchor_index());
  for (int k : radii) {
    const auto tail = tail_rows(op, k);
    if (tail.empty()) {
      if (!allow_empty) fail(ErrorKind::TailEmpty, "tail beyond radius " + std::to_string(k) + " is empty");
      core.S.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    core.S.push_back(tail_sup_from_row(solver, op, r, absV, tail));
  }
  return core;
}

}  // namespace

std::string to_string(SmallnessMode m) {
  switch (m) {
    case SmallnessMode::small: return "small";
    case SmallnessMode::semismall: return "semismall";
    case SmallnessMode::semismall_adjoint: return "semismall_adjoint";
  }
  return "semismall";
}

SmallnessMode parse_smallness_mode(const std::string& s) {
  if (s == "small") return SmallnessMode::small;
  if (s == "semismall") return SmallnessMode::semismall;
  if (s == "semismall_adjoint") return SmallnessMode::semismall_adjoint;
  fail(ErrorKind::UnknownPreset, "unknown smallness mode '" + s + "'");
}

PerturbationProfile smallness_profile(const OperatorSpec& spec, const Exhaustion& ex, const NodeField& V,
                                      SmallnessMode mode, const SmallnessOptions& opt) {
  V.check_domain(ex.ambient);
  PerturbationProfile prof;
  prof.mode = mode;
  prof.radii = ex.radii;
  prof.ambient_radius = ex.ambient_radius;
  const ProfileCore core = compute_profile(spec, ambient_exhaustion(ex, ex.ambient_radius), ex.radii, V, mode, opt, false);
  prof.S = core.S;
  prof.exact = core.exact;
  prof.certified_lambda0_lower = core.certified;

  const std::size_t M = prof.S.size();
  const double top = *std::max_element(prof.S.begin(), prof.S.end());
  prof.last_ratio = prof.S.front() > 0 ? prof.S.back() / prof.S.front() : 0.0;
  bool falling = true;
  for (std::size_t i = M >= 3 ? M - 2 : 1; i < M; ++i) falling = falling && prof.S[i] < prof.S[i - 1];
  if (top <= 0.0) {
    prof.verdict = "vanishing";
  } else if (prof.S.back() < 0.5 * prof.S.front() && falling) {
    prof.verdict = "decaying";
  } else {
    prof.verdict = "not_decaying";
  }

  if (opt.half_ambient) {
    const int half = (ex.ambient_radius + 1) / 2;
    std::vector<int> usable;
    for (int k : ex.radii) {
      if (k < half) usable.push_back(k);
    }
    prof.half_ambient_radius = half;
    if (!usable.empty() && half >= ex.radii.front()) {
      const ProfileCore hc = compute_profile(spec, ambient_exhaustion(ex, half), usable, V, mode, opt, true);
      prof.S_half = hc.S;
      for (std::size_t i = 0; i < hc.S.size(); ++i) {
        const double a = prof.S[i], b = hc.S[i];
        const double denom = std::max(std::abs(a), std::abs(b));
        const double rel = denom > 0 ? std::abs(a - b) / denom : 0.0;
        prof.half_max_rel_diff = std::max(prof.half_max_rel_diff, rel);
      }
      prof.half_flag = prof.half_max_rel_diff > 0.1;
    }
  }
  return prof;
}

ComparabilityReport comparability_check(const Vector& g, const Vector& phi, const NodeSet& nodes, const Coord& x0,
                                        const Coord& reference, int eps) {
  if (g.size() != phi.size() || static_cast<std::size_t>(g.size()) != nodes.size()) {
    fail(ErrorKind::BoxMismatch, "functions do not match the node set");
  }
  const auto ref = nodes.index_of(reference);
  if (!ref) fail(ErrorKind::SpecDomainMismatch, "reference node outside the box");
  const auto ri = static_cast<Eigen::Index>(*ref);
  if (!(g.minCoeff() > 0.0) || !(phi.minCoeff() > 0.0)) fail(ErrorKind::NonPositiveInput, "comparability needs positive functions");
  const Vector gs = g * (phi[ri] / g[ri]);
  ComparabilityReport rep;
  rep.reference = reference;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Coord d{};
    for (int a = 0; a < kMaxDim; ++a) d[a] = nodes[i][a] - x0[a];
    if (sup_norm(d) <= eps) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    rep.C = std::max({rep.C, phi[ii] / gs[ii], gs[ii] / phi[ii]});
    ++rep.count;
  }
  if (rep.count == 0) fail(ErrorKind::ExclusionTooLarge, "no nodes beyond the exclusion radius " + std::to_string(eps));
  return rep;
}

ComparabilityProfile comparability_profile(const OperatorSpec& spec, const Exhaustion& ex, double lambda, int eps) {
  ComparabilityProfile prof;
  prof.lambda = lambda;
  prof.radii = ex.radii;
  for (int i = 0; i < ex.dim; ++i) prof.reference[i] = ex.radii.front();
  for (int k : ex.radii) {
    const AssembledOperator op = assemble(spec, ex, k);
    const PrincipalPair pp = principal_pair(op);
    if (!(lambda < pp.lambda0)) {
      fail(ErrorKind::ShiftAboveBoxEigenvalue, "comparability shift " + std::to_string(lambda) +
                                                   " not below box eigenvalue " + std::to_string(pp.lambda0));
    }
    const ShiftedSolver solver(op, lambda);
    const Vector g = green_column(solver, op, op.anchor_index());
    prof.C.push_back(comparability_check(g, pp.phi, op.nodes, ex.anchor, prof.reference, eps).C);
  }
  const std::size_t M = prof.C.size();
  if (M >= 2) prof.last_rel_change = std::abs(prof.C[M - 1] - prof.C[M - 2]) / prof.C[M - 2];
  return prof;
}

}  // namespace clab
