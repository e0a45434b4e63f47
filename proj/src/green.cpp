#include "clab/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "clab/errors.hpp"
#include "clab/krylov.hpp"
#include "clab/parallel.hpp"

namespace clab {
namespace {

constexpr Eigen::Index kDenseSymmetric = 1500;
constexpr Eigen::Index kDenseGeneral = 300;

double operator_scale(const AssembledOperator& op) {
  const Vector d = op.L.diagonal().cwiseQuotient(op.W);
  return std::max(d.cwiseAbs().maxCoeff(), 1e-300);
}

double relative_residual(const SparseMatrix& L, const Vector& W, double lambda, const Vector& u) {
  const Vector r = L * u - lambda * W.cwiseProduct(u);
  const double scale = (L * u).cwiseAbs().maxCoeff() + std::abs(lambda) * W.cwiseProduct(u).cwiseAbs().maxCoeff();
  return r.cwiseAbs().maxCoeff() / std::max(scale, 1e-300);
}

// Flip to the positive orthant and check sign-definiteness.
Vector positive_vector(Vector u, const char* what) {
  if (u.sum() < 0) u = -u;
  const double top = u.cwiseAbs().maxCoeff();
  if (!(u.minCoeff() > 0.0)) {
    fail(ErrorKind::SolverNoConvergence,
         std::string(what) + " is not sign-definite (min/max = " + std::to_string(u.minCoeff() / top) + ")");
  }
  return u / top;
}

PrincipalPair dense_symmetric(const AssembledOperator& op) {
  const Vector s = op.W.cwiseProduct(op.nu).cwiseSqrt().cwiseInverse();
  Matrix B = s.asDiagonal() * (op.nu.asDiagonal() * Matrix(op.L)) * s.asDiagonal();
  B = 0.5 * (B + B.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(B);
  if (es.info() != Eigen::Success) fail(ErrorKind::SolverNoConvergence, "dense symmetric eigensolver failed");
  PrincipalPair pp;
  pp.lambda0 = es.eigenvalues()[0];
  pp.phi = positive_vector(s.cwiseProduct(es.eigenvectors().col(0)), "principal eigenvector");
  pp.phi_tilde = pp.phi;
  pp.method = "dense-symmetric";
  return pp;
}

std::pair<double, Vector> dense_general_side(const SparseMatrix& L, const Vector& W, const char* what) {
  const Matrix A = W.cwiseInverse().asDiagonal() * Matrix(L);
  Eigen::EigenSolver<Matrix> es(A);
  if (es.info() != Eigen::Success) fail(ErrorKind::SolverNoConvergence, "dense eigensolver failed");
  const auto& ev = es.eigenvalues();
  Eigen::Index idx = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i) {
    if (ev[i].real() < ev[idx].real()) idx = i;
  }
  const double scale = std::max(1.0, std::abs(ev[idx]));
  if (std::abs(ev[idx].imag()) > 1e-8 * scale) {
    fail(ErrorKind::ComplexPrincipalEigenvalue,
         "eigenvalue with minimal real part has imaginary part " + std::to_string(ev[idx].imag()));
  }
  Vector u = es.eigenvectors().col(idx).real();
  return {ev[idx].real(), positive_vector(u, what)};
}

PrincipalPair dense_general(const AssembledOperator& op) {
  PrincipalPair pp;
  auto [lr, phi] = dense_general_side(op.L, op.W, "principal eigenvector");
  auto [ll, phit] = dense_general_side(op.L_adj, op.W, "adjoint principal eigenvector");
  (void)ll;
  pp.phi = phi;
  pp.phi_tilde = phit;
  pp.lambda0 = lr;
  pp.method = "dense-general";
  return pp;
}

// Inverse iteration on (L - sigma W)^{-1} W for one side; sigma trails the
// Collatz-Wielandt lower bound so the shifted matrix stays nonsingular M.
struct SideResult {
  Vector u;
  double lower = 0.0, upper = 0.0;
  int iterations = 0;
};

SideResult inverse_iteration(const AssembledOperator& op, bool adjoint, const PrincipalOptions& opt) {
  const AssembledOperator* view = &op;
  AssembledOperator swapped;
  if (adjoint) {
    swapped = op;
    std::swap(swapped.L, swapped.L_adj);
    view = &swapped;
  }
  Vector u = Vector::Ones(op.size());
  auto [lo, hi] = collatz_wielandt(*view, u);
  const double scale = operator_scale(op);
  auto place = [&](double l, double h) { return l - std::max(h - l, 1e-6 * scale); };
  double sigma = place(lo, hi);
  auto solver = std::make_unique<ShiftedSolver>(op, sigma);
  double last_width = hi - lo;
  double rho_prev = std::numeric_limits<double>::quiet_NaN();
  SideResult res;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const Vector rhs = op.W.cwiseProduct(u);
    Vector next = adjoint ? Vector(op.nu.cwiseInverse().cwiseProduct(solver->solve_transposed(op.nu.cwiseProduct(rhs))))
                          : solver->solve(rhs);
    if (next.sum() < 0) next = -next;
    u = next / next.cwiseAbs().maxCoeff();
    res.iterations = it;
    if (u.minCoeff() > 0.0) {
      std::tie(lo, hi) = collatz_wielandt(*view, u);
    }
    const Vector Lu = view->L * u;
    const double rho = (u.array() * Lu.array() * op.nu.array()).sum() /
                       (u.array().square() * op.W.array() * op.nu.array()).sum();
    const double width = hi - lo;
    if (width <= opt.tol * std::max(std::abs(rho), 1e-3 * scale)) break;
    if (std::abs(rho - rho_prev) <= 1e-15 * scale && width <= 1e-6 * scale) break;
    rho_prev = rho;
    if (u.minCoeff() > 0.0 && width < 0.1 * last_width && lo - sigma > 2.0 * width) {
      sigma = place(lo, hi);
      solver = std::make_unique<ShiftedSolver>(op, sigma);
      last_width = width;
    }
    if (it == opt.max_iter && width > 1e-6 * scale) {
      fail(ErrorKind::SolverNoConvergence, "inverse iteration bracket still " + std::to_string(width) + " after " +
                                               std::to_string(it) + " iterations");
    }
  }
  res.u = positive_vector(u, adjoint ? "adjoint principal eigenvector" : "principal eigenvector");
  res.lower = lo;
  res.upper = hi;
  return res;
}

PrincipalPair iterative_general(const AssembledOperator& op, const PrincipalOptions& opt) {
  const SideResult right = inverse_iteration(op, false, opt);
  const SideResult left = inverse_iteration(op, true, opt);
  PrincipalPair pp;
  pp.phi = right.u;
  pp.phi_tilde = left.u;
  pp.lower = right.lower;
  pp.upper = right.upper;
  pp.iterations = right.iterations + left.iterations;
  pp.method = "inverse-iteration";
  // two-sided Rayleigh quotient
  const Vector Lphi = op.L * pp.phi;
  pp.lambda0 = (pp.phi_tilde.array() * Lphi.array() * op.nu.array()).sum() /
               (pp.phi_tilde.array() * op.W.array() * pp.phi.array() * op.nu.array()).sum();
  return pp;
}

PrincipalPair iterative_symmetric(const AssembledOperator& op, const PrincipalOptions& opt) {
  const Vector ones = Vector::Ones(op.size());
  auto [lo, hi] = collatz_wielandt(op, ones);
  const double scale = operator_scale(op);
  const double sigma = lo - 0.1 * std::max({hi - lo, 1e-3 * std::abs(lo), 1e-8 * scale});
  KrylovOptions ko;
  ko.nev = 1;
  ko.block = 2;
  ko.tol = std::max(opt.tol, 1e-12);
  const RitzPairs rp = symmetric_lowest(op, sigma, ko, ones);
  if (!rp.converged) fail(ErrorKind::SolverNoConvergence, "Krylov iteration for the principal pair did not converge");
  PrincipalPair pp;
  pp.lambda0 = rp.theta[0];
  pp.phi = positive_vector(rp.vectors.col(0), "principal eigenvector");
  pp.phi_tilde = pp.phi;
  pp.iterations = rp.applications;
  pp.method = "krylov-symmetric";
  return pp;
}

}  // namespace

std::pair<double, double> collatz_wielandt(const AssembledOperator& op, const Vector& u) {
  const Vector r = (op.L * u).cwiseQuotient(op.W.cwiseProduct(u));
  return {r.minCoeff(), r.maxCoeff()};
}

PrincipalPair principal_pair(const AssembledOperator& op, const PrincipalOptions& opt) {
  using M = PrincipalOptions::Method;
  const Eigen::Index n = op.size();
  const bool dense = opt.method == M::dense ||
                     (opt.method == M::automatic && n <= (op.symmetric ? kDenseSymmetric : kDenseGeneral));
  PrincipalPair pp;
  if (dense) {
    pp = op.symmetric ? dense_symmetric(op) : dense_general(op);
  } else {
    pp = op.symmetric ? iterative_symmetric(op, opt) : iterative_general(op, opt);
  }
  const Eigen::Index a = op.anchor_index();
  pp.phi /= pp.phi[a];
  pp.phi_tilde /= pp.phi_tilde[a];
  if (op.symmetric) pp.phi_tilde = pp.phi;
  std::tie(pp.lower, pp.upper) = collatz_wielandt(op, pp.phi);
  pp.residual = std::max(relative_residual(op.L, op.W, pp.lambda0, pp.phi),
                         relative_residual(op.L_adj, op.W, pp.lambda0, pp.phi_tilde));
  if (opt.normalize_pairing) {
    const double z = (pp.phi.array() * op.W.array() * pp.phi_tilde.array() * op.nu.array()).sum();
    pp.phi_tilde /= z;
  }
  return pp;
}

GreenKernel dirichlet_green(const AssembledOperator& op, double lambda, std::optional<double> lambda0_k) {
  const double l0 = lambda0_k ? *lambda0_k : principal_pair(op).lambda0;
  if (!(lambda < l0)) {
    fail(ErrorKind::ShiftAboveBoxEigenvalue,
         "shift " + std::to_string(lambda) + " is not below the box eigenvalue " + std::to_string(l0));
  }
  const Matrix M = Matrix(shift(op, lambda).L);
  Eigen::PartialPivLU<Matrix> lu(M);
  GreenKernel gk;
  gk.radius = op.radius;
  gk.lambda = lambda;
  gk.G = lu.inverse() * op.nu.cwiseInverse().asDiagonal();
  gk.min_entry = gk.G.minCoeff();
  if (!(gk.min_entry > 0.0)) {
    fail(ErrorKind::NonPositiveKernel, "Green kernel has entry " + std::to_string(gk.min_entry));
  }
  return gk;
}

Vector green_column(const ShiftedSolver& solver, const AssembledOperator& op, Eigen::Index y) {
  Vector e = Vector::Zero(op.size());
  e[y] = 1.0 / op.nu[y];
  return solver.solve(e);
}

Vector green_row(const ShiftedSolver& solver, const AssembledOperator& op, Eigen::Index x) {
  Vector e = Vector::Zero(op.size());
  e[x] = 1.0;
  return solver.solve_transposed(e).cwiseQuotient(op.nu);
}

Lambda0Sequence lambda0_limit(const OperatorSpec& spec, const Exhaustion& ex) {
  if (ex.radii.size() < 3) fail(ErrorKind::InsufficientRadii, "need at least three radii for the limit");
  Lambda0Sequence seq;
  seq.radii = ex.radii;
  seq.pairs = parallel_map<PrincipalPair>(ex.radii.size(), [&](std::size_t i) {
    return principal_pair(assemble(spec, ex, ex.radii[i]));
  });
  for (const auto& pp : seq.pairs) seq.lambda0.push_back(pp.lambda0);
  for (std::size_t i = 1; i < seq.lambda0.size(); ++i) {
    const double inc = seq.lambda0[i] - seq.lambda0[i - 1];
    seq.worst_increase = i == 1 ? inc : std::max(seq.worst_increase, inc);
  }
  seq.strictly_decreasing = seq.worst_increase < -1e-10 * std::max(1.0, std::abs(seq.lambda0.front()));
  const std::size_t M = seq.lambda0.size();
  const double h1 = 1.0 / (seq.radii[M - 2] + 1.0), h2 = 1.0 / (seq.radii[M - 1] + 1.0);
  const double l1 = seq.lambda0[M - 2], l2 = seq.lambda0[M - 1];
  seq.extrapolated = (l2 * h1 * h1 - l1 * h2 * h2) / (h1 * h1 - h2 * h2);
  seq.error_band = std::abs(l2 - l1);
  return seq;
}

std::string to_string(Criticality c) {
  switch (c) {
    case Criticality::subcritical: return "subcritical";
    case Criticality::critical: return "critical";
    case Criticality::supercritical: return "supercritical";
    case Criticality::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

GrowthFit fit_line(const std::vector<double>& t, const std::vector<double>& g, std::string model) {
  GrowthFit f;
  f.model = std::move(model);
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double mg = std::accumulate(g.begin(), g.end(), 0.0) / n;
  double stt = 0, stg = 0, sgg = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    stg += (t[i] - mt) * (g[i] - mg);
    sgg += (g[i] - mg) * (g[i] - mg);
  }
  f.slope = stg / stt;
  f.intercept = mg - f.slope * mt;
  f.r2 = sgg > 0 ? (stg * stg) / (stt * sgg) : 0.0;
  return f;
}

OperatorSpec adjoint_spec(const OperatorSpec& spec) {
  OperatorSpec out = spec;
  std::swap(out.b, out.b_tilde);
  return out;
}

GroundStateReport classify(const OperatorSpec& spec_in, const Exhaustion& ex, const ClassifyOptions& opt) {
  const OperatorSpec spec = opt.adjoint ? adjoint_spec(spec_in) : spec_in;
  GroundStateReport rep;
  rep.shift = opt.shift;
  rep.sequence = lambda0_limit(spec, ex);
  const auto& seq = rep.sequence;
  const std::size_t M = seq.lambda0.size();
  rep.tol_pos = 10.0 * std::abs(seq.lambda0[M - 1] - seq.lambda0[M - 2]);

  // probe nodes: anchor, a unit neighbour, and a far corner of the smallest box
  const int k1 = ex.radii.front();
  rep.x0 = ex.anchor;
  rep.y0 = ex.anchor;
  for (int sgn : {1, -1}) {
    Coord y = ex.anchor;
    y[0] += sgn;
    if (sup_norm(y) <= k1) {
      rep.y0 = y;
      break;
    }
  }
  Coord corner{}, anti{};
  for (int i = 0; i < ex.dim; ++i) {
    corner[i] = k1;
    anti[i] = -k1;
  }
  const std::vector<Coord> columns = {rep.x0, rep.y0, corner};
  rep.probes = {{rep.x0, rep.x0, {}, 0}, {rep.y0, rep.x0, {}, 0}, {corner, rep.x0, {}, 0},
                {rep.x0, rep.y0, {}, 0}, {corner, rep.y0, {}, 0}, {rep.x0, corner, {}, 0},
                {anti, corner, {}, 0}};

  const double nan = std::numeric_limits<double>::quiet_NaN();
  struct BoxProbe {
    double probe = 0.0, min_entry = 0.0;
    std::vector<double> values;
  };
  // boxes are independent; merged below in radius order
  const auto boxes = parallel_map<BoxProbe>(M, [&](std::size_t i) {
    BoxProbe b;
    if (!(seq.lambda0[i] > opt.shift)) {
      b.probe = b.min_entry = nan;
      b.values.assign(rep.probes.size(), nan);
      return b;
    }
    const AssembledOperator op = assemble(spec, ex, seq.radii[i]);
    const ShiftedSolver solver(op, opt.shift);
    std::vector<Vector> cols;
    for (const auto& y : columns) cols.push_back(green_column(solver, op, static_cast<Eigen::Index>(*op.nodes.index_of(y))));
    const auto at = [&](const Coord& x, const Coord& y) {
      const auto ci = std::find(columns.begin(), columns.end(), y) - columns.begin();
      return cols[static_cast<std::size_t>(ci)][static_cast<Eigen::Index>(*op.nodes.index_of(x))];
    };
    b.probe = at(rep.x0, rep.y0);
    b.min_entry = cols[1].minCoeff();
    for (const auto& p : rep.probes) b.values.push_back(at(p.x, p.y));
    return b;
  });
  for (const auto& b : boxes) {
    rep.green_probe.push_back(b.probe);
    rep.min_entry.push_back(b.min_entry);
    if (!std::isnan(b.min_entry) && !(b.min_entry > 0.0)) rep.green_positive = false;
    for (std::size_t j = 0; j < rep.probes.size(); ++j) rep.probes[j].values.push_back(b.values[j]);
  }
  for (auto& p : rep.probes) {
    p.worst_increment = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < p.values.size(); ++i) {
      if (std::isnan(p.values[i]) || std::isnan(p.values[i - 1])) continue;
      p.worst_increment = std::min(p.worst_increment, p.values[i] - p.values[i - 1]);
    }
  }

  const double ext = seq.extrapolated - opt.shift;
  if (ext > rep.tol_pos) {
    rep.verdict = Criticality::subcritical;
    rep.reason = "extrapolated lambda0 above tolerance";
    return rep;
  }
  if (ext < -rep.tol_pos) {
    rep.verdict = Criticality::supercritical;
    rep.reason = "extrapolated lambda0 below tolerance";
    return rep;
  }
  if (std::any_of(rep.green_probe.begin(), rep.green_probe.end(), [](double g) { return std::isnan(g); })) {
    rep.verdict = Criticality::inconclusive;
    rep.reason = "Green function undefined on some box at this shift";
    return rep;
  }
  std::vector<double> diffs;
  for (std::size_t i = 1; i < M; ++i) diffs.push_back(rep.green_probe[i] - rep.green_probe[i - 1]);
  bool cauchy = true;
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    const double r = diffs[i] / diffs[i - 1];
    rep.diff_ratios.push_back(r);
    cauchy = cauchy && diffs[i - 1] > 0 && r >= 0 && r < 0.5;
  }
  std::vector<double> lk, kk;
  for (int k : seq.radii) {
    lk.push_back(std::log(static_cast<double>(k)));
    kk.push_back(static_cast<double>(k));
  }
  rep.log_fit = fit_line(lk, rep.green_probe, "log");
  rep.linear_fit = fit_line(kk, rep.green_probe, "linear");
  rep.chosen_fit = rep.log_fit.r2 >= rep.linear_fit.r2 ? rep.log_fit : rep.linear_fit;
  if (cauchy) {
    rep.verdict = Criticality::subcritical;
    rep.reason = "Green sequence Cauchy-convergent at threshold";
  } else if (rep.chosen_fit->r2 >= 0.99 && rep.chosen_fit->slope > 0) {
    rep.verdict = Criticality::critical;
    rep.reason = "divergent " + rep.chosen_fit->model + " growth of the Green sequence";
  } else {
    rep.verdict = Criticality::inconclusive;
    rep.reason = "Green sequence neither Cauchy nor fitted by a divergent model";
  }
  return rep;
}

InvarianceDefect invariance_defect(const Vector& v, const Vector& vt, double lambda, double mu,
                                   const GreenKernel& green, const Vector& W, const Vector& nu) {
  if (!(lambda < mu)) fail(ErrorKind::OrderViolation, "need lambda < mu");
  if (v.size() != green.G.rows() || vt.size() != green.G.rows() || W.size() != v.size() || nu.size() != v.size()) {
    fail(ErrorKind::BoxMismatch, "vectors do not match the Green kernel");
  }
  const double inv = 1.0 / (mu - lambda);
  InvarianceDefect d;
  const Vector wn = W.cwiseProduct(nu);
  d.right = inv * v - green.G * wn.cwiseProduct(v);
  d.left = inv * vt - green.G.transpose() * wn.cwiseProduct(vt);
  d.sup_right = d.right.cwiseAbs().maxCoeff();
  d.sup_left = d.left.cwiseAbs().maxCoeff();
  d.min_right = d.right.minCoeff();
  d.min_left = d.left.minCoeff();
  return d;
}

}  // namespace clab
