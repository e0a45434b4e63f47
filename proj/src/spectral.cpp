#include "clab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "clab/errors.hpp"
#include "clab/krylov.hpp"

namespace clab {
namespace {

constexpr Eigen::Index kDenseSpectrumMax = 4000;

template <class Mat>
double one_norm(const Mat& T, const Vector& w, const Vector& nu) {
  const Vector wn = w.cwiseProduct(nu);
  const Eigen::RowVectorXd cols = wn.transpose() * T.cwiseAbs();
  return cols.cwiseQuotient(wn.transpose()).maxCoeff();
}

template <class Mat>
double inf_norm(const Mat& T, const Vector& w) {
  const Vector rows = T.cwiseAbs() * w.cwiseInverse();
  return rows.cwiseProduct(w).maxCoeff();
}

template <class Mat>
double two_norm(const Mat& T, const Vector& w, const Vector& nu) {
  const Vector d = w.cwiseProduct(nu.cwiseSqrt());
  using Plain = typename Mat::PlainObject;
  const Plain B = d.asDiagonal() * T * d.cwiseInverse().asDiagonal();
  Eigen::BDCSVD<Plain> svd(B);
  return svd.singularValues()[0];
}

// sigma_max by power iteration on B^T B, warm-started from v.
double largest_singular(const Matrix& B, Vector& v) {
  if (v.size() != B.cols() || v.norm() == 0.0) v = Vector::Ones(B.cols());
  v.normalize();
  for (int it = 0; it < 300; ++it) {
    const Vector u = B * v;
    const double s = u.norm();
    if (s == 0.0) return 0.0;
    Vector y = B.transpose() * u;
    const double s2 = s * s;
    const double res = (y - s2 * v).norm();
    v = y.normalized();
    if (res <= 1e-13 * s2) return (B * v).norm();
  }
  Eigen::BDCSVD<Matrix> svd(B, Eigen::ComputeThinV);
  v = svd.matrixV().col(0);
  return svd.singularValues()[0];
}

void sort_by_modulus(std::vector<std::complex<double>>& ev) {
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

double list_mismatch(const std::vector<std::complex<double>>& a, std::vector<std::complex<double>> b) {
  double worst = 0.0;
  for (const auto& z : a) {
    auto best = std::min_element(b.begin(), b.end(),
                                 [&](const auto& p, const auto& q) { return std::abs(p - z) < std::abs(q - z); });
    if (best == b.end()) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(*best - z));
    b.erase(best);
  }
  return worst;
}

}  // namespace

GreenOperator green_operator(const GreenKernel& green, const Vector& W, const Vector& nu) {
  const Eigen::Index n = green.G.rows();
  if (W.size() != n || nu.size() != n) fail(ErrorKind::BoxMismatch, "weights do not match the Green kernel");
  if (!(green.G.minCoeff() > 0.0)) fail(ErrorKind::NonPositiveKernel, "Green kernel is not positive");
  GreenOperator g;
  g.radius = green.radius;
  g.lambda = green.lambda;
  g.W = W;
  g.nu = nu;
  const Vector wn = W.cwiseProduct(nu);
  g.K = green.G * wn.asDiagonal();
  g.K_dual = green.G.transpose() * wn.asDiagonal();
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 50; ++trial) {
    Vector f(n), h(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      f[i] = gauss(rng);
      h[i] = gauss(rng);
    }
    const double lhs = pairing(h, g.K * f, W, nu);
    const double rhs = pairing(g.K_dual * h, f, W, nu);
    const double scale = std::abs(lhs) + std::abs(rhs) + 1e-300;
    g.duality_defect = std::max(g.duality_defect, std::abs(lhs - rhs) / scale);
  }
  return g;
}

NormResult induced_norm(const Matrix& T, const WeightedSpace& sp) {
  if (T.rows() != sp.weight.size()) fail(ErrorKind::BoxMismatch, "operator does not match the space");
  if (sp.p.is_inf()) return {inf_norm(T, sp.weight), "exact"};
  const double p = sp.p.value();
  if (p == 1.0) return {one_norm(T, sp.weight, sp.nu), "exact"};
  if (p == 2.0) return {two_norm(T, sp.weight, sp.nu), "svd"};
  const WeightedSpace s1 = make_weights(sp.phi, sp.phi_tilde, sp.W, sp.nu, Exponent(1.0), false);
  const WeightedSpace si = make_weights(sp.phi, sp.phi_tilde, sp.W, sp.nu, Exponent::infinity(), false);
  const double n1 = one_norm(T, s1.weight, sp.nu);
  const double ni = inf_norm(T, si.weight);
  return {std::pow(n1, 1.0 / p) * std::pow(ni, 1.0 - 1.0 / p), "interpolation-bound"};
}

double induced_norm(const ComplexMatrix& T, const WeightedSpace& sp) {
  if (T.rows() != sp.weight.size()) fail(ErrorKind::BoxMismatch, "operator does not match the space");
  if (sp.p.is_inf()) return inf_norm(T, sp.weight);
  if (sp.p.value() == 1.0) return one_norm(T, sp.weight, sp.nu);
  if (sp.p.value() == 2.0) return two_norm(T, sp.weight, sp.nu);
  fail(ErrorKind::ExponentOutOfRange, "complex norms only for p in {1, 2, inf}");
}

SchurReport schur_bound(const GreenKernel& green, const Vector& phi, const Vector& phi_tilde, const Vector& W,
                        const Vector& nu, Exponent p) {
  if (p.is_inf() || !(p.value() > 1.0)) fail(ErrorKind::ExponentOutOfRange, "Schur test needs 1 < p < inf");
  const double q = p.value();
  const double qc = p.conjugate().value();
  const Eigen::Index n = green.G.rows();
  // kernel, weight and measure of the weighted test, evaluated literally
  const Eigen::ArrayXd phip = phi.array().pow(q);
  const Eigen::ArrayXd denom = phi.array().pow(1.0 - q) * phi_tilde.array();
  const Eigen::ArrayXd rho = phi.array().pow(-q) * (phi.array() * W.array() * phi_tilde.array()) * nu.array();
  SchurReport rep;
  Vector col(n);
  col.setZero();
  for (Eigen::Index x = 0; x < n; ++x) {
    double row = 0.0;
    for (Eigen::Index y = 0; y < n; ++y) {
      const double K = green.G(x, y) / denom[y];
      const double w = phip[y] / phip[x];
      row += std::pow(w, 1.0 / q) * K * rho[y];
      col[y] += std::pow(w, -1.0 / qc) * K * rho[x];
    }
    rep.row_sup = std::max(rep.row_sup, row);
  }
  rep.col_sup = col.maxCoeff();
  rep.bound = std::max(rep.row_sup, rep.col_sup);
  rep.geometric = std::pow(rep.row_sup, 1.0 / qc) * std::pow(rep.col_sup, 1.0 / q);
  return rep;
}

SpectralReport spectrum(const GreenOperator& g, const AssembledOperator& op, const SpectrumOptions& opt) {
  const Eigen::Index n = g.K.rows();
  if (n > kDenseSpectrumMax) fail(ErrorKind::BoxTooLarge, "dense spectrum limited to " + std::to_string(kDenseSpectrumMax) + " nodes");
  if (op.size() != n) fail(ErrorKind::BoxMismatch, "operator and Green operator differ in size");
  SpectralReport rep;
  ComplexMatrix vecs;
  std::vector<std::complex<double>> vals;
  if (op.symmetric) {
    // K = D^{-1/2} S D^{1/2} with S symmetric, D = W nu
    const Vector d = g.W.cwiseProduct(g.nu).cwiseSqrt();
    Matrix S = d.asDiagonal() * g.K * d.cwiseInverse().asDiagonal();
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    if (es.info() != Eigen::Success) fail(ErrorKind::SolverNoConvergence, "symmetric eigensolver failed");
    vecs = (d.cwiseInverse().asDiagonal() * es.eigenvectors()).cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < n; ++i) vals.emplace_back(es.eigenvalues()[i], 0.0);
    rep.dual_eigenvalues = vals;
  } else {
    Eigen::EigenSolver<Matrix> es(g.K);
    if (es.info() != Eigen::Success) fail(ErrorKind::SolverNoConvergence, "eigensolver failed");
    vecs = es.eigenvectors();
    for (Eigen::Index i = 0; i < n; ++i) vals.push_back(es.eigenvalues()[i]);
    Eigen::EigenSolver<Matrix> ed(g.K_dual, false);
    for (Eigen::Index i = 0; i < n; ++i) rep.dual_eigenvalues.push_back(ed.eigenvalues()[i]);
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    const auto& x = vals[static_cast<std::size_t>(a)];
    const auto& y = vals[static_cast<std::size_t>(b)];
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  for (auto i : order) rep.eigenvalues.push_back(vals[static_cast<std::size_t>(i)]);
  sort_by_modulus(rep.dual_eigenvalues);
  rep.dual_mismatch = list_mismatch(rep.eigenvalues, rep.dual_eigenvalues) / std::abs(rep.eigenvalues.front());

  rep.eta_max = rep.eigenvalues.front();
  rep.top_imag = std::abs(rep.eta_max.imag());
  rep.gap = n > 1 ? std::abs(rep.eigenvalues[0]) - std::abs(rep.eigenvalues[1]) : std::abs(rep.eta_max);
  rep.min_modulus = std::abs(rep.eigenvalues.back());

  const ComplexVector top = vecs.col(order.front());
  Vector tv = top.real();
  if (top.imag().norm() > top.real().norm()) tv = top.imag();
  if (tv.sum() < 0) tv = -tv;
  tv /= tv.cwiseAbs().maxCoeff();
  rep.top_vector = tv;
  rep.sign_product = tv.minCoeff() * tv.maxCoeff();

  // geometric multiplicity: nullity of K - eta_max I
  {
    Matrix shifted = g.K - rep.eta_max.real() * Matrix::Identity(n, n);
    Eigen::BDCSVD<Matrix> svd(shifted);
    const auto& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, std::abs(rep.eta_max));
    rep.geometric_multiplicity = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv[i] <= cut) ++rep.geometric_multiplicity;
    }
  }

  const Eigen::SparseMatrix<std::complex<double>> Lc = op.L.cast<std::complex<double>>();
  for (std::size_t j = 0; j < order.size(); ++j) {
    const auto eta = vals[static_cast<std::size_t>(order[j])];
    const ComplexVector v = vecs.col(order[j]);
    const std::complex<double> theta = g.lambda + 1.0 / eta;
    const ComplexVector r = Lc * v - theta * (op.W.cast<std::complex<double>>().cwiseProduct(v));
    rep.pde_residual = std::max(rep.pde_residual, r.norm() / v.norm());
  }

  if (opt.lambda0_k) {
    rep.expected_top = 1.0 / (*opt.lambda0_k - g.lambda);
    rep.top_defect = std::abs(rep.eta_max - *rep.expected_top) / *rep.expected_top;
  }
  rep.degenerate = rep.top_imag > 1e-10 * std::abs(rep.eta_max) || !(rep.gap > 1e-8) ||
                   rep.geometric_multiplicity > 1 || !(rep.sign_product > 0.0);
  if (rep.degenerate && opt.throw_on_degenerate) {
    fail(ErrorKind::DegenerateTopEigenvalue, "top eigenvalue gap " + std::to_string(rep.gap) + ", sign product " +
                                                 std::to_string(rep.sign_product));
  }
  return rep;
}

std::vector<GelfandSeries> gelfand_radius(const GreenOperator& g, const std::vector<WeightedSpace>& spaces,
                                          int n_max) {
  if (n_max < 8) fail(ErrorKind::SpecDomainMismatch, "n_max must be at least 8");
  std::vector<GelfandSeries> out;
  std::vector<Vector> warm(spaces.size());
  std::vector<double> prev_log(spaces.size(), 0.0);
  for (const auto& sp : spaces) {
    if (!(sp.p.is_inf() || sp.p.value() == 1.0 || sp.p.value() == 2.0)) {
      fail(ErrorKind::ExponentOutOfRange, "Gelfand sequences only for p in {1, 2, inf}");
    }
    out.push_back({sp.p, {}, {}});
  }
  Matrix P = g.K;
  double log_scale = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) P = (P * g.K).eval();
    // renormalize the power to keep it in range
    const double s = P.cwiseAbs().maxCoeff();
    P /= s;
    log_scale += std::log(s);
    for (std::size_t i = 0; i < spaces.size(); ++i) {
      const auto& sp = spaces[i];
      double nrm = 0.0;
      if (sp.p.is_inf()) {
        nrm = inf_norm(P, sp.weight);
      } else if (sp.p.value() == 1.0) {
        nrm = one_norm(P, sp.weight, sp.nu);
      } else {
        const Vector d = sp.weight.cwiseProduct(sp.nu.cwiseSqrt());
        const Matrix B = d.asDiagonal() * P * d.cwiseInverse().asDiagonal();
        nrm = largest_singular(B, warm[i]);
      }
      const double lg = log_scale + std::log(nrm);
      out[i].r.push_back(std::exp(lg / n));
      out[i].ratio.push_back(std::exp(lg - prev_log[i]));
      prev_log[i] = lg;
    }
  }
  return out;
}

IdentityCheck resolvent_defect(const GreenKernel& gl, const GreenKernel& gm, const Vector& W, const Vector& nu) {
  if (gl.G.rows() != gm.G.rows() || gl.radius != gm.radius) fail(ErrorKind::BoxMismatch, "kernels on different boxes");
  IdentityCheck c;
  if (gl.lambda == gm.lambda) {
    c.identical_shifts = true;
    c.note = "identical shifts";
    return c;
  }
  const Matrix D = gl.G - gm.G - (gl.lambda - gm.lambda) * gl.G * W.cwiseProduct(nu).asDiagonal() * gm.G;
  c.defect = D.cwiseAbs().maxCoeff() / gl.G.cwiseAbs().maxCoeff();
  return c;
}

IdentityCheck pseudoresolvent_defect(const GreenOperator& a, const GreenOperator& b) {
  if (a.K.rows() != b.K.rows() || a.radius != b.radius) fail(ErrorKind::BoxMismatch, "operators on different boxes");
  IdentityCheck c;
  if (a.lambda == b.lambda) {
    c.identical_shifts = true;
    c.note = "identical shifts";
    return c;
  }
  const Matrix D = a.K - b.K - (a.lambda - b.lambda) * a.K * b.K;
  c.defect = D.cwiseAbs().maxCoeff() / a.K.cwiseAbs().maxCoeff();
  return c;
}

LeadingSpectrum leading_spectrum(const AssembledOperator& op, double lambda, int nev) {
  LeadingSpectrum ls;
  ls.radius = op.radius;
  const Eigen::Index n = op.size();
  if (nev > n) fail(ErrorKind::SpecDomainMismatch, "box has fewer nodes than requested eigenvalues");
  std::vector<double> mod;
  if (n <= 1500) {
    const Matrix M = Matrix(shift(op, lambda).L);
    const Matrix K = M.partialPivLu().solve(Matrix(op.W.asDiagonal()));
    if (op.symmetric) {
      const Vector d = op.W.cwiseProduct(op.nu).cwiseSqrt();
      Matrix S = d.asDiagonal() * K * d.cwiseInverse().asDiagonal();
      S = 0.5 * (S + S.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
      for (Eigen::Index i = 0; i < n; ++i) mod.push_back(std::abs(es.eigenvalues()[i]));
    } else {
      Eigen::EigenSolver<Matrix> es(K, false);
      for (Eigen::Index i = 0; i < n; ++i) mod.push_back(std::abs(es.eigenvalues()[i]));
    }
    std::sort(mod.begin(), mod.end(), std::greater<>());
    mod.resize(static_cast<std::size_t>(nev));
    ls.method = "dense";
  } else {
    if (!op.symmetric) fail(ErrorKind::BoxTooLarge, "leading spectrum of a large non-symmetric box");
    const PrincipalPair pp = principal_pair(op);
    const auto [lo, hi] = collatz_wielandt(op, Vector::Ones(n));
    (void)hi;
    double delta = 0.1 * (pp.lambda0 - lo);
    if (!(delta > 1e-8 * std::max(1.0, std::abs(pp.lambda0)))) delta = 1e-3 * std::max(1.0, std::abs(pp.lambda0));
    KrylovOptions ko;
    ko.nev = nev;
    ko.block = std::max(8, nev + 3);
    ko.max_basis = 240;
    ko.tol = 1e-8;
    const RitzPairs rp = symmetric_lowest(op, pp.lambda0 - delta, ko);
    if (!rp.converged) fail(ErrorKind::SolverNoConvergence, "leading spectrum did not converge");
    for (Eigen::Index j = 0; j < rp.theta.size(); ++j) mod.push_back(1.0 / (rp.theta[j] - lambda));
    std::sort(mod.begin(), mod.end(), std::greater<>());
    ls.method = "krylov";
  }
  ls.eta = mod;
  return ls;
}

CauchyCheck leading_cauchy(const OperatorSpec& spec, const Exhaustion& ex, double lambda, int nev) {
  if (ex.radii.size() < 3) fail(ErrorKind::InsufficientRadii, "need at least three radii");
  CauchyCheck c;
  for (int k : ex.radii) c.boxes.push_back(leading_spectrum(assemble(spec, ex, k), lambda, nev));
  const std::size_t M = c.boxes.size();
  for (int j = 0; j < nev; ++j) {
    const auto J = static_cast<std::size_t>(j);
    const double d1 = std::abs(c.boxes[M - 2].eta[J] - c.boxes[M - 3].eta[J]);
    const double d2 = std::abs(c.boxes[M - 1].eta[J] - c.boxes[M - 2].eta[J]);
    const double r = d1 > 0 ? d2 / d1 : (d2 > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    c.ratios.push_back(r);
    c.max_ratio = std::max(c.max_ratio, r);
  }
  return c;
}

}  // namespace clab
