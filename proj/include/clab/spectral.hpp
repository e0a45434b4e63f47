#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "clab/green.hpp"
#include "clab/weighted.hpp"

namespace clab {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// (G f)(x) = sum_y G(x,y) W(y) f(y) nu(y) and its companion
/// (G^dual g)(y) = sum_x G(x,y) W(x) g(x) nu(x), as matrices on node values.
struct GreenOperator {
  int radius = 0;
  double lambda = 0.0;
  Matrix K;       ///< G diag(W nu)
  Matrix K_dual;  ///< G^T diag(W nu)
  Vector W, nu;
  double duality_defect = 0.0;  ///< max over probe pairs of the pairing mismatch
};

GreenOperator green_operator(const GreenKernel& green, const Vector& W, const Vector& nu);

struct NormResult {
  double value = 0.0;
  std::string method;  ///< "exact", "svd" or "interpolation-bound"
};

/// Induced norm of a real matrix on L^p(w) with measure nu, where w is the
/// space's weight phi_p. General p uses the endpoint norms of the family.
NormResult induced_norm(const Matrix& T, const WeightedSpace& sp);
inline NormResult induced_norm(const GreenOperator& g, const WeightedSpace& sp) { return induced_norm(g.K, sp); }

/// Same for complex matrices (resolvents) at p in {1, 2, inf}.
double induced_norm(const ComplexMatrix& T, const WeightedSpace& sp);

struct SchurReport {
  double row_sup = 0.0;  ///< sup_x of the w^{1/p} K integral
  double col_sup = 0.0;  ///< sup_y of the w^{-1/p'} K integral
  double bound = 0.0;    ///< max of the two
  double geometric = 0.0;  ///< row_sup^{1/p'} col_sup^{1/p}
};

/// Weighted Schur test, 1 < p < inf.
SchurReport schur_bound(const GreenKernel& green, const Vector& phi, const Vector& phi_tilde, const Vector& W,
                        const Vector& nu, Exponent p);

struct SpectralReport {
  std::vector<std::complex<double>> eigenvalues;  ///< by modulus, descending
  std::vector<std::complex<double>> dual_eigenvalues;
  std::complex<double> eta_max;
  double top_imag = 0.0;
  double gap = 0.0;  ///< |eta_1| - |eta_2|
  int geometric_multiplicity = 1;
  Vector top_vector;
  double sign_product = 0.0;  ///< min * max of the normalized top eigenvector
  double min_modulus = 0.0;
  double pde_residual = 0.0;  ///< max over eigenpairs
  double dual_mismatch = 0.0;
  std::optional<double> expected_top;  ///< 1 / (lambda0 - lambda)
  double top_defect = 0.0;
  bool degenerate = false;
};

struct SpectrumOptions {
  std::optional<double> lambda0_k;
  bool throw_on_degenerate = false;
};

/// Full dense spectrum of the Green operator with the Perron checks and
/// eigenpair residuals against L - (lambda + 1/eta) W.
SpectralReport spectrum(const GreenOperator& g, const AssembledOperator& op, const SpectrumOptions& opt = {});

struct GelfandSeries {
  Exponent p;
  std::vector<double> r;      ///< ||T^n||^{1/n}, n = 1..n_max
  std::vector<double> ratio;  ///< ||T^n|| / ||T^{n-1}||, n = 1..n_max (n=1: ||T||)
};

/// Norm-power sequences for each space (p in {1, 2, inf}).
std::vector<GelfandSeries> gelfand_radius(const GreenOperator& g, const std::vector<WeightedSpace>& spaces,
                                          int n_max);

struct IdentityCheck {
  double defect = 0.0;
  bool identical_shifts = false;
  std::string note;
};

/// G_l - G_m - (l - m) G_l (W nu) G_m, max-norm relative to max |G_l|.
IdentityCheck resolvent_defect(const GreenKernel& gl, const GreenKernel& gm, const Vector& W, const Vector& nu);
/// G_l - G_m - (l - m) G_l G_m on the operator level.
IdentityCheck pseudoresolvent_defect(const GreenOperator& a, const GreenOperator& b);

struct LeadingSpectrum {
  int radius = 0;
  std::vector<double> eta;  ///< top moduli of the Green operator, descending
  std::string method;
};

/// Top nev eigenvalues of the Green operator at shift lambda on one box.
LeadingSpectrum leading_spectrum(const AssembledOperator& op, double lambda, int nev);

struct CauchyCheck {
  std::vector<LeadingSpectrum> boxes;
  std::vector<double> ratios;  ///< per index, last increment over the one before
  double max_ratio = 0.0;
};

CauchyCheck leading_cauchy(const OperatorSpec& spec, const Exhaustion& ex, double lambda, int nev);

}  // namespace clab
