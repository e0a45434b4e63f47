#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clab/linear_solve.hpp"
#include "clab/operator.hpp"

namespace clab {

/// Dirichlet Green function of L - lambda W on one box.
/// Convention: u(x) = sum_y G(x,y) g(y) nu(y) solves (L - lambda W) u = g,
/// so G = (L - lambda W)^{-1} D_nu^{-1}.
struct GreenKernel {
  int radius = 0;
  double lambda = 0.0;
  Matrix G;
  double min_entry = 0.0;
};

/// Dense Green kernel. lambda0_k is the box principal eigenvalue when the
/// caller already has it; otherwise it is computed here.
GreenKernel dirichlet_green(const AssembledOperator& op, double lambda, std::optional<double> lambda0_k = {});

/// G(., y) and G(x, .) through one sparse solve each.
Vector green_column(const ShiftedSolver& solver, const AssembledOperator& op, Eigen::Index y);
Vector green_row(const ShiftedSolver& solver, const AssembledOperator& op, Eigen::Index x);

struct PrincipalPair {
  double lambda0 = 0.0;
  Vector phi;        ///< L phi = lambda0 W phi, phi(x0) = 1
  Vector phi_tilde;  ///< L* phi_tilde = lambda0 W phi_tilde
  double lower = 0.0;  ///< Collatz-Wielandt bracket from phi
  double upper = 0.0;
  double residual = 0.0;  ///< max of the right and left relative residuals
  int iterations = 0;
  std::string method;
};

struct PrincipalOptions {
  enum class Method { automatic, dense, iterative };
  Method method = Method::automatic;
  /// Rescale phi_tilde so that sum phi W phi_tilde nu = 1.
  bool normalize_pairing = false;
  double tol = 1e-11;
  int max_iter = 400;
};

PrincipalPair principal_pair(const AssembledOperator& op, const PrincipalOptions& opt = {});

/// min and max of (L u)/(W u) for u > 0; brackets the principal eigenvalue.
std::pair<double, double> collatz_wielandt(const AssembledOperator& op, const Vector& u);

struct Lambda0Sequence {
  std::vector<int> radii;
  std::vector<double> lambda0;
  std::vector<PrincipalPair> pairs;
  double extrapolated = 0.0;
  double error_band = 0.0;
  bool strictly_decreasing = true;
  double worst_increase = 0.0;  ///< max of lambda0(k_{i+1}) - lambda0(k_i)
};

/// Principal eigenvalues along the exhaustion with a Richardson limit in
/// h = 1/(k+1) (second order) and the last difference as error band.
Lambda0Sequence lambda0_limit(const OperatorSpec& spec, const Exhaustion& ex);

enum class Criticality { subcritical, critical, supercritical, inconclusive };
std::string to_string(Criticality c);

struct GrowthFit {
  std::string model;  ///< "log" or "linear"
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct ProbePair {
  Coord x{}, y{};
  std::vector<double> values;  ///< G(x,y) per radius
  double worst_increment = 0.0;  ///< min over consecutive increments
};

struct GroundStateReport {
  Lambda0Sequence sequence;
  double shift = 0.0;
  double tol_pos = 0.0;
  Criticality verdict = Criticality::inconclusive;
  std::string reason;
  Coord x0{}, y0{};
  std::vector<double> green_probe;  ///< G(x0,y0) at the shift, NaN if undefined
  std::vector<double> min_entry;    ///< min of G(., y0) per box
  std::vector<double> diff_ratios;
  GrowthFit log_fit, linear_fit;
  std::optional<GrowthFit> chosen_fit;
  std::vector<ProbePair> probes;
  bool green_positive = true;
};

struct ClassifyOptions {
  double shift = 0.0;
  bool adjoint = false;  ///< classify L* (b and b_tilde swapped)
};

GroundStateReport classify(const OperatorSpec& spec, const Exhaustion& ex, const ClassifyOptions& opt = {});

/// Least-squares line through (t_i, g_i) with its R^2.
GrowthFit fit_line(const std::vector<double>& t, const std::vector<double>& g, std::string model);

struct InvarianceDefect {
  Vector right, left;
  double sup_right = 0.0, sup_left = 0.0;
  double min_right = 0.0, min_left = 0.0;
};

/// Pointwise defects of
///   v / (mu - lambda) >= G W v   and   vt / (mu - lambda) >= G^T W vt,
/// both against the nu-weighted sum.
InvarianceDefect invariance_defect(const Vector& v, const Vector& vt, double lambda, double mu,
                                   const GreenKernel& green, const Vector& W, const Vector& nu);

/// Coefficients of the adjoint: b and b_tilde swapped.
OperatorSpec adjoint_spec(const OperatorSpec& spec);

}  // namespace clab
