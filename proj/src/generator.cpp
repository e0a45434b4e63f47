#include "clab/generator.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "clab/errors.hpp"

namespace clab {

GeneratorReport generator_checks(const GreenOperator& g, const AssembledOperator& op, double lambda0_k,
                                 const std::vector<WeightedSpace>& spaces, const GeneratorOptions& opt) {
  if (!(g.lambda < lambda0_k)) {
    fail(ErrorKind::ShiftOutsideLambdaSet, "lambda1 = " + std::to_string(g.lambda) + " is not below " +
                                               std::to_string(lambda0_k));
  }
  const Eigen::Index n = g.K.rows();
  if (op.size() != n) fail(ErrorKind::BoxMismatch, "operator and Green operator differ in size");
  GeneratorReport rep;
  rep.lambda1 = g.lambda;
  rep.A = -g.K.partialPivLu().inverse();
  rep.A.diagonal().array() -= g.lambda;
  const Matrix expected = -(op.W.cwiseInverse().asDiagonal() * Matrix(op.L));
  rep.identity_defect = (rep.A - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();

  const ComplexMatrix Ac = rep.A.cast<std::complex<double>>();
  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  for (const auto& z : opt.z_grid) {
    if (!(z.real() > 0.0)) continue;
    const ComplexMatrix R = (z * I - Ac).partialPivLu().inverse();
    for (const auto& sp : spaces) {
      ResolventRow row{z, sp.p, induced_norm(R, sp), 1.0 / z.real()};
      if (opt.strict && lambda0_k >= 0.0 && row.norm > row.bound + opt.tol) {
        fail(ErrorKind::NotContractive, "resolvent norm " + std::to_string(row.norm) + " at p=" + sp.p.key());
      }
      rep.resolvent.push_back(row);
    }
  }
  for (double t : opt.t_grid) {
    const Matrix E = (t * rep.A).exp();
    for (const auto& sp : spaces) {
      ContractionRow row{t, sp.p, induced_norm(E, sp).value, E.minCoeff()};
      if (opt.strict && lambda0_k >= 0.0 && row.norm > 1.0 + opt.tol) {
        fail(ErrorKind::NotContractive, "semigroup norm " + std::to_string(row.norm) + " at p=" + sp.p.key() +
                                            ", t=" + std::to_string(t));
      }
      rep.contraction.push_back(row);
    }
  }
  return rep;
}

}  // namespace clab
