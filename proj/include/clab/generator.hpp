#pragma once

#include <complex>
#include <vector>

#include "clab/spectral.hpp"

namespace clab {

struct ResolventRow {
  std::complex<double> z;
  Exponent p;
  double norm = 0.0;
  double bound = 0.0;  ///< 1 / Re z
};

struct ContractionRow {
  double t = 0.0;
  Exponent p;
  double norm = 0.0;
  double min_entry = 0.0;  ///< of exp(tA), for the positivity diagnostic
};

struct GeneratorReport {
  double lambda1 = 0.0;
  Matrix A;  ///< -(G_{lambda1})^{-1} - lambda1
  double identity_defect = 0.0;  ///< against -W^{-1} L, relative max-norm
  std::vector<ResolventRow> resolvent;
  std::vector<ContractionRow> contraction;
};

struct GeneratorOptions {
  std::vector<std::complex<double>> z_grid{{0.5, 0.0}, {1.0, 1.0}, {2.0, -3.0}};
  std::vector<double> t_grid{0.1, 1.0, 10.0};
  /// Throw NotContractive on the first violated bound instead of reporting it.
  bool strict = false;
  double tol = 1e-9;
};

/// Generator of the Green family recovered from the operator at lambda1 and
/// its Hille-Yosida resolvent and contraction tables over the given spaces.
GeneratorReport generator_checks(const GreenOperator& g, const AssembledOperator& op, double lambda0_k,
                                 const std::vector<WeightedSpace>& spaces, const GeneratorOptions& opt = {});

}  // namespace clab
