#pragma once

#include <string>
#include <vector>

#include "clab/operator.hpp"

namespace clab {

/// Lebesgue exponent in [1, inf]; infinity is symbolic.
class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(double p);
  static Exponent infinity();
  /// "inf", "1.5", ...
  static Exponent parse(const std::string& text);

  bool is_inf() const noexcept { return inf_; }
  double value() const noexcept { return p_; }
  Exponent conjugate() const;
  /// 1/p, zero for infinity.
  double reciprocal() const noexcept { return inf_ ? 0.0 : 1.0 / p_; }
  /// Table key: shortest decimal or "inf".
  std::string key() const;

  friend bool operator==(const Exponent& a, const Exponent& b) { return a.inf_ == b.inf_ && (a.inf_ || a.p_ == b.p_); }
  friend bool operator<(const Exponent& a, const Exponent& b) { return !a.inf_ && (b.inf_ || a.p_ < b.p_); }

 private:
  double p_ = 1.0;
  bool inf_ = false;
};

/// L^p(phi_p) with phi_p = phi^{-1} (phi W phi_tilde)^{1/p} and the dual
/// weight phi_tilde_{p'} for the pairing sum g W f nu.
struct WeightedSpace {
  Exponent p;
  Vector phi, phi_tilde, W, nu;
  Vector weight;       ///< phi_p
  Vector dual_weight;  ///< phi_tilde_{p'}
  double Z = 0.0;      ///< sum phi W phi_tilde nu, after any rescaling
  bool normalized = false;
};

WeightedSpace make_weights(const Vector& phi, const Vector& phi_tilde, const Vector& W, const Vector& nu, Exponent p,
                           bool normalize);

/// L^{p'}(phi_tilde_{p'}): roles of phi and phi_tilde exchanged.
WeightedSpace dual_space(const WeightedSpace& sp);

/// ||f phi_p||_{L^p(nu)}.
double weighted_norm(const Vector& f, const WeightedSpace& sp);

/// sum g W f nu (bilinear).
double pairing(const Vector& g, const Vector& f, const Vector& W, const Vector& nu);

struct EmbeddingReport {
  std::vector<Exponent> exponents;  ///< sorted ascending
  std::vector<double> norms;
  double worst_increment = 0.0;  ///< min over consecutive norm increments
  bool monotone = true;
};

/// Norm chain p -> ||f||_{p, phi_p} over a normalized family.
EmbeddingReport embedding_chain(const Vector& f, const std::vector<WeightedSpace>& family, double slack = 1e-12);

}  // namespace clab
