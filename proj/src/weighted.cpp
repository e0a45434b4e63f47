#include "clab/weighted.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "clab/errors.hpp"

namespace clab {

Exponent::Exponent(double p) : p_(p) {
  if (std::isinf(p) && p > 0) {
    inf_ = true;
    p_ = 0.0;
    return;
  }
  if (!(p >= 1.0)) fail(ErrorKind::ExponentOutOfRange, "exponent " + std::to_string(p) + " below 1");
}

Exponent Exponent::infinity() {
  Exponent e;
  e.inf_ = true;
  e.p_ = 0.0;
  return e;
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity") return infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(ErrorKind::ExponentOutOfRange, "cannot read exponent '" + text + "'");
  }
  return Exponent(v);
}

Exponent Exponent::conjugate() const {
  if (inf_) return Exponent(1.0);
  if (p_ == 1.0) return infinity();
  return Exponent(p_ / (p_ - 1.0));
}

std::string Exponent::key() const {
  if (inf_) return "inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, p_);
  (void)ec;
  return std::string(buf, ptr);
}

WeightedSpace make_weights(const Vector& phi, const Vector& phi_tilde, const Vector& W, const Vector& nu, Exponent p,
                           bool normalize) {
  const Eigen::Index n = phi.size();
  if (phi_tilde.size() != n || W.size() != n || nu.size() != n) {
    fail(ErrorKind::BoxMismatch, "weight vectors of different lengths");
  }
  for (const auto* v : {&phi, &phi_tilde, &W, &nu}) {
    if (!(v->minCoeff() > 0.0)) fail(ErrorKind::NonPositiveInput, "weights need phi, phi_tilde, W, nu > 0");
  }
  WeightedSpace sp;
  sp.p = p;
  sp.phi = phi;
  sp.phi_tilde = phi_tilde;
  sp.W = W;
  sp.nu = nu;
  sp.Z = (phi.array() * W.array() * phi_tilde.array() * nu.array()).sum();
  if (normalize) {
    sp.phi_tilde /= sp.Z;
    sp.Z = (phi.array() * W.array() * sp.phi_tilde.array() * nu.array()).sum();
    sp.normalized = true;
  }
  const Vector prod = (phi.array() * W.array() * sp.phi_tilde.array()).matrix();
  const double ip = p.reciprocal();
  const double ipc = p.conjugate().reciprocal();
  if (p.is_inf()) {
    sp.weight = phi.cwiseInverse();
  } else {
    sp.weight = (prod.array().pow(ip) / phi.array()).matrix();
  }
  if (ipc == 0.0) {
    sp.dual_weight = sp.phi_tilde.cwiseInverse();
  } else {
    sp.dual_weight = (prod.array().pow(ipc) / sp.phi_tilde.array()).matrix();
  }
  return sp;
}

WeightedSpace dual_space(const WeightedSpace& sp) {
  WeightedSpace d = make_weights(sp.phi_tilde, sp.phi, sp.W, sp.nu, sp.p.conjugate(), false);
  d.normalized = sp.normalized;
  return d;
}

double weighted_norm(const Vector& f, const WeightedSpace& sp) {
  if (f.size() != sp.weight.size()) fail(ErrorKind::BoxMismatch, "function does not match the space");
  const Eigen::ArrayXd g = (f.array() * sp.weight.array()).abs();
  if (sp.p.is_inf()) return g.size() ? g.maxCoeff() : 0.0;
  const double p = sp.p.value();
  const double top = g.size() ? g.maxCoeff() : 0.0;
  if (top == 0.0) return 0.0;
  // scale by the max to keep large p from overflowing
  return top * std::pow(((g / top).pow(p) * sp.nu.array()).sum(), 1.0 / p);
}

double pairing(const Vector& g, const Vector& f, const Vector& W, const Vector& nu) {
  return (g.array() * W.array() * f.array() * nu.array()).sum();
}

EmbeddingReport embedding_chain(const Vector& f, const std::vector<WeightedSpace>& family, double slack) {
  for (const auto& sp : family) {
    if (!sp.normalized) fail(ErrorKind::NotNormalized, "embedding chain needs a normalized family");
  }
  std::vector<std::size_t> order(family.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return family[a].p < family[b].p; });
  EmbeddingReport rep;
  rep.worst_increment = std::numeric_limits<double>::infinity();
  for (std::size_t i : order) {
    rep.exponents.push_back(family[i].p);
    rep.norms.push_back(weighted_norm(f, family[i]));
  }
  for (std::size_t i = 1; i < rep.norms.size(); ++i) {
    rep.worst_increment = std::min(rep.worst_increment, rep.norms[i] - rep.norms[i - 1]);
  }
  if (rep.norms.size() < 2) rep.worst_increment = 0.0;
  rep.monotone = rep.worst_increment >= -slack;
  return rep;
}

}  // namespace clab
