#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "clab/lattice.hpp"

namespace clab {

/// Scalar coefficient on lattice nodes (c, W, nu, perturbation potentials).
///
/// Presets:
///   unit | zero | const:v
///   radial:alpha           (1 + |x|_inf)^alpha
///   scaled_radial:s,alpha  s * (1 + |x|_inf)^alpha
///   checkerboard:lo,hi     lo on even coordinate sum, hi on odd
///   box:R,in,out           in for |x|_inf <= R, out elsewhere
/// or an explicit table with a fallback value.
class NodeField {
 public:
  NodeField() : params_{1.0}, description_("unit") {}

  static NodeField parse(std::string_view preset);
  static NodeField constant(double v);
  static NodeField table(double fallback, std::vector<std::pair<Coord, double>> entries);

  double operator()(const Coord& x) const;
  Eigen::VectorXd on(const NodeSet& nodes) const;

  /// Table entries must be ambient nodes; throws SpecDomainMismatch.
  void check_domain(const NodeSet& ambient) const;

  const std::string& description() const noexcept { return description_; }

 private:
  enum class Kind { constant, radial, checkerboard, box, table };
  Kind kind_ = Kind::constant;
  std::vector<double> params_;
  std::map<Coord, double> entries_;
  std::string description_;
};

/// Coefficient on the lattice edge from x to x + e_axis.
///
/// Presets:
///   unit | zero | const:v | const:v1,v2[,v3]   (per-axis constants)
///   checkerboard:lo,hi    keyed on the parity of the edge's tail node
///   radial:alpha          (1 + max(|x|_inf, |x+e|_inf))^alpha
/// or an explicit table of (node, axis, value) with a fallback value.
class EdgeField {
 public:
  EdgeField() : params_{0.0}, description_("zero") {}

  static EdgeField parse(std::string_view preset);
  static EdgeField constant(double v);
  struct Entry {
    Coord tail;
    int axis;
    double value;
  };
  static EdgeField table(double fallback, std::vector<Entry> entries);

  double operator()(const Coord& tail, int axis) const;
  void check_domain(const NodeSet& ambient) const;

  bool identically_zero() const;
  const std::string& description() const noexcept { return description_; }

 private:
  enum class Kind { per_axis, checkerboard, radial, table };
  Kind kind_ = Kind::per_axis;
  std::vector<double> params_;
  std::map<std::pair<Coord, int>, double> entries_;
  std::string description_;
};

}  // namespace clab
