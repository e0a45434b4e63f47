#include "clab/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "clab/errors.hpp"

namespace clab {

int sup_norm(const Coord& x) noexcept {
  int m = 0;
  for (int c : x) m = std::max(m, std::abs(c));
  return m;
}

std::string to_string(const Coord& x, int dim) {
  std::string out = "(";
  for (int i = 0; i < dim; ++i) {
    if (i) out += ",";
    out += std::to_string(x[i]);
  }
  return out + ")";
}

NodeSet::NodeSet(int dim, std::vector<Coord> nodes) : dim_(dim), nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
}

NodeSet NodeSet::box(int dim, int radius) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::SpecDomainMismatch, "dimension must be 1, 2 or 3");
  std::vector<Coord> nodes;
  const int side = 2 * radius + 1;
  std::size_t count = 1;
  for (int i = 0; i < dim; ++i) count *= static_cast<std::size_t>(side);
  nodes.reserve(count);
  Coord x{};
  for (int i = 0; i < dim; ++i) x[i] = -radius;
  // odometer in lexicographic order, last axis fastest
  while (true) {
    nodes.push_back(x);
    int axis = dim - 1;
    while (axis >= 0 && x[axis] == radius) {
      x[axis] = -radius;
      --axis;
    }
    if (axis < 0) break;
    ++x[axis];
  }
  NodeSet out;
  out.dim_ = dim;
  out.nodes_ = std::move(nodes);
  return out;
}

std::optional<std::size_t> NodeSet::index_of(const Coord& x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  if (it == nodes_.end() || *it != x) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

NodeSet Exhaustion::box(int k) const {
  radius_index(k);
  return NodeSet::box(dim, k);
}

Eigen::VectorXd Exhaustion::measure_on(const NodeSet& nodes) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto idx = ambient.index_of(nodes[i]);
    if (!idx) fail(ErrorKind::SpecDomainMismatch, "node " + to_string(nodes[i], dim) + " outside ambient box");
    out[static_cast<Eigen::Index>(i)] = measure[static_cast<Eigen::Index>(*idx)];
  }
  return out;
}

std::size_t Exhaustion::radius_index(int k) const {
  auto it = std::find(radii.begin(), radii.end(), k);
  if (it == radii.end()) fail(ErrorKind::UnknownRadius, "radius " + std::to_string(k) + " is not in the exhaustion");
  return static_cast<std::size_t>(it - radii.begin());
}

Exhaustion build_exhaustion(int dim, std::vector<int> radii, int ambient_radius,
                            const MeasureFn& measure, Coord anchor) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::SpecDomainMismatch, "dimension must be 1, 2 or 3");
  if (radii.empty()) fail(ErrorKind::NonIncreasingRadii, "empty radius list");
  if (radii.front() < 0) fail(ErrorKind::NonIncreasingRadii, "radii must be non-negative");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (radii[i] <= radii[i - 1]) {
      fail(ErrorKind::NonIncreasingRadii, "radius " + std::to_string(radii[i]) + " does not exceed " +
                                              std::to_string(radii[i - 1]));
    }
  }
  if (ambient_radius < radii.back()) {
    fail(ErrorKind::NonIncreasingRadii, "ambient radius " + std::to_string(ambient_radius) +
                                            " is smaller than the largest box radius");
  }
  for (int i = dim; i < kMaxDim; ++i) anchor[i] = 0;
  if (sup_norm(anchor) > radii.front()) {
    fail(ErrorKind::SpecDomainMismatch, "anchor " + to_string(anchor, dim) + " lies outside the smallest box");
  }

  Exhaustion ex;
  ex.dim = dim;
  ex.radii = std::move(radii);
  ex.ambient_radius = ambient_radius;
  ex.anchor = anchor;
  ex.ambient = NodeSet::box(dim, ambient_radius);
  ex.measure.resize(static_cast<Eigen::Index>(ex.ambient.size()));
  for (std::size_t i = 0; i < ex.ambient.size(); ++i) {
    const double v = measure(ex.ambient[i]);
    if (!(v > 0.0)) {
      fail(ErrorKind::NonPositiveMeasure, "measure " + std::to_string(v) + " at node " + to_string(ex.ambient[i], dim));
    }
    ex.measure[static_cast<Eigen::Index>(i)] = v;
  }
  return ex;
}

NodeSet tail_region(const Exhaustion& ex, int k, TailMode) {
  ex.radius_index(k);
  std::vector<Coord> nodes;
  for (const auto& x : ex.ambient) {
    if (sup_norm(x) > k) nodes.push_back(x);
  }
  return NodeSet(ex.dim, std::move(nodes));
}

}  // namespace clab
