#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace clab {

constexpr int kMaxDim = 3;

/// Lattice point of Z^d. Components past the dimension stay zero, so the
/// array's lexicographic order is the node order used everywhere.
using Coord = std::array<int, kMaxDim>;

int sup_norm(const Coord& x) noexcept;
std::string to_string(const Coord& x, int dim);

/// Ordered set of lattice nodes with a stable row index per node.
class NodeSet {
 public:
  NodeSet() = default;
  NodeSet(int dim, std::vector<Coord> nodes);

  /// Sup-norm ball {|x|_inf <= radius}.
  static NodeSet box(int dim, int radius);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const Coord& operator[](std::size_t i) const { return nodes_[i]; }
  std::optional<std::size_t> index_of(const Coord& x) const;
  bool contains(const Coord& x) const { return index_of(x).has_value(); }

  auto begin() const noexcept { return nodes_.begin(); }
  auto end() const noexcept { return nodes_.end(); }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  int dim_ = 1;
  std::vector<Coord> nodes_;
};

using MeasureFn = std::function<double(const Coord&)>;

/// Nested sup-norm boxes inside a finite ambient box standing in for the
/// whole lattice. The measure is materialized on the ambient box.
struct Exhaustion {
  int dim = 1;
  std::vector<int> radii;
  int ambient_radius = 0;
  Coord anchor{};
  NodeSet ambient;
  Eigen::VectorXd measure;

  NodeSet box(int k) const;
  /// Measure restricted to the given nodes (all of which must be ambient nodes).
  Eigen::VectorXd measure_on(const NodeSet& nodes) const;
  /// Position of k in the radius list; throws UnknownRadius.
  std::size_t radius_index(int k) const;
};

Exhaustion build_exhaustion(int dim, std::vector<int> radii, int ambient_radius,
                            const MeasureFn& measure, Coord anchor = {});

enum class TailMode { open_tail };

/// Ambient nodes strictly outside the box of radius k.
NodeSet tail_region(const Exhaustion& ex, int k, TailMode mode = TailMode::open_tail);

}  // namespace clab
