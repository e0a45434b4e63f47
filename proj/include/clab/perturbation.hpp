#pragma once

#include <optional>
#include <string>
#include <vector>

#include "clab/green.hpp"

namespace clab {

enum class SmallnessMode { small, semismall, semismall_adjoint };
std::string to_string(SmallnessMode m);
SmallnessMode parse_smallness_mode(const std::string& s);

struct PerturbationProfile {
  SmallnessMode mode = SmallnessMode::semismall;
  std::vector<int> radii;
  std::vector<double> S;
  int ambient_radius = 0;
  std::string verdict;  ///< "decaying", "vanishing" or "not_decaying"
  double last_ratio = 0.0;  ///< S(k_M) / S(k_1)
  bool exact = true;  ///< false when the small-mode sup ran over probe nodes only
  double certified_lambda0_lower = 0.0;

  // same functional with the ambient box halved (radii whose tails stay non-empty)
  int half_ambient_radius = 0;
  std::vector<double> S_half;
  double half_max_rel_diff = 0.0;
  bool half_flag = false;  ///< any relative difference above 10%
};

struct SmallnessOptions {
  /// Ambient size up to which the small-mode sup runs over all tail pairs.
  Eigen::Index dense_small_limit = 4000;
  bool half_ambient = true;
};

/// Tail functional
///   S(k) = sup sum_{z in tail} G(x,z) |V(z)| G(z,y) nu(z) / G(x,y)
/// with x, y over the tail (small) or x = x0 and y over the tail
/// (semismall), on the ambient box's Green function at shift 0.
PerturbationProfile smallness_profile(const OperatorSpec& spec, const Exhaustion& ex, const NodeField& V,
                                      SmallnessMode mode, const SmallnessOptions& opt = {});

struct ComparabilityReport {
  double C = 0.0;
  Coord reference{};
  std::size_t count = 0;  ///< nodes outside the exclusion ball
};

/// Empirical constant in C^{-1} g <= phi <= C g after matching g to phi at
/// the reference node, over nodes with |x - x0|_inf > eps.
ComparabilityReport comparability_check(const Vector& g, const Vector& phi, const NodeSet& nodes, const Coord& x0,
                                        const Coord& reference, int eps = 1);

struct ComparabilityProfile {
  double lambda = 0.0;
  std::vector<int> radii;
  std::vector<double> C;
  double last_rel_change = 0.0;
  Coord reference{};
};

/// Per box: G_lambda(., x0) against the box principal eigenfunction.
ComparabilityProfile comparability_profile(const OperatorSpec& spec, const Exhaustion& ex, double lambda,
                                           int eps = 1);

}  // namespace clab
