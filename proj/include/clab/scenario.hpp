#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clab/operator.hpp"
#include "clab/perturbation.hpp"
#include "clab/weighted.hpp"

namespace clab {

/// A shift given either as a number or relative to the box principal
/// eigenvalue ("lambda0-1", "lambda0+0.5", "lambda0").
struct ShiftEntry {
  bool relative = false;
  double value = 0.0;  ///< the number, or the offset added to lambda0

  static ShiftEntry parse(const std::string& text);
  static ShiftEntry number(double v) { return {false, v}; }
  double resolve(double lambda0_k) const { return relative ? lambda0_k + value : value; }
  std::string text() const;
};

inline const std::vector<std::string>& suite_order() {
  static const std::vector<std::string> order = {"classify", "norms", "spectrum", "semigroup", "perturb"};
  return order;
}

/// Suites that must run before the given one.
std::vector<std::string> suite_dependencies(const std::string& suite);

/// Requested suites plus everything they depend on, in run order.
std::vector<std::string> suite_closure(const std::vector<std::string>& requested);

struct Scenario {
  std::string name;
  std::filesystem::path source;

  // exhaustion
  int dim = 1;
  std::vector<int> radii;
  int ambient_radius = 0;
  Coord anchor{};
  int dense_radius = 0;  ///< box for the dense Green-operator suites

  OperatorSpec op;
  NodeField nu;
  /// Coefficient inputs as written (preset string or table), for the resolved copy.
  std::map<std::string, nlohmann::json> field_inputs;

  std::vector<ShiftEntry> lambdas = {ShiftEntry::parse("lambda0-1"), ShiftEntry::parse("lambda0-2"),
                                     ShiftEntry::number(-5.0)};
  std::vector<Exponent> ps = {Exponent(1.0), Exponent(1.5), Exponent(2.0), Exponent(3.0), Exponent::infinity()};
  std::vector<std::string> suites = suite_order();
  std::filesystem::path output;
  std::map<std::string, double> tolerances;

  // classify
  double classify_shift = 0.0;

  // norms
  int random_functions = 100;
  std::uint64_t seed = 0;  ///< derived from the name unless given

  // spectrum
  int gelfand_n = 64;
  std::optional<double> cauchy_lambda;
  int cauchy_nev = 5;
  std::vector<double> cauchy_diagnostic_lambdas;

  // semigroup
  ShiftEntry lambda1 = ShiftEntry::parse("lambda0-1");
  std::vector<double> resolvent_lambdas = {-0.5, -1.0, -2.0, -4.0};
  std::vector<double> t_grid = {0.1, 1.0, 10.0};
  std::vector<std::complex<double>> z_grid = {{0.5, 0.0}, {1.0, 1.0}, {2.0, -3.0}};

  // perturb
  std::optional<NodeField> V;
  std::string V_text;
  std::vector<SmallnessMode> modes = {SmallnessMode::semismall};
  std::optional<double> comparability_lambda;
  int epsilon = 1;

  // expectations
  std::optional<std::string> expect_class;
  std::optional<double> expect_log_slope;
  double expect_log_slope_rel = 0.15;
  double expect_fit_r2 = 0.99;
  std::optional<double> expect_threshold_ratio;
  std::optional<double> expect_semismall_ratio;

  /// Tolerance by key, after overrides.
  double tol(const std::string& key) const;

  Exhaustion exhaustion() const;
  Exhaustion dense_exhaustion() const;

  /// Every field with defaults filled in, in a fixed key order.
  nlohmann::json resolved() const;
};

/// Default tolerance table.
const std::map<std::string, double>& default_tolerances();

/// Parses TOML or JSON (chosen by extension, ".json" or anything else as TOML).
/// Errors are ParseError carrying "file:line:column" when the position is known.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, bool json, const std::string& origin);

/// Scenario files (*.toml, *.json) directly in a directory, sorted by name.
std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir);

std::string toml_library_version();

}  // namespace clab
