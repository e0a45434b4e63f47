#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "clab/report.hpp"
#include "clab/scenario.hpp"

namespace clab {

/// Command-line overrides applied on top of a loaded scenario.
struct RunOptions {
  std::optional<std::vector<std::string>> suites;  ///< closed over dependencies
  std::optional<int> radius;                       ///< dense box radius
  std::optional<std::vector<ShiftEntry>> lambdas;
  std::optional<std::vector<Exponent>> ps;
  std::optional<std::filesystem::path> out;
};

Scenario apply_overrides(Scenario sc, const RunOptions& opt);

/// Runs the scenario's suites in dependency order; nothing is written.
ReportBundle execute(const Scenario& sc);

/// Load, override, execute and write the bundle to the scenario's output directory.
ReportBundle run_scenario(const std::filesystem::path& path, const RunOptions& opt = {});

/// Runs every scenario file in dir (outputs under out_root/<name>), prints the
/// invariant table and returns the aggregate exit status.
int verify_all(const std::filesystem::path& dir, const std::filesystem::path& out_root, std::ostream& os,
               std::vector<ReportBundle>* bundles = nullptr);

}  // namespace clab
