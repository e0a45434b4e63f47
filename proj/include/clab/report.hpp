#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "clab/errors.hpp"
#include "clab/scenario.hpp"

namespace clab {

inline constexpr const char* kVersion = "0.1.0";

/// One evaluated invariant instance: value <relation> limit.
struct Check {
  std::string name;
  std::string detail;
  double value = 0.0;
  std::string relation;  ///< "<=", "<", ">=" or ">"
  double limit = 0.0;
  bool pass = false;
  bool diagnostic = false;
};

Check make_check(std::string name, std::string detail, double value, std::string relation, double limit,
                 bool diagnostic = false);

struct SuiteResult {
  std::string name;
  nlohmann::json data = nlohmann::json::object();
  std::vector<Check> checks;
  nlohmann::json skipped = nlohmann::json::array();  ///< {what, reason} entries
  double seconds = 0.0;  ///< wall time, kept out of the JSON

  nlohmann::json to_json() const;
};

/// All instances of one check name within a suite.
struct InvariantSummary {
  std::string suite, name;
  bool diagnostic = false;
  bool pass = true;
  std::size_t count = 0, failed = 0;
  double worst = 0.0;
  std::string relation;
  double limit = 0.0;
  std::string worst_detail;
};

std::vector<InvariantSummary> summarize(const std::vector<SuiteResult>& suites);

struct ReportBundle {
  Scenario scenario;
  std::vector<SuiteResult> suites;
  std::vector<InvariantSummary> invariants;
  nlohmann::json spectral_report;  ///< null unless the spectrum suite ran
  std::map<std::string, std::string> csv;  ///< file name -> contents
  bool pass = true;
  double seconds = 0.0;

  const SuiteResult* suite(const std::string& name) const;
  const InvariantSummary* invariant(const std::string& suite, const std::string& name) const;
  nlohmann::json summary() const;
};

nlohmann::json versions();

/// Indented JSON with a trailing newline; non-finite numbers become strings.
std::string dump_json(const nlohmann::json& j);
/// Finite doubles as numbers, the rest as "inf", "-inf" or "nan".
nlohmann::json num(double v);

/// Writes summary.json, one JSON file per suite, spectral_report.json, the CSV
/// traces and scenario.resolved.json into dir.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);

/// One line per invariant.
void print_table(const ReportBundle& bundle, std::ostream& os);

/// 2 for input and usage problems, 1 for everything else.
int exit_code_for(ErrorKind kind);

/// Minimal CSV builder with shortest round-trip numbers.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  Csv& row(const std::vector<std::string>& cells);
  std::string str() const { return out_; }

 private:
  std::size_t width_;
  std::string out_;
};

}  // namespace clab
