#include "clab/report.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "clab/format.hpp"

namespace clab {

using json = nlohmann::json;

Check make_check(std::string name, std::string detail, double value, std::string relation, double limit,
                 bool diagnostic) {
  Check c{std::move(name), std::move(detail), value, std::move(relation), limit, false, diagnostic};
  if (c.relation == "<=") {
    c.pass = value <= limit;
  } else if (c.relation == "<") {
    c.pass = value < limit;
  } else if (c.relation == ">=") {
    c.pass = value >= limit;
  } else if (c.relation == ">") {
    c.pass = value > limit;
  } else {
    fail(ErrorKind::ParseError, "unknown relation '" + c.relation + "'");
  }
  return c;
}

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json SuiteResult::to_json() const {
  json checks_j = json::array();
  for (const auto& c : checks) {
    checks_j.push_back({{"name", c.name},
                        {"detail", c.detail},
                        {"value", num(c.value)},
                        {"relation", c.relation},
                        {"limit", num(c.limit)},
                        {"pass", c.pass},
                        {"diagnostic", c.diagnostic}});
  }
  return {{"suite", name}, {"checks", checks_j}, {"skipped", skipped}, {"data", data}};
}

std::vector<InvariantSummary> summarize(const std::vector<SuiteResult>& suites) {
  std::vector<InvariantSummary> out;
  for (const auto& s : suites) {
    for (const auto& c : s.checks) {
      auto it = std::find_if(out.begin(), out.end(), [&](const InvariantSummary& v) {
        return v.suite == s.name && v.name == c.name && v.diagnostic == c.diagnostic;
      });
      const bool upper = c.relation[0] == '<';
      if (it == out.end()) {
        out.push_back({s.name, c.name, c.diagnostic, true, 0, 0, c.value, c.relation, c.limit, c.detail});
        it = out.end() - 1;
      } else {
        const bool worse = upper ? (c.value > it->worst || std::isnan(c.value)) : (c.value < it->worst || std::isnan(c.value));
        if (worse) {
          it->worst = c.value;
          it->limit = c.limit;
          it->worst_detail = c.detail;
        }
      }
      ++it->count;
      if (!c.pass) {
        ++it->failed;
        it->pass = false;
      }
    }
  }
  return out;
}

const SuiteResult* ReportBundle::suite(const std::string& name) const {
  for (const auto& s : suites) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const InvariantSummary* ReportBundle::invariant(const std::string& s, const std::string& name) const {
  for (const auto& v : invariants) {
    if (v.suite == s && v.name == name) return &v;
  }
  return nullptr;
}

json versions() {
  return {{"clab", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"tomlplusplus", toml_library_version()}};
}

json ReportBundle::summary() const {
  json inv = json::array();
  for (const auto& v : invariants) {
    inv.push_back({{"suite", v.suite},
                   {"name", v.name},
                   {"diagnostic", v.diagnostic},
                   {"pass", v.pass},
                   {"count", v.count},
                   {"failed", v.failed},
                   {"worst", num(v.worst)},
                   {"relation", v.relation},
                   {"limit", num(v.limit)},
                   {"worst_detail", v.worst_detail}});
  }
  json suites_j = json::array();
  for (const auto& s : suites) suites_j.push_back(s.name);
  json skipped = json::array();
  for (const auto& s : suites) {
    for (const auto& e : s.skipped) skipped.push_back({{"suite", s.name}, {"what", e["what"]}, {"reason", e["reason"]}});
  }
  return {{"scenario", scenario.name}, {"pass", pass},         {"suites", suites_j},
          {"invariants", inv},         {"skipped", skipped}, {"versions", versions()}};
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

void write_bundle(const ReportBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "summary.json", dump_json(b.summary()));
  write_file(dir / "scenario.resolved.json", dump_json(b.scenario.resolved()));
  for (const auto& s : b.suites) write_file(dir / (s.name + ".json"), dump_json(s.to_json()));
  if (!b.spectral_report.is_null()) write_file(dir / "spectral_report.json", dump_json(b.spectral_report));
  for (const auto& [name, text] : b.csv) write_file(dir / name, text);
}

void print_table(const ReportBundle& b, std::ostream& os) {
  for (const auto& v : b.invariants) {
    const char* status = v.diagnostic ? (v.pass ? "diag-ok" : "diag") : (v.pass ? "PASS" : "FAIL");
    os << std::left << std::setw(8) << status << ' ' << std::setw(18) << b.scenario.name << ' '
       << std::setw(34) << (v.suite + "." + v.name) << " worst " << format_double(v.worst) << ' ' << v.relation << ' '
       << format_double(v.limit) << "  (" << v.count << " checks";
    if (v.failed > 0) os << ", " << v.failed << " failed, worst at " << v.worst_detail;
    os << ")\n";
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::UnknownPreset:
    case ErrorKind::SuiteDependencyUnmet:
    case ErrorKind::EmptyDirectory:
    case ErrorKind::NonIncreasingRadii:
    case ErrorKind::NonPositiveMeasure:
    case ErrorKind::UnknownRadius:
    case ErrorKind::NonPositiveConductance:
    case ErrorKind::NonPositiveWeight:
    case ErrorKind::DriftTooStrong:
    case ErrorKind::SpecDomainMismatch:
    case ErrorKind::ExponentOutOfRange:
    case ErrorKind::InsufficientRadii:
    case ErrorKind::BoxTooLarge:
    case ErrorKind::TailEmpty:
    case ErrorKind::ExclusionTooLarge:
      return 2;
    default:
      return 1;
  }
}

Csv::Csv(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ += (i ? "," : "") + header[i];
  out_ += "\n";
}

Csv& Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) fail(ErrorKind::BoxMismatch, "CSV row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ += (i ? "," : "") + cells[i];
  out_ += "\n";
  return *this;
}

}  // namespace clab
