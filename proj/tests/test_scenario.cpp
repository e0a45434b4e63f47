#include <filesystem>
#include <fstream>

#include "clab/suites.hpp"
#include "helpers.hpp"

using namespace clab;

namespace {

const char* kToml = R"(name = "tiny"
suites = ["classify", "norms"]
lambda = ["lambda0-1", -3]
p = [1, 2, "inf"]

[exhaustion]
dim = 1
radii = [2, 4, 6]
ambient_radius = 8
dense_radius = 4

[operator]
a = "const:1.5"
c = { default = 0.1, values = [{ node = [0], value = 0.4 }] }
W = "checkerboard:1,2"
nu = "radial:0.5"

[tolerances]
duality = 1e-11
)";

const char* kJson = R"({
  "name": "tiny",
  "suites": ["classify", "norms"],
  "lambda": ["lambda0-1", -3],
  "p": [1, 2, "inf"],
  "exhaustion": {"dim": 1, "radii": [2, 4, 6], "ambient_radius": 8, "dense_radius": 4},
  "operator": {
    "a": "const:1.5",
    "c": {"default": 0.1, "values": [{"node": [0], "value": 0.4}]},
    "W": "checkerboard:1,2",
    "nu": "radial:0.5"
  },
  "tolerances": {"duality": 1e-11}
}
)";

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("shift entries") {
  const ShiftEntry a = ShiftEntry::parse("lambda0-1.5");
  CHECK(a.relative);
  CHECK(a.resolve(2.0) == doctest::Approx(0.5));
  CHECK(a.text() == "lambda0-1.5");
  const ShiftEntry b = ShiftEntry::parse("-5");
  CHECK_FALSE(b.relative);
  CHECK(b.resolve(2.0) == -5.0);
  CHECK_KIND(ShiftEntry::parse("lambda1-2"), ErrorKind::ParseError);
}

TEST_CASE("suite closure") {
  CHECK(suite_closure({"perturb"}) == std::vector<std::string>{"classify", "perturb"});
  CHECK(suite_closure({"semigroup", "norms"}) == std::vector<std::string>{"classify", "norms", "semigroup"});
  CHECK(suite_dependencies("classify").empty());
}

TEST_CASE("TOML and JSON describe the same scenario") {
  const Scenario t = parse_scenario(kToml, false, "tiny.toml");
  const Scenario j = parse_scenario(kJson, true, "tiny.json");
  CHECK(t.resolved() == j.resolved());
  CHECK(t.tol("duality") == 1e-11);
  CHECK(t.tol("holder") == default_tolerances().at("holder"));
  CHECK(t.op.c(Coord{0, 0, 0}) == 0.4);
  CHECK(t.op.c(Coord{1, 0, 0}) == 0.1);
  CHECK(t.lambdas.size() == 2);
  CHECK(t.ps.size() == 3);
}

TEST_CASE("parse errors carry a position") {
  const std::string bad_toml = "name = \"x\"\nsuites = [\"classify\"\n";
  const std::string m1 = message_of([&] { parse_scenario(bad_toml, false, "bad.toml"); });
  CHECK(m1.find("bad.toml:") != std::string::npos);
  CHECK_KIND(parse_scenario(bad_toml, false, "bad.toml"), ErrorKind::ParseError);

  const std::string unknown = std::string("bogus_key = 1\n") + kToml;
  const std::string m2 = message_of([&] { parse_scenario(unknown, false, "u.toml"); });
  CHECK(m2.find("u.toml:1:") != std::string::npos);
  CHECK(m2.find("bogus_key") != std::string::npos);

  const std::string m3 = message_of([&] { parse_scenario("{\n  \"name\": \"x\",\n  oops\n}", true, "b.json"); });
  CHECK(m3.find("b.json:3:") != std::string::npos);
}

TEST_CASE("scenario validation errors") {
  std::string s = kToml;
  const auto swap = [&](const std::string& from, const std::string& to) {
    std::string t = s;
    t.replace(t.find(from), from.size(), to);
    return t;
  };
  CHECK_KIND(parse_scenario(swap("[\"classify\", \"norms\"]", "[\"norms\"]"), false, "x"), ErrorKind::SuiteDependencyUnmet);
  CHECK_KIND(parse_scenario(swap("const:1.5", "swirl:2"), false, "x"), ErrorKind::UnknownPreset);
  CHECK_KIND(parse_scenario(swap("[2, 4, 6]", "[4, 2, 6]"), false, "x"), ErrorKind::NonIncreasingRadii);
  CHECK_KIND(parse_scenario(swap("dense_radius = 4", "dense_radius = 9"), false, "x"), ErrorKind::ParseError);
  CHECK_KIND(parse_scenario(swap("node = [0]", "node = [40]"), false, "x"), ErrorKind::SpecDomainMismatch);
  CHECK_KIND(parse_scenario(swap("[1, 2, \"inf\"]", "[0.5]"), false, "x"), ErrorKind::ExponentOutOfRange);
}

TEST_CASE("empty scenario directory") {
  const auto dir = std::filesystem::temp_directory_path() / "clab-empty-dir-test";
  std::filesystem::create_directories(dir);
  CHECK_KIND(scenario_files(dir), ErrorKind::EmptyDirectory);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::ParseError) == 2);
  CHECK(exit_code_for(ErrorKind::EmptyDirectory) == 2);
  CHECK(exit_code_for(ErrorKind::SuiteDependencyUnmet) == 2);
  CHECK(exit_code_for(ErrorKind::SolverNoConvergence) == 1);
  CHECK(exit_code_for(ErrorKind::NotContractive) == 1);
}

TEST_CASE("checks and summaries") {
  CHECK(make_check("x", "", 1.0, "<=", 1.0).pass);
  CHECK_FALSE(make_check("x", "", 1.0, "<", 1.0).pass);
  CHECK_FALSE(make_check("x", "", std::nan(""), "<=", 1.0).pass);
  SuiteResult s;
  s.name = "norms";
  s.checks = {make_check("a", "one", 0.1, "<=", 1.0), make_check("a", "two", 2.0, "<=", 1.0),
              make_check("b", "", 5.0, "<=", 1.0, true)};
  const auto inv = summarize({s});
  REQUIRE(inv.size() == 2);
  CHECK_FALSE(inv[0].pass);
  CHECK(inv[0].failed == 1);
  CHECK(inv[0].worst == 2.0);
  CHECK(inv[0].worst_detail == "two");
  CHECK(inv[1].diagnostic);
}

TEST_CASE("runs are deterministic") {
  Scenario sc = parse_scenario(kToml, false, "tiny.toml");
  sc.suites = suite_order();
  sc.V = NodeField::parse("box:2,1,0");
  const ReportBundle a = execute(sc);
  const ReportBundle b = execute(sc);
  CHECK(a.pass);
  CHECK(dump_json(a.summary()) == dump_json(b.summary()));
  CHECK(dump_json(a.spectral_report) == dump_json(b.spectral_report));
  CHECK(a.csv == b.csv);
  for (std::size_t i = 0; i < a.suites.size(); ++i) CHECK(dump_json(a.suites[i].to_json()) == dump_json(b.suites[i].to_json()));
  CHECK(a.csv.count("green_trace.csv") == 1);
  CHECK(a.csv.count("gelfand.csv") == 1);
  CHECK(a.csv.count("perturbation_profile.csv") == 1);
  CHECK(a.csv.at("gelfand.csv").rfind("n,p,r_n\n", 0) == 0);
  CHECK(a.csv.at("perturbation_profile.csv").rfind("mode,k,S_k,verdict\n", 0) == 0);
  CHECK(a.csv.at("green_trace.csv").rfind("k,lambda,G_x0y0,lambda0_k,min_entry\n", 0) == 0);
  const auto& keys = a.suite("norms")->data;
  CHECK_FALSE(keys.empty());
}

TEST_CASE("a tightened tolerance fails the named invariant") {
  Scenario sc = parse_scenario(kToml, false, "tiny.toml");
  sc.tolerances["duality"] = -1.0;
  const ReportBundle r = execute(sc);
  CHECK_FALSE(r.pass);
  const InvariantSummary* inv = r.invariant("norms", "green_duality");
  REQUIRE(inv != nullptr);
  CHECK_FALSE(inv->pass);
}

}  // TEST_SUITE
