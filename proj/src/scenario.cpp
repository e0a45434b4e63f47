#include "clab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "clab/errors.hpp"
#include "clab/format.hpp"

namespace clab {
namespace {

using json = nlohmann::json;
using PosMap = std::map<std::string, std::pair<long, long>>;

json toml_to_json(const toml::node& n, const std::string& path, PosMap& pos) {
  pos[path] = {static_cast<long>(n.source().begin.line), static_cast<long>(n.source().begin.column)};
  if (const auto* t = n.as_table()) {
    json o = json::object();
    for (auto&& [k, v] : *t) {
      const std::string key(k.str());
      o[key] = toml_to_json(v, path + "/" + key, pos);
    }
    return o;
  }
  if (const auto* a = n.as_array()) {
    json arr = json::array();
    std::size_t i = 0;
    for (auto&& v : *a) arr.push_back(toml_to_json(v, path + "/" + std::to_string(i++), pos));
    return arr;
  }
  if (const auto* s = n.as_string()) return s->get();
  if (const auto* i = n.as_integer()) return i->get();
  if (const auto* f = n.as_floating_point()) return f->get();
  if (const auto* b = n.as_boolean()) return b->get();
  const auto& src = n.source().begin;
  fail(ErrorKind::ParseError, ":" + std::to_string(src.line) + ":" + std::to_string(src.column) +
                                  ": date and time values are not supported");
}

std::pair<long, long> line_col(const std::string& text, std::size_t byte) {
  long line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Reader {
 public:
  Reader(const PosMap& pos, std::string origin) : pos_(pos), origin_(std::move(origin)) {}

  [[noreturn]] void error(const std::string& path, const std::string& msg, ErrorKind kind = ErrorKind::ParseError) const {
    std::string where = origin_;
    std::string p = path;
    while (true) {
      auto it = pos_.find(p);
      if (it != pos_.end()) {
        where += ":" + std::to_string(it->second.first) + ":" + std::to_string(it->second.second);
        break;
      }
      if (p.empty()) break;
      p = p.substr(0, p.rfind('/'));
    }
    fail(kind, where + ": " + msg + " (at " + (path.empty() ? "/" : path) + ")");
  }

  void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) error(path, "expected a table");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
        error(path + "/" + it.key(), "unknown key '" + it.key() + "'");
      }
    }
  }

  double number(const json& v, const std::string& path) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    error(path, "expected a number");
  }

  int integer(const json& v, const std::string& path) const {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d == static_cast<int>(d)) return static_cast<int>(d);
    }
    error(path, "expected an integer");
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) error(path, "expected a string");
    return v.get<std::string>();
  }

  const json& array(const json& v, const std::string& path) const {
    if (!v.is_array()) error(path, "expected an array");
    return v;
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    std::vector<double> out;
    std::size_t i = 0;
    for (const auto& e : array(v, path)) out.push_back(number(e, path + "/" + std::to_string(i++)));
    return out;
  }

  std::vector<int> integers(const json& v, const std::string& path) const {
    std::vector<int> out;
    std::size_t i = 0;
    for (const auto& e : array(v, path)) out.push_back(integer(e, path + "/" + std::to_string(i++)));
    return out;
  }

  Coord coord(const json& v, const std::string& path, int dim) const {
    const auto xs = integers(v, path);
    if (static_cast<int>(xs.size()) != dim) error(path, "expected " + std::to_string(dim) + " coordinates");
    Coord c{};
    for (int i = 0; i < dim; ++i) c[i] = xs[static_cast<std::size_t>(i)];
    return c;
  }

  template <class Fn>
  auto wrap(const std::string& path, Fn fn) const -> decltype(fn()) {
    try {
      return fn();
    } catch (const Error& e) {
      error(path, e.detail(), e.kind());
    }
  }

  NodeField node_field(const json& v, const std::string& path, int dim, double fallback) const {
    if (v.is_string()) return wrap(path, [&] { return NodeField::parse(v.get<std::string>()); });
    if (v.is_number()) return NodeField::constant(v.get<double>());
    allow(v, path, {"default", "values"});
    const double def = v.contains("default") ? number(v["default"], path + "/default") : fallback;
    std::vector<std::pair<Coord, double>> entries;
    if (v.contains("values")) {
      std::size_t i = 0;
      for (const auto& e : array(v["values"], path + "/values")) {
        const std::string ep = path + "/values/" + std::to_string(i++);
        allow(e, ep, {"node", "value"});
        if (!e.contains("node") || !e.contains("value")) error(ep, "entry needs 'node' and 'value'");
        entries.emplace_back(coord(e["node"], ep + "/node", dim), number(e["value"], ep + "/value"));
      }
    }
    return NodeField::table(def, std::move(entries));
  }

  EdgeField edge_field(const json& v, const std::string& path, int dim, double fallback) const {
    if (v.is_string()) return wrap(path, [&] { return EdgeField::parse(v.get<std::string>()); });
    if (v.is_number()) return EdgeField::constant(v.get<double>());
    allow(v, path, {"default", "values"});
    const double def = v.contains("default") ? number(v["default"], path + "/default") : fallback;
    std::vector<EdgeField::Entry> entries;
    if (v.contains("values")) {
      std::size_t i = 0;
      for (const auto& e : array(v["values"], path + "/values")) {
        const std::string ep = path + "/values/" + std::to_string(i++);
        allow(e, ep, {"node", "axis", "value"});
        if (!e.contains("node") || !e.contains("axis") || !e.contains("value")) {
          error(ep, "entry needs 'node', 'axis' and 'value'");
        }
        const int axis = integer(e["axis"], ep + "/axis");
        if (axis < 0 || axis >= dim) error(ep + "/axis", "axis out of range");
        entries.push_back({coord(e["node"], ep + "/node", dim), axis, number(e["value"], ep + "/value")});
      }
    }
    return EdgeField::table(def, std::move(entries));
  }

  ShiftEntry shift(const json& v, const std::string& path) const {
    if (v.is_number()) return ShiftEntry::number(v.get<double>());
    return wrap(path, [&] { return ShiftEntry::parse(string(v, path)); });
  }

 private:
  const PosMap& pos_;
  std::string origin_;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Scenario build(const json& root, const PosMap& pos, const std::string& origin) {
  const Reader rd(pos, origin);
  rd.allow(root, "", {"name", "suites", "lambda", "p", "output", "seed", "exhaustion", "operator", "classify", "norms",
                      "spectrum", "semigroup", "perturb", "expect", "tolerances"});
  Scenario sc;
  if (!root.contains("name")) rd.error("", "missing 'name'");
  sc.name = rd.string(root["name"], "/name");
  if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) rd.error("/name", "name must be a plain file name");

  if (!root.contains("exhaustion")) rd.error("", "missing [exhaustion]");
  const json& ex = root["exhaustion"];
  rd.allow(ex, "/exhaustion", {"dim", "radii", "ambient_radius", "anchor", "dense_radius"});
  if (!ex.contains("dim") || !ex.contains("radii")) rd.error("/exhaustion", "[exhaustion] needs 'dim' and 'radii'");
  sc.dim = rd.integer(ex["dim"], "/exhaustion/dim");
  if (sc.dim < 1 || sc.dim > kMaxDim) rd.error("/exhaustion/dim", "dimension must be 1, 2 or 3");
  sc.radii = rd.integers(ex["radii"], "/exhaustion/radii");
  if (sc.radii.empty()) rd.error("/exhaustion/radii", "at least one radius is needed");
  sc.ambient_radius = ex.contains("ambient_radius") ? rd.integer(ex["ambient_radius"], "/exhaustion/ambient_radius")
                                                    : sc.radii.back();
  if (ex.contains("anchor")) sc.anchor = rd.coord(ex["anchor"], "/exhaustion/anchor", sc.dim);
  sc.dense_radius = ex.contains("dense_radius") ? rd.integer(ex["dense_radius"], "/exhaustion/dense_radius")
                                                : sc.radii.front();
  if (sc.dense_radius < 1 || sc.dense_radius > sc.ambient_radius) {
    rd.error("/exhaustion/dense_radius", "dense radius must lie in [1, ambient_radius]");
  }

  const json op = root.contains("operator") ? root["operator"] : json::object();
  rd.allow(op, "/operator", {"a", "b", "b_tilde", "c", "W", "nu"});
  const auto edge = [&](const char* key, const char* def, double fallback, EdgeField& out) {
    const json v = op.contains(key) ? op[key] : json(def);
    out = rd.edge_field(v, std::string("/operator/") + key, sc.dim, fallback);
    sc.field_inputs[key] = v;
  };
  const auto node = [&](const char* key, const char* def, double fallback, NodeField& out) {
    const json v = op.contains(key) ? op[key] : json(def);
    out = rd.node_field(v, std::string("/operator/") + key, sc.dim, fallback);
    sc.field_inputs[key] = v;
  };
  edge("a", "unit", 1.0, sc.op.a);
  edge("b", "zero", 0.0, sc.op.b);
  edge("b_tilde", "zero", 0.0, sc.op.b_tilde);
  node("c", "zero", 0.0, sc.op.c);
  node("W", "unit", 1.0, sc.op.W);
  node("nu", "unit", 1.0, sc.nu);

  if (root.contains("suites")) {
    std::vector<std::string> req;
    std::size_t i = 0;
    for (const auto& s : rd.array(root["suites"], "/suites")) {
      const std::string path = "/suites/" + std::to_string(i++);
      const std::string name = rd.string(s, path);
      if (name == "all") {
        req.insert(req.end(), suite_order().begin(), suite_order().end());
      } else if (std::find(suite_order().begin(), suite_order().end(), name) != suite_order().end()) {
        req.push_back(name);
      } else {
        rd.error(path, "unknown suite '" + name + "'");
      }
    }
    if (req.empty()) rd.error("/suites", "no suites requested");
    const auto closed = suite_closure(req);
    for (const auto& s : closed) {
      if (std::find(req.begin(), req.end(), s) == req.end()) {
        rd.error("/suites", "suite '" + s + "' is required by a requested suite but not listed",
                 ErrorKind::SuiteDependencyUnmet);
      }
    }
    sc.suites = closed;
  }
  if (root.contains("lambda")) {
    sc.lambdas.clear();
    std::size_t i = 0;
    for (const auto& v : rd.array(root["lambda"], "/lambda")) sc.lambdas.push_back(rd.shift(v, "/lambda/" + std::to_string(i++)));
    if (sc.lambdas.empty()) rd.error("/lambda", "empty shift list");
  }
  if (root.contains("p")) {
    sc.ps.clear();
    std::size_t i = 0;
    for (const auto& v : rd.array(root["p"], "/p")) {
      const std::string path = "/p/" + std::to_string(i++);
      sc.ps.push_back(v.is_string() ? rd.wrap(path, [&] { return Exponent::parse(v.get<std::string>()); })
                                    : rd.wrap(path, [&] { return Exponent(rd.number(v, path)); }));
    }
    if (sc.ps.empty()) rd.error("/p", "empty exponent list");
    std::sort(sc.ps.begin(), sc.ps.end());
    sc.ps.erase(std::unique(sc.ps.begin(), sc.ps.end()), sc.ps.end());
  }
  sc.output = root.contains("output") ? std::filesystem::path(rd.string(root["output"], "/output"))
                                      : std::filesystem::path("clab-out") / sc.name;
  sc.seed = root.contains("seed") ? static_cast<std::uint64_t>(rd.integer(root["seed"], "/seed")) : fnv1a(sc.name);

  if (root.contains("classify")) {
    const json& c = root["classify"];
    rd.allow(c, "/classify", {"shift"});
    if (c.contains("shift")) sc.classify_shift = rd.number(c["shift"], "/classify/shift");
  }
  if (root.contains("norms")) {
    const json& n = root["norms"];
    rd.allow(n, "/norms", {"random_functions"});
    if (n.contains("random_functions")) sc.random_functions = rd.integer(n["random_functions"], "/norms/random_functions");
    if (sc.random_functions < 1) rd.error("/norms/random_functions", "must be positive");
  }
  if (root.contains("spectrum")) {
    const json& s = root["spectrum"];
    rd.allow(s, "/spectrum", {"gelfand_n", "cauchy_lambda", "cauchy_nev", "cauchy_diagnostic_lambdas"});
    if (s.contains("gelfand_n")) sc.gelfand_n = rd.integer(s["gelfand_n"], "/spectrum/gelfand_n");
    if (sc.gelfand_n < 8) rd.error("/spectrum/gelfand_n", "need at least 8 powers");
    if (s.contains("cauchy_lambda")) sc.cauchy_lambda = rd.number(s["cauchy_lambda"], "/spectrum/cauchy_lambda");
    if (s.contains("cauchy_nev")) sc.cauchy_nev = rd.integer(s["cauchy_nev"], "/spectrum/cauchy_nev");
    if (sc.cauchy_nev < 1) rd.error("/spectrum/cauchy_nev", "must be positive");
    if (s.contains("cauchy_diagnostic_lambdas")) {
      sc.cauchy_diagnostic_lambdas = rd.numbers(s["cauchy_diagnostic_lambdas"], "/spectrum/cauchy_diagnostic_lambdas");
    }
  }
  if (root.contains("semigroup")) {
    const json& s = root["semigroup"];
    rd.allow(s, "/semigroup", {"lambda1", "resolvent_lambdas", "t", "z"});
    if (s.contains("lambda1")) sc.lambda1 = rd.shift(s["lambda1"], "/semigroup/lambda1");
    if (s.contains("resolvent_lambdas")) sc.resolvent_lambdas = rd.numbers(s["resolvent_lambdas"], "/semigroup/resolvent_lambdas");
    if (s.contains("t")) sc.t_grid = rd.numbers(s["t"], "/semigroup/t");
    if (s.contains("z")) {
      sc.z_grid.clear();
      std::size_t i = 0;
      for (const auto& z : rd.array(s["z"], "/semigroup/z")) {
        const std::string path = "/semigroup/z/" + std::to_string(i++);
        const auto parts = rd.numbers(z, path);
        if (parts.size() != 2) rd.error(path, "complex points are [re, im] pairs");
        sc.z_grid.emplace_back(parts[0], parts[1]);
      }
    }
  }
  if (root.contains("perturb")) {
    const json& p = root["perturb"];
    rd.allow(p, "/perturb", {"V", "modes", "comparability_lambda", "epsilon"});
    if (p.contains("V")) {
      sc.V = rd.node_field(p["V"], "/perturb/V", sc.dim, 0.0);
      sc.field_inputs["V"] = p["V"];
    }
    if (p.contains("modes")) {
      sc.modes.clear();
      std::size_t i = 0;
      for (const auto& m : rd.array(p["modes"], "/perturb/modes")) {
        const std::string path = "/perturb/modes/" + std::to_string(i++);
        sc.modes.push_back(rd.wrap(path, [&] { return parse_smallness_mode(rd.string(m, path)); }));
      }
    }
    if (p.contains("comparability_lambda")) {
      sc.comparability_lambda = rd.number(p["comparability_lambda"], "/perturb/comparability_lambda");
    }
    if (p.contains("epsilon")) sc.epsilon = rd.integer(p["epsilon"], "/perturb/epsilon");
  }
  if (root.contains("expect")) {
    const json& e = root["expect"];
    rd.allow(e, "/expect", {"class", "log_slope", "log_slope_rel", "fit_r2", "threshold_ratio", "semismall_ratio"});
    if (e.contains("class")) {
      sc.expect_class = rd.string(e["class"], "/expect/class");
      static const std::set<std::string> known = {"subcritical", "critical", "supercritical", "inconclusive"};
      if (!known.count(*sc.expect_class)) rd.error("/expect/class", "unknown class '" + *sc.expect_class + "'");
    }
    if (e.contains("log_slope")) sc.expect_log_slope = rd.number(e["log_slope"], "/expect/log_slope");
    if (e.contains("log_slope_rel")) sc.expect_log_slope_rel = rd.number(e["log_slope_rel"], "/expect/log_slope_rel");
    if (e.contains("fit_r2")) sc.expect_fit_r2 = rd.number(e["fit_r2"], "/expect/fit_r2");
    if (e.contains("threshold_ratio")) sc.expect_threshold_ratio = rd.number(e["threshold_ratio"], "/expect/threshold_ratio");
    if (e.contains("semismall_ratio")) sc.expect_semismall_ratio = rd.number(e["semismall_ratio"], "/expect/semismall_ratio");
  }
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    if (!t.is_object()) rd.error("/tolerances", "expected a table");
    for (auto it = t.begin(); it != t.end(); ++it) {
      const std::string path = "/tolerances/" + it.key();
      if (!default_tolerances().count(it.key())) rd.error(path, "unknown tolerance '" + it.key() + "'");
      sc.tolerances[it.key()] = rd.number(it.value(), path);
    }
  }

  // surface lattice errors (radii order, measure sign, table domains) at load time
  rd.wrap("/exhaustion", [&] {
    const Exhaustion e = sc.exhaustion();
    sc.op.a.check_domain(e.ambient);
    sc.op.b.check_domain(e.ambient);
    sc.op.b_tilde.check_domain(e.ambient);
    sc.op.c.check_domain(e.ambient);
    sc.op.W.check_domain(e.ambient);
    sc.nu.check_domain(e.ambient);
    if (sc.V) sc.V->check_domain(e.ambient);
    return 0;
  });
  return sc;
}

}  // namespace

ShiftEntry ShiftEntry::parse(const std::string& text) {
  const std::string head = "lambda0";
  const auto read = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      fail(ErrorKind::ParseError, "cannot read shift '" + text + "'");
    }
    return v;
  };
  if (text.rfind(head, 0) == 0) {
    const std::string_view rest = std::string_view(text).substr(head.size());
    if (rest.empty()) return {true, 0.0};
    if (rest[0] == '-') return {true, -read(rest.substr(1))};
    if (rest[0] == '+') return {true, read(rest.substr(1))};
    fail(ErrorKind::ParseError, "cannot read shift '" + text + "'");
  }
  return {false, read(text)};
}

std::string ShiftEntry::text() const {
  if (!relative) return format_double(value);
  if (value == 0.0) return "lambda0";
  return value < 0 ? "lambda0-" + format_double(-value) : "lambda0+" + format_double(value);
}

std::vector<std::string> suite_dependencies(const std::string& suite) {
  if (suite == "classify") return {};
  return {"classify"};
}

std::vector<std::string> suite_closure(const std::vector<std::string>& requested) {
  std::set<std::string> want(requested.begin(), requested.end());
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& s : std::vector<std::string>(want.begin(), want.end())) {
      for (const auto& d : suite_dependencies(s)) grew = want.insert(d).second || grew;
    }
  }
  std::vector<std::string> out;
  for (const auto& s : suite_order()) {
    if (want.count(s)) out.push_back(s);
  }
  return out;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> table = {
      {"adjoint_identity", 1e-12},   {"lambda0_decrease", 1e-10},  {"green_monotone", 1e-12},
      {"doob_identity", 1e-10},      {"doob_lambda0", 1e-9},       {"duality", 1e-12},
      {"eigen_identity", 1e-10},     {"invariance", 1e-10},        {"norm_bound", 1e-8},
      {"norm_equality", 1e-8},       {"schur_cross", 1e-9},        {"phi_norm", 1e-12},
      {"chain_slack", 1e-12},        {"holder", 1e-12},            {"top_real", 1e-10},
      {"perron_gap", 1e-8},          {"pde_residual", 1e-8},       {"top_eigenvalue", 1e-8},
      {"dual_spectrum", 1e-8},       {"gelfand_agreement", 1e-6},  {"generator_identity", 1e-10},
      {"contraction", 1e-9},         {"resolvent_bound", 1e-9},    {"resolvent_identity", 1e-10},
      {"pseudoresolvent_identity", 1e-10}, {"cauchy_ratio", 0.5}, {"semigroup_positivity", 1e-12},
      {"half_ambient", 0.1},         {"comparability_stability", 0.1}, {"s_monotone", 1e-12},
  };
  return table;
}

double Scenario::tol(const std::string& key) const {
  if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
  return default_tolerances().at(key);
}

Exhaustion Scenario::exhaustion() const {
  const NodeField m = nu;
  return build_exhaustion(dim, radii, ambient_radius, [m](const Coord& x) { return m(x); }, anchor);
}

Exhaustion Scenario::dense_exhaustion() const {
  const NodeField m = nu;
  return build_exhaustion(dim, {dense_radius}, dense_radius, [m](const Coord& x) { return m(x); }, anchor);
}

nlohmann::json Scenario::resolved() const {
  json j;
  j["name"] = name;
  j["suites"] = suites;
  json lam = json::array();
  for (const auto& l : lambdas) {
    if (l.relative) {
      lam.push_back(l.text());
    } else {
      lam.push_back(l.value);
    }
  }
  j["lambda"] = lam;
  json ps_j = json::array();
  for (const auto& p : ps) {
    if (p.is_inf()) {
      ps_j.push_back("inf");
    } else {
      ps_j.push_back(p.value());
    }
  }
  j["p"] = ps_j;
  j["output"] = output.generic_string();
  j["seed"] = seed;
  std::vector<int> anc(anchor.begin(), anchor.begin() + dim);
  j["exhaustion"] = {{"dim", dim}, {"radii", radii}, {"ambient_radius", ambient_radius}, {"anchor", anc},
                     {"dense_radius", dense_radius}};
  json op_j = json::object();
  for (const char* k : {"a", "b", "b_tilde", "c", "W", "nu"}) op_j[k] = field_inputs.at(k);
  j["operator"] = op_j;
  j["classify"] = {{"shift", classify_shift}};
  j["norms"] = {{"random_functions", random_functions}};
  json spec_j = {{"gelfand_n", gelfand_n}, {"cauchy_nev", cauchy_nev}, {"cauchy_diagnostic_lambdas", cauchy_diagnostic_lambdas}};
  if (cauchy_lambda) spec_j["cauchy_lambda"] = *cauchy_lambda;
  j["spectrum"] = spec_j;
  json z = json::array();
  for (const auto& c : z_grid) z.push_back({c.real(), c.imag()});
  j["semigroup"] = {{"lambda1", lambda1.relative ? json(lambda1.text()) : json(lambda1.value)},
                    {"resolvent_lambdas", resolvent_lambdas},
                    {"t", t_grid},
                    {"z", z}};
  json pert = json::object();
  if (V) pert["V"] = field_inputs.at("V");
  json modes_j = json::array();
  for (auto m : modes) modes_j.push_back(to_string(m));
  pert["modes"] = modes_j;
  if (comparability_lambda) pert["comparability_lambda"] = *comparability_lambda;
  pert["epsilon"] = epsilon;
  j["perturb"] = pert;
  json exp_j = json::object();
  if (expect_class) exp_j["class"] = *expect_class;
  if (expect_log_slope) {
    exp_j["log_slope"] = *expect_log_slope;
    exp_j["log_slope_rel"] = expect_log_slope_rel;
  }
  exp_j["fit_r2"] = expect_fit_r2;
  if (expect_threshold_ratio) exp_j["threshold_ratio"] = *expect_threshold_ratio;
  if (expect_semismall_ratio) exp_j["semismall_ratio"] = *expect_semismall_ratio;
  j["expect"] = exp_j;
  json tol_j = json::object();
  for (const auto& [k, v] : default_tolerances()) tol_j[k] = tol(k);
  j["tolerances"] = tol_j;
  return j;
}

Scenario parse_scenario(const std::string& text, bool is_json, const std::string& origin) {
  PosMap pos;
  json root;
  if (is_json) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
      fail(ErrorKind::ParseError, origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
    }
  } else {
    try {
      const toml::table tbl = toml::parse(text, origin);
      root = toml_to_json(tbl, "", pos);
    } catch (const toml::parse_error& e) {
      const auto& b = e.source().begin;
      fail(ErrorKind::ParseError, origin + ":" + std::to_string(b.line) + ":" + std::to_string(b.column) + ": " +
                                      std::string(e.description()));
    } catch (const Error& e) {
      fail(e.kind(), origin + e.detail());
    }
  }
  if (!root.is_object()) fail(ErrorKind::ParseError, origin + ": top level must be a table");
  return build(root, pos, origin);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario sc = parse_scenario(buf.str(), path.extension() == ".json", path.string());
  sc.source = path;
  return sc;
}

std::vector<std::filesystem::path> scenario_files(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) fail(ErrorKind::EmptyDirectory, dir.string() + " is not a directory");
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".toml" || ext == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) fail(ErrorKind::EmptyDirectory, "no scenario files in " + dir.string());
  return out;
}

std::string toml_library_version() {
  return std::to_string(TOML_LIB_MAJOR) + "." + std::to_string(TOML_LIB_MINOR) + "." + std::to_string(TOML_LIB_PATCH);
}

}  // namespace clab
