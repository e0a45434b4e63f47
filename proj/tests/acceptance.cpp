// Acceptance run: every bundled scenario through the full suite list, then
// one verdict line per criterion. Values are compared against the stated
// thresholds directly, not against the scenario tolerances.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "clab/format.hpp"
#include "clab/spectral.hpp"
#include "clab/suites.hpp"

using namespace clab;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream note;
  void fail(const std::string& why) {
    pass = false;
    note << " [" << why << "]";
  }
};

using Bundles = std::map<std::string, ReportBundle>;

// Worst value of an invariant must satisfy `relation threshold`.
void require(Verdict& v, const ReportBundle& b, const std::string& suite, const std::string& name,
             const std::string& relation, double threshold, std::size_t min_count = 1) {
  const InvariantSummary* inv = b.invariant(suite, name);
  const std::string tag = b.scenario.name + " " + suite + "." + name;
  if (inv == nullptr || inv->count < min_count) {
    v.fail(tag + " missing or too few checks");
    return;
  }
  const double w = inv->worst;
  const bool ok = relation == "<=" ? w <= threshold
                  : relation == "<" ? w < threshold
                  : relation == ">=" ? w >= threshold
                                     : w > threshold;
  if (!ok || !inv->pass) v.fail(tag + " worst " + format_double(w) + " vs " + relation + " " + format_double(threshold));
}

double suite_seconds(const Bundles& all, const std::string& suite, const std::vector<std::string>& names = {}) {
  double t = 0.0;
  for (const auto& [name, b] : all) {
    if (!names.empty() && std::find(names.begin(), names.end(), name) == names.end()) continue;
    if (const SuiteResult* s = b.suite(suite)) t += s->seconds;
  }
  return t;
}

double box_lambda0(const ReportBundle& b) { return b.suite("spectrum")->data.at("lambda0_k").get<double>(); }

int report(int id, const std::string& title, Verdict& v, double seconds) {
  std::cout << "criterion " << (id < 10 ? " " : "") << id << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << title
            << "  (" << format_double(std::round(seconds * 100) / 100) << " s)" << v.note.str() << '\n';
  return v.pass ? 0 : 1;
}

}  // namespace

int main() {
  Bundles all;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& path : scenario_files(CLAB_SCENARIO_DIR)) {
    Scenario sc = load_scenario(path);
    sc.suites = suite_order();
    all.emplace(sc.name, execute(sc));
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "ran " << all.size() << " scenarios in " << format_double(std::round(total * 100) / 100) << " s\n";

  int failures = 0;

  {  // 1
    Verdict v;
    std::set<int> dims;
    bool drifted = false, symmetric = false;
    for (const auto& [name, b] : all) {
      dims.insert(b.scenario.dim);
      (b.suite("classify")->data.at("symmetric").get<bool>() ? symmetric : drifted) = true;
      const auto nodes = b.suite("classify")->data.at("dense_box").at("nodes").get<long>();
      if (nodes > 2000) v.fail(name + " dense box has " + std::to_string(nodes) + " nodes");
      require(v, b, "norms", "norm_bound", "<=", 1e-8, 15);
      require(v, b, "norms", "dual_norm_bound", "<=", 1e-8, 15);
      require(v, b, "norms", "norm_equality", "<=", 1e-8, 9);
      require(v, b, "norms", "dual_norm_equality", "<=", 1e-8, 9);
    }
    if (all.size() < 6) v.fail("fewer than 6 scenarios");
    if (dims != std::set<int>{1, 2, 3}) v.fail("dimensions 1, 2, 3 not all covered");
    if (!drifted || !symmetric) v.fail("need both symmetric and drifted scenarios");
    const double t = suite_seconds(all, "norms");
    if (!(t < 60.0)) v.fail("norms took " + format_double(t) + " s");
    failures += report(1, "uniform norm bound, equality at p = 1, 2, inf", v, t);
  }
  {  // 2
    Verdict v;
    for (const auto& [name, b] : all) require(v, b, "norms", "eigen_identity", "<=", 1e-10, 3);
    failures += report(2, "eigen-identity G phi = phi / (lambda0 - lambda)", v, suite_seconds(all, "norms"));
  }
  {  // 3
    Verdict v;
    for (const auto& [name, b] : all) {
      require(v, b, "spectrum", "top_real", "<=", 1e-10, 3);
      require(v, b, "spectrum", "perron_gap", ">", 1e-8, 3);
      require(v, b, "spectrum", "top_simple", ">=", 1.0, 3);
      require(v, b, "spectrum", "sign_definite", ">", 0.0, 3);
      require(v, b, "spectrum", "pde_residual", "<=", 1e-8, 3);
    }
    failures += report(3, "Perron structure and PDE residual", v, suite_seconds(all, "spectrum"));
  }
  {  // 4
    Verdict v;
    for (const auto& [name, b] : all) {
      require(v, b, "semigroup", "resolvent_identity", "<=", 1e-10, 6);
      require(v, b, "semigroup", "pseudoresolvent_identity", "<=", 1e-10, 6);
    }
    failures += report(4, "resolvent and pseudoresolvent identities", v, suite_seconds(all, "semigroup"));
  }
  {  // 5
    Verdict v;
    int contractive = 0;
    for (const auto& [name, b] : all) {
      if (box_lambda0(b) > 0.0) {
        ++contractive;
        require(v, b, "semigroup", "contraction", "<=", 1.0 + 1e-9, 9);
      }
      require(v, b, "semigroup", "resolvent_bound", "<=", 1e-9, 3);
    }
    if (contractive == 0) v.fail("no scenario with a positive box eigenvalue");
    failures += report(5, "contraction semigroup and Hille-Yosida bound", v, suite_seconds(all, "semigroup"));
  }
  {  // 6
    Verdict v;
    if (!all.count("z2-recurrent") || !all.count("z3-transient")) {
      v.fail("criticality scenarios missing");
    } else {
      const ReportBundle& z2 = all.at("z2-recurrent");
      const ReportBundle& z3 = all.at("z3-transient");
      require(v, z2, "classify", "expected_class", ">=", 1.0);
      require(v, z2, "classify", "fit_r2", ">=", 0.99);
      const auto& gs = z2.suite("classify")->data;
      const double slope = gs.at("log_fit").at("slope").get<double>();
      const double target = 2.0 / M_PI;
      if (!(std::abs(slope - target) <= 0.15 * target)) v.fail("slope " + format_double(slope));
      v.note << " slope " << format_double(slope);
      require(v, z3, "classify", "expected_class", ">=", 1.0);
      require(v, z3, "classify", "threshold_ratio", "<=", 0.5);
    }
    const double t = suite_seconds(all, "classify", {"z2-recurrent", "z3-transient"});
    if (!(t < 120.0)) v.fail("classify took " + format_double(t) + " s");
    failures += report(6, "Z2 critical with log growth, Z3 subcritical", v, t);
  }
  {  // 7
    Verdict v;
    for (const auto& [name, b] : all) {
      require(v, b, "spectrum", "gelfand_agreement", "<=", 1e-6);
      if (b.scenario.gelfand_n != 64) v.fail(name + " gelfand n " + std::to_string(b.scenario.gelfand_n));
    }
    failures += report(7, "Gelfand radius p-independent at n = 64", v, suite_seconds(all, "spectrum"));
  }
  {  // 8
    Verdict v;
    double t = 0.0;
    if (!all.count("z3-compact")) {
      v.fail("z3-compact missing");
    } else {
      const ReportBundle& b = all.at("z3-compact");
      require(v, b, "perturb", "semismall_ratio", "<", 0.3);
      require(v, b, "spectrum", "leading_cauchy", "<", 0.5);
      if (b.scenario.cauchy_nev != 5) v.fail("cauchy_nev " + std::to_string(b.scenario.cauchy_nev));
      if (const auto* inv = b.invariant("perturb", "semismall_ratio")) v.note << " S ratio " << format_double(inv->worst);
      if (const auto* inv = b.invariant("spectrum", "leading_cauchy")) v.note << ", Cauchy ratio " << format_double(inv->worst);
      t = b.suite("perturb")->seconds + b.suite("spectrum")->seconds;
    }
    failures += report(8, "semismall decay and Cauchy leading spectrum", v, t);
  }
  {  // 9
    Verdict v;
    for (const auto& [name, b] : all) {
      if (b.scenario.random_functions < 100) v.fail(name + " uses fewer than 100 random functions");
      require(v, b, "norms", "norm_chain", ">=", -1e-12);
      require(v, b, "norms", "phi_norm", "<=", 1e-12, 5);
    }
    failures += report(9, "weighted-space chain and phi normalization", v, suite_seconds(all, "norms"));
  }
  {  // 10
    Verdict v;
    const auto s0 = std::chrono::steady_clock::now();
    const Exhaustion ex = build_exhaustion(1, {1, 2, 4}, 4, [](const Coord&) { return 1.0; });
    const AssembledOperator op = assemble(OperatorSpec{}, ex, 1);
    const GreenKernel g = dirichlet_green(op, 0.0);
    const auto near = [&](const std::string& what, double got, double want) {
      if (!(std::abs(got - want) <= 1e-10)) v.fail(what + " " + format_double(got) + " vs " + format_double(want));
    };
    near("G(-1,-1)", g.G(0, 0), 0.75);
    near("G(0,0)", g.G(1, 1), 1.0);
    near("G(-1,1)", g.G(0, 2), 0.25);
    near("G(-1,0)", g.G(0, 1), 0.5);
    const PrincipalPair pp = principal_pair(op);
    near("lambda0", pp.lambda0, 2.0 - std::sqrt(2.0));
    const SpectralReport s = spectrum(green_operator(dirichlet_green(op, -1.0), op.W, op.nu), op);
    near("eta_max", s.eta_max.real(), 1.0 / (3.0 - std::sqrt(2.0)));
    if (all.count("path3")) {
      near("path3 bundle lambda0", box_lambda0(all.at("path3")), 2.0 - std::sqrt(2.0));
      if (!all.at("path3").pass) v.fail("path3 scenario failed");
    } else {
      v.fail("path3 scenario missing");
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
    failures += report(10, "path-3 golden values", v, t);
  }

  for (const auto& [name, b] : all) {
    std::cout << "scenario " << name << ' ' << (b.pass ? "PASS" : "FAIL") << '\n';
    if (!b.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
