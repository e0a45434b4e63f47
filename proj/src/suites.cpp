#include "clab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <set>

#include "clab/format.hpp"
#include "clab/generator.hpp"
#include "clab/green.hpp"
#include "clab/parallel.hpp"
#include "clab/perturbation.hpp"
#include "clab/spectral.hpp"
#include "clab/weighted.hpp"

namespace clab {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct GreenAt {
  GreenKernel kernel;
  GreenOperator op;
};

struct ShiftAt {
  std::string text;
  double lambda = 0.0;
  bool valid = true;
  std::string reason;

  std::string detail() const { return "lambda=" + text + " (" + format_double(lambda) + ")"; }
};

class Context {
 public:
  explicit Context(const Scenario& s) : sc(s), ex(s.exhaustion()), dense_ex(s.dense_exhaustion()) {}

  const Scenario& sc;
  Exhaustion ex, dense_ex;
  std::optional<GroundStateReport> gs;
  AssembledOperator dense;
  PrincipalPair pair;
  double lambda0 = 0.0;
  std::vector<WeightedSpace> family;       ///< L^p(phi_p) per scenario p, normalized
  std::vector<WeightedSpace> dual_family;  ///< L^p(phi_tilde_p)
  std::vector<ShiftAt> shifts;
  std::optional<CauchyCheck> cauchy;
  json spectral_report;
  std::map<std::string, std::string> csv;

  std::shared_ptr<const GreenAt> green(double lambda) {
    {
      std::lock_guard<std::mutex> lock(m_);
      if (auto it = cache_.find(lambda); it != cache_.end()) return it->second;
    }
    auto g = std::make_shared<GreenAt>();
    g->kernel = dirichlet_green(dense, lambda, lambda0);
    g->op = green_operator(g->kernel, dense.W, dense.nu);
    std::lock_guard<std::mutex> lock(m_);
    return cache_.emplace(lambda, std::move(g)).first->second;
  }

  WeightedSpace space(Exponent p) const {
    for (const auto& sp : family) {
      if (sp.p == p) return sp;
    }
    return make_weights(pair.phi, pair.phi_tilde, dense.W, dense.nu, p, true);
  }

  std::vector<WeightedSpace> endpoint_spaces() const {
    return {space(Exponent(1.0)), space(Exponent(2.0)), space(Exponent::infinity())};
  }

 private:
  std::mutex m_;
  std::map<double, std::shared_ptr<const GreenAt>> cache_;
};

void skip(SuiteResult& r, const std::string& what, const std::string& reason) {
  r.skipped.push_back({{"what", what}, {"reason", reason}});
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

json complex_list(const std::vector<std::complex<double>>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back({num(z.real()), num(z.imag())});
  return a;
}

json coord(const Coord& x, int dim) { return std::vector<int>(x.begin(), x.begin() + dim); }

json fit_json(const GrowthFit& f) {
  return {{"model", f.model}, {"slope", num(f.slope)}, {"intercept", num(f.intercept)}, {"r2", num(f.r2)}};
}

std::string pdetail(const ShiftAt& s, const Exponent& p) { return s.detail() + " p=" + p.key(); }

double rel_max_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1e-300);
}

// ---------------------------------------------------------------- classify

void prepare_dense(Context& c) {
  const Scenario& sc = c.sc;
  c.dense = assemble(sc.op, c.dense_ex, sc.dense_radius);
  c.pair = principal_pair(c.dense);
  c.lambda0 = c.pair.lambda0;
  c.family.clear();
  c.dual_family.clear();
  for (const auto& p : sc.ps) {
    c.family.push_back(make_weights(c.pair.phi, c.pair.phi_tilde, c.dense.W, c.dense.nu, p, true));
    const auto& sp = c.family.back();
    c.dual_family.push_back(make_weights(sp.phi_tilde, sp.phi, c.dense.W, c.dense.nu, p, false));
  }
  c.shifts.clear();
  for (const auto& e : sc.lambdas) {
    ShiftAt s{e.text(), e.resolve(c.lambda0), true, ""};
    if (!(s.lambda < c.lambda0)) {
      s.valid = false;
      s.reason = "shift " + format_double(s.lambda) + " not below the box principal eigenvalue " + format_double(c.lambda0);
    }
    c.shifts.push_back(s);
  }
}

SuiteResult run_classify(Context& c) {
  const Scenario& sc = c.sc;
  SuiteResult r;
  r.name = "classify";
  prepare_dense(c);
  for (const auto& s : c.shifts) {
    if (!s.valid) skip(r, s.detail(), s.reason);
  }

  c.gs = classify(sc.op, c.ex, {sc.classify_shift, false});
  const GroundStateReport& gs = *c.gs;
  const AssembledOperator largest = assemble(sc.op, c.ex, c.ex.radii.back());

  std::optional<GroundStateReport> adj;
  std::string adj_verdict;
  if (largest.symmetric) {
    adj_verdict = to_string(gs.verdict);
  } else {
    adj = classify(sc.op, c.ex, {sc.classify_shift, true});
    adj_verdict = to_string(adj->verdict);
  }

  const auto& seq = gs.sequence;
  if (seq.lambda0.size() >= 2) {
    r.checks.push_back(make_check("lambda0_decrease", "max increment over radii", seq.worst_increase, "<=",
                                  -sc.tol("lambda0_decrease")));
  }
  double min_entry = std::numeric_limits<double>::infinity();
  for (double m : gs.min_entry) {
    if (!std::isnan(m)) min_entry = std::min(min_entry, m);
  }
  if (std::isfinite(min_entry)) {
    r.checks.push_back(make_check("green_positive", "min of G(., y0) over boxes", min_entry, ">", 0.0));
  } else {
    skip(r, "green_positive", "no box admits a Green function at the classification shift");
  }
  double worst_inc = std::numeric_limits<double>::infinity();
  std::string worst_pair;
  for (const auto& p : gs.probes) {
    if (p.worst_increment < worst_inc) {
      worst_inc = p.worst_increment;
      worst_pair = "G(" + to_string(p.x, sc.dim) + "," + to_string(p.y, sc.dim) + ")";
    }
  }
  if (std::isfinite(worst_inc)) {
    r.checks.push_back(make_check("green_monotone", "worst pair " + worst_pair, worst_inc, ">=", -sc.tol("green_monotone")));
  }
  r.checks.push_back(make_check("adjoint_identity", "largest box", transpose_identity_defect(largest), "<=",
                                sc.tol("adjoint_identity")));
  r.checks.push_back(make_check("adjoint_identity", "dense box", transpose_identity_defect(c.dense), "<=",
                                sc.tol("adjoint_identity")));
  r.checks.push_back(make_check("criticality_duality", "L: " + to_string(gs.verdict) + ", L*: " + adj_verdict,
                                adj_verdict == to_string(gs.verdict) ? 1.0 : 0.0, ">=", 1.0));

  // Doob transform by the dense principal eigenfunction
  {
    double lam = c.lambda0 - 1.0;
    for (const auto& s : c.shifts) {
      if (s.valid) {
        lam = s.lambda;
        break;
      }
    }
    const AssembledOperator doob = doob_transform(c.dense, c.pair.phi);
    const GreenKernel gh = dirichlet_green(doob, lam, c.lambda0);
    const GreenKernel g = dirichlet_green(c.dense, lam, c.lambda0);
    const Vector& h = c.pair.phi;
    const Matrix conj = h.cwiseInverse().asDiagonal() * g.G * h.asDiagonal();
    r.checks.push_back(make_check("doob_identity", "h = phi, lambda=" + format_double(lam), rel_max_diff(gh.G, conj), "<=",
                                  sc.tol("doob_identity")));
    const PrincipalPair hp = principal_pair(doob);
    r.checks.push_back(make_check("doob_lambda0", "principal eigenvalue of the transform",
                                  std::abs(hp.lambda0 - c.lambda0) / std::max(std::abs(c.lambda0), 1e-300), "<=",
                                  sc.tol("doob_lambda0")));
  }

  if (sc.expect_class) {
    r.checks.push_back(make_check("expected_class", "verdict " + to_string(gs.verdict) + ", expected " + *sc.expect_class,
                                  to_string(gs.verdict) == *sc.expect_class ? 1.0 : 0.0, ">=", 1.0));
  }
  if (sc.expect_log_slope) {
    const double e = *sc.expect_log_slope;
    r.checks.push_back(make_check("log_slope", "slope " + format_double(gs.log_fit.slope) + " vs " + format_double(e),
                                  std::abs(gs.log_fit.slope - e) / std::abs(e), "<=", sc.expect_log_slope_rel));
    r.checks.push_back(make_check("fit_r2", "log model", gs.log_fit.r2, ">=", sc.expect_fit_r2));
  }
  if (sc.expect_threshold_ratio) {
    const double worst = gs.diff_ratios.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                : *std::max_element(gs.diff_ratios.begin(), gs.diff_ratios.end());
    r.checks.push_back(make_check("threshold_ratio", "successive G(x0,y0) difference ratio", worst, "<=",
                                  *sc.expect_threshold_ratio));
  }

  json probes = json::array();
  for (const auto& p : gs.probes) {
    probes.push_back({{"x", coord(p.x, sc.dim)}, {"y", coord(p.y, sc.dim)}, {"values", vec(p.values)},
                      {"worst_increment", num(p.worst_increment)}});
  }
  r.data = {{"radii", seq.radii},
            {"lambda0", vec(seq.lambda0)},
            {"lambda0_extrapolated", num(seq.extrapolated)},
            {"lambda0_error_band", num(seq.error_band)},
            {"tol_pos", num(gs.tol_pos)},
            {"shift", num(gs.shift)},
            {"verdict", to_string(gs.verdict)},
            {"reason", gs.reason},
            {"adjoint_verdict", adj_verdict},
            {"adjoint_from_symmetry", largest.symmetric},
            {"x0", coord(gs.x0, sc.dim)},
            {"y0", coord(gs.y0, sc.dim)},
            {"green_probe", vec(gs.green_probe)},
            {"min_entry", vec(gs.min_entry)},
            {"diff_ratios", vec(gs.diff_ratios)},
            {"log_fit", fit_json(gs.log_fit)},
            {"linear_fit", fit_json(gs.linear_fit)},
            {"chosen_fit", gs.chosen_fit ? json(gs.chosen_fit->model) : json(nullptr)},
            {"probes", probes},
            {"symmetric", largest.symmetric},
            {"dense_box",
             {{"radius", sc.dense_radius},
              {"nodes", c.dense.size()},
              {"lambda0", num(c.lambda0)},
              {"residual", num(c.pair.residual)},
              {"method", c.pair.method}}}};
  json shifts = json::array();
  for (const auto& s : c.shifts) {
    shifts.push_back({{"entry", s.text}, {"lambda", num(s.lambda)}, {"valid", s.valid}, {"reason", s.reason}});
  }
  r.data["shifts"] = shifts;

  // trace at the classification shift and at every scenario shift, resolved per box
  struct TraceRow {
    int k;
    double lambda, g, l0, min;
  };
  const auto per_box = parallel_map<std::vector<TraceRow>>(seq.radii.size(), [&](std::size_t i) {
    std::vector<TraceRow> rows;
    const int k = seq.radii[i];
    const double l0 = seq.lambda0[i];
    rows.push_back({k, gs.shift, gs.green_probe[i], l0, gs.min_entry[i]});
    const AssembledOperator op = assemble(sc.op, c.ex, k);
    const auto y0 = static_cast<Eigen::Index>(*op.nodes.index_of(gs.y0));
    const auto x0 = static_cast<Eigen::Index>(*op.nodes.index_of(gs.x0));
    for (const auto& e : sc.lambdas) {
      const double lam = e.resolve(l0);
      if (!(lam < l0) || lam == gs.shift) continue;
      const ShiftedSolver solver(op, lam);
      const Vector col = green_column(solver, op, y0);
      rows.push_back({k, lam, col[x0], l0, col.minCoeff()});
    }
    return rows;
  });
  Csv trace({"k", "lambda", "G_x0y0", "lambda0_k", "min_entry"});
  for (const auto& rows : per_box) {
    for (const auto& t : rows) {
      trace.row({std::to_string(t.k), format_double(t.lambda), format_double(t.g), format_double(t.l0),
                 format_double(t.min)});
    }
  }
  c.csv["green_trace.csv"] = trace.str();
  return r;
}

// ---------------------------------------------------------------- norms

SuiteResult run_norms(Context& c) {
  const Scenario& sc = c.sc;
  SuiteResult r;
  r.name = "norms";
  struct PerShift {
    std::vector<Check> checks;
    json data;
  };
  const auto results = parallel_map<PerShift>(c.shifts.size(), [&](std::size_t i) {
    PerShift out;
    const ShiftAt& s = c.shifts[i];
    if (!s.valid) return out;
    const auto g = c.green(s.lambda);
    const double bound = 1.0 / (c.lambda0 - s.lambda);
    const Vector& phi = c.pair.phi;
    out.checks.push_back(make_check("green_duality", s.detail(), g->op.duality_defect, "<=", sc.tol("duality")));
    out.checks.push_back(make_check("green_positive", s.detail(), g->kernel.min_entry, ">", 0.0));
    const double eig = (g->op.K * phi - bound * phi).cwiseAbs().maxCoeff() / (bound * phi.cwiseAbs().maxCoeff());
    out.checks.push_back(make_check("eigen_identity", s.detail(), eig, "<=", sc.tol("eigen_identity")));
    const InvarianceDefect inv =
        invariance_defect(phi, c.pair.phi_tilde, s.lambda, c.lambda0, g->kernel, c.dense.W, c.dense.nu);
    const double inv_rel = std::max(inv.sup_right / (bound * phi.maxCoeff()),
                                    inv.sup_left / (bound * c.pair.phi_tilde.maxCoeff()));
    out.checks.push_back(make_check("invariance", s.detail(), inv_rel, "<=", sc.tol("invariance")));

    json norms = json::object(), dual_norms = json::object(), schur = json::object();
    for (std::size_t j = 0; j < c.family.size(); ++j) {
      const auto& sp = c.family[j];
      const NormResult nr = induced_norm(g->op.K, sp);
      const NormResult nd = induced_norm(g->op.K_dual, c.dual_family[j]);
      const std::string d = pdetail(s, sp.p);
      out.checks.push_back(make_check("norm_bound", d, nr.value / bound - 1.0, "<=", sc.tol("norm_bound")));
      out.checks.push_back(make_check("dual_norm_bound", d, nd.value / bound - 1.0, "<=", sc.tol("norm_bound")));
      const bool endpoint = sp.p.is_inf() || sp.p.value() == 1.0 || sp.p.value() == 2.0;
      if (endpoint) {
        out.checks.push_back(make_check("norm_equality", d, std::abs(nr.value / bound - 1.0), "<=", sc.tol("norm_equality")));
        out.checks.push_back(make_check("dual_norm_equality", d, std::abs(nd.value / bound - 1.0), "<=",
                                        sc.tol("norm_equality")));
      } else {
        const SchurReport sr = schur_bound(g->kernel, sp.phi, sp.phi_tilde, c.dense.W, c.dense.nu, sp.p);
        out.checks.push_back(make_check("schur_cross", d, (nr.value - sr.bound) / bound, "<=", sc.tol("schur_cross")));
        out.checks.push_back(make_check("schur_bound", d, sr.bound / bound - 1.0, "<=", sc.tol("norm_bound")));
        schur[sp.p.key()] = {{"row_sup", num(sr.row_sup)}, {"col_sup", num(sr.col_sup)}, {"bound", num(sr.bound)},
                             {"geometric", num(sr.geometric)}};
      }
      norms[sp.p.key()] = {{"value", num(nr.value)}, {"method", nr.method}, {"margin", num(bound - nr.value)}};
      dual_norms[sp.p.key()] = {{"value", num(nd.value)}, {"method", nd.method}, {"margin", num(bound - nd.value)}};
    }
    out.data = {{"entry", s.text},
                {"lambda", num(s.lambda)},
                {"bound", num(bound)},
                {"eigen_identity", num(eig)},
                {"invariance", {{"sup_right", num(inv.sup_right)}, {"sup_left", num(inv.sup_left)},
                                {"min_right", num(inv.min_right)}, {"min_left", num(inv.min_left)}}},
                {"duality_defect", num(g->op.duality_defect)},
                {"min_entry", num(g->kernel.min_entry)},
                {"norms", norms},
                {"dual_norms", dual_norms},
                {"schur", schur}};
    return out;
  });
  json per_shift = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!c.shifts[i].valid) {
      skip(r, c.shifts[i].detail(), c.shifts[i].reason);
      continue;
    }
    r.checks.insert(r.checks.end(), results[i].checks.begin(), results[i].checks.end());
    per_shift.push_back(results[i].data);
  }

  // weighted-space chain, independent of the shift
  std::mt19937_64 rng(sc.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::Index n = c.dense.size();
  const auto draw = [&] {
    Vector f(n);
    for (Eigen::Index i = 0; i < n; ++i) f[i] = gauss(rng);
    return f;
  };
  double worst_chain = std::numeric_limits<double>::infinity();
  double worst_holder = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < sc.random_functions; ++t) {
    Vector f = draw();
    if (t % 2 == 1) f = f.cwiseAbs();
    const EmbeddingReport rep = embedding_chain(f, c.family, sc.tol("chain_slack"));
    worst_chain = std::min(worst_chain, rep.worst_increment);
    const Vector g = draw();
    for (const auto& sp : c.family) {
      const double lhs = std::abs(pairing(g, f, c.dense.W, c.dense.nu));
      const double rhs = weighted_norm(g, dual_space(sp)) * weighted_norm(f, sp);
      worst_holder = std::max(worst_holder, (lhs - rhs) / rhs);
    }
  }
  if (c.family.size() >= 2) {
    r.checks.push_back(make_check("norm_chain", std::to_string(sc.random_functions) + " random functions", worst_chain,
                                  ">=", -sc.tol("chain_slack")));
  }
  r.checks.push_back(make_check("holder", std::to_string(sc.random_functions) + " random pairs", worst_holder, "<=",
                                sc.tol("holder")));
  json phi_norms = json::object();
  for (const auto& sp : c.family) {
    const double v = weighted_norm(c.pair.phi, sp);
    phi_norms[sp.p.key()] = num(v);
    r.checks.push_back(make_check("phi_norm", "p=" + sp.p.key(), std::abs(v - 1.0), "<=", sc.tol("phi_norm")));
  }
  Vector delta = Vector::Zero(n);
  delta[c.dense.anchor_index()] = 1.0;
  const EmbeddingReport ind = embedding_chain(delta, c.family, sc.tol("chain_slack"));
  if (c.family.size() >= 2) {
    r.checks.push_back(make_check("indicator_chain_strict", "f = indicator of x0", ind.worst_increment, ">", 0.0, true));
  }
  r.data = {{"lambda0_k", num(c.lambda0)},
            {"dense_radius", sc.dense_radius},
            {"shifts", per_shift},
            {"phi_norms", phi_norms},
            {"indicator_chain", vec(ind.norms)},
            {"worst_chain_increment", num(worst_chain)}};
  return r;
}

// ---------------------------------------------------------------- spectrum

SuiteResult run_spectrum(Context& c) {
  const Scenario& sc = c.sc;
  SuiteResult r;
  r.name = "spectrum";
  struct PerShift {
    std::vector<Check> checks;
    json data;
  };
  const auto results = parallel_map<PerShift>(c.shifts.size(), [&](std::size_t i) {
    PerShift out;
    const ShiftAt& s = c.shifts[i];
    if (!s.valid) return out;
    const auto g = c.green(s.lambda);
    const SpectralReport rep = spectrum(g->op, c.dense, {c.lambda0, false});
    const double top = std::abs(rep.eta_max);
    const std::string d = s.detail();
    out.checks.push_back(make_check("top_real", d, rep.top_imag / top, "<=", sc.tol("top_real")));
    out.checks.push_back(make_check("perron_gap", d, rep.gap, ">", sc.tol("perron_gap")));
    out.checks.push_back(make_check("top_simple", d + " geometric multiplicity " + std::to_string(rep.geometric_multiplicity),
                                    rep.geometric_multiplicity == 1 ? 1.0 : 0.0, ">=", 1.0));
    out.checks.push_back(make_check("sign_definite", d, rep.sign_product, ">", 0.0));
    out.checks.push_back(make_check("pde_residual", d, rep.pde_residual, "<=", sc.tol("pde_residual")));
    out.checks.push_back(make_check("top_eigenvalue", d, rep.top_defect, "<=", sc.tol("top_eigenvalue")));
    out.checks.push_back(make_check("dual_spectrum", d, rep.dual_mismatch, "<=", sc.tol("dual_spectrum")));
    out.checks.push_back(make_check("zero_excluded", d, rep.min_modulus, ">", 0.0));

    const double bound = 1.0 / (c.lambda0 - s.lambda);
    json norms = json::object();
    for (const auto& sp : c.family) {
      const NormResult nr = induced_norm(g->op.K, sp);
      norms[sp.p.key()] = {{"value", num(nr.value)}, {"method", nr.method}, {"bound", num(bound)},
                           {"margin", num(bound - nr.value)}};
    }
    out.data = {{"entry", s.text},
                {"lambda", num(s.lambda)},
                {"bound", num(bound)},
                {"eigenvalues", complex_list(rep.eigenvalues)},
                {"dual_eigenvalues", complex_list(rep.dual_eigenvalues)},
                {"eta_max", {num(rep.eta_max.real()), num(rep.eta_max.imag())}},
                {"gap", num(rep.gap)},
                {"geometric_multiplicity", rep.geometric_multiplicity},
                {"sign_product", num(rep.sign_product)},
                {"min_modulus", num(rep.min_modulus)},
                {"pde_residual", num(rep.pde_residual)},
                {"dual_mismatch", num(rep.dual_mismatch)},
                {"top_defect", num(rep.top_defect)},
                {"norms", norms}};
    return out;
  });
  json per_shift = json::array();
  std::optional<std::size_t> first;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!c.shifts[i].valid) {
      skip(r, c.shifts[i].detail(), c.shifts[i].reason);
      continue;
    }
    if (!first) first = i;
    r.checks.insert(r.checks.end(), results[i].checks.begin(), results[i].checks.end());
    per_shift.push_back(results[i].data);
  }

  json gelfand = json::object();
  if (first) {
    const ShiftAt& s = c.shifts[*first];
    const auto g = c.green(s.lambda);
    const auto series = gelfand_radius(g->op, c.endpoint_spaces(), sc.gelfand_n);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    Csv csv({"n", "p", "r_n"});
    json last = json::object();
    for (int n = 1; n <= sc.gelfand_n; ++n) {
      for (const auto& gs : series) csv.row({std::to_string(n), gs.p.key(), format_double(gs.r[static_cast<std::size_t>(n - 1)])});
    }
    for (const auto& gs : series) {
      lo = std::min(lo, gs.r.back());
      hi = std::max(hi, gs.r.back());
      last[gs.p.key()] = num(gs.r.back());
    }
    c.csv["gelfand.csv"] = csv.str();
    const std::string d = s.detail() + " n=" + std::to_string(sc.gelfand_n);
    r.checks.push_back(make_check("gelfand_agreement", d, hi - lo, "<=", sc.tol("gelfand_agreement")));
    const double eta = 1.0 / (c.lambda0 - s.lambda);
    r.checks.push_back(make_check("gelfand_limit", d, std::max(std::abs(hi - eta), std::abs(lo - eta)) / eta, "<=", 1e-6, true));

    // the same sequences in the non-invariant family phi = phi_tilde = 1
    std::vector<WeightedSpace> flat;
    const Vector ones = Vector::Ones(c.dense.size());
    for (const auto& p : {Exponent(1.0), Exponent(2.0), Exponent::infinity()}) {
      flat.push_back(make_weights(ones, ones, c.dense.W, c.dense.nu, p, false));
    }
    const auto flat_series = gelfand_radius(g->op, flat, sc.gelfand_n);
    double flo = std::numeric_limits<double>::infinity(), fhi = -flo;
    json flat_last = json::object();
    for (const auto& gs : flat_series) {
      flo = std::min(flo, gs.r.back());
      fhi = std::max(fhi, gs.r.back());
      flat_last[gs.p.key()] = num(gs.r.back());
    }
    r.checks.push_back(make_check("gelfand_flat_agreement", d + " unit phi", fhi - flo, "<=", sc.tol("gelfand_agreement"), true));
    gelfand = {{"entry", s.text}, {"lambda", num(s.lambda)}, {"n", sc.gelfand_n}, {"r_n", last}, {"r_n_unit_phi", flat_last},
               {"eta_max", num(eta)}};
  }

  json cauchy = nullptr;
  if (sc.cauchy_lambda) {
    const auto run = [&](double lam, bool diagnostic) {
      const CauchyCheck cc = leading_cauchy(sc.op, c.ex, lam, sc.cauchy_nev);
      const std::string d = "lambda=" + format_double(lam) + " top " + std::to_string(sc.cauchy_nev);
      r.checks.push_back(make_check(diagnostic ? "leading_cauchy_other_shift" : "leading_cauchy", d, cc.max_ratio, "<",
                                    sc.tol("cauchy_ratio"), diagnostic));
      json boxes = json::array();
      for (const auto& b : cc.boxes) boxes.push_back({{"radius", b.radius}, {"eta", vec(b.eta)}, {"method", b.method}});
      return std::make_pair(cc, json{{"lambda", num(lam)}, {"boxes", boxes}, {"ratios", vec(cc.ratios)},
                                     {"max_ratio", num(cc.max_ratio)}});
    };
    auto [cc, main] = run(*sc.cauchy_lambda, false);
    c.cauchy = cc;
    json extra = json::array();
    for (double lam : sc.cauchy_diagnostic_lambdas) extra.push_back(run(lam, true).second);
    cauchy = {{"nev", sc.cauchy_nev}, {"gated", main}, {"diagnostic", extra}};
  }

  r.data = {{"lambda0_k", num(c.lambda0)}, {"dense_radius", sc.dense_radius}, {"gelfand", gelfand}, {"leading_cauchy", cauchy}};
  json entries = per_shift;
  c.spectral_report = {{"scenario", sc.name},
                       {"dense_radius", sc.dense_radius},
                       {"nodes", c.dense.size()},
                       {"lambda0_k", num(c.lambda0)},
                       {"shifts", entries},
                       {"gelfand", gelfand},
                       {"leading_cauchy", cauchy}};
  // the suite report keeps the tables without the full eigenvalue lists
  for (auto& e : per_shift) {
    e.erase("eigenvalues");
    e.erase("dual_eigenvalues");
  }
  r.data["shifts"] = per_shift;
  return r;
}

// ---------------------------------------------------------------- semigroup

SuiteResult run_semigroup(Context& c) {
  const Scenario& sc = c.sc;
  SuiteResult r;
  r.name = "semigroup";
  const double lam1 = sc.lambda1.resolve(c.lambda0);
  json data = {{"lambda0_k", num(c.lambda0)}, {"lambda1", num(lam1)}};
  if (!(lam1 < c.lambda0)) {
    skip(r, "generator", "lambda1 = " + format_double(lam1) + " is not below " + format_double(c.lambda0));
  } else {
    const auto g1 = c.green(lam1);
    GeneratorOptions opt;
    opt.z_grid = sc.z_grid;
    opt.t_grid = sc.t_grid;
    const auto spaces = c.endpoint_spaces();
    const GeneratorReport rep = generator_checks(g1->op, c.dense, c.lambda0, spaces, opt);
    r.checks.push_back(make_check("generator_identity", "lambda1=" + format_double(lam1), rep.identity_defect, "<=",
                                  sc.tol("generator_identity")));
    const double lam2 = lam1 - 1.0;
    const auto g2 = c.green(lam2);
    const GeneratorReport rep2 = generator_checks(g2->op, c.dense, c.lambda0, {}, {{}, {}, false, 1e-9});
    r.checks.push_back(make_check("generator_independence",
                                  "lambda1=" + format_double(lam1) + " vs " + format_double(lam2), rel_max_diff(rep.A, rep2.A),
                                  "<=", sc.tol("generator_identity")));
    const bool contractive = c.lambda0 > 0.0;
    if (!contractive) skip(r, "contraction", "box principal eigenvalue is not positive");
    json res = json::array(), con = json::array();
    for (const auto& row : rep.resolvent) {
      const std::string d = "z=" + format_double(row.z.real()) + (row.z.imag() < 0 ? "" : "+") + format_double(row.z.imag()) +
                            "i p=" + row.p.key();
      const bool gated = contractive && !row.p.is_inf() && row.p.value() == 2.0;
      r.checks.push_back(make_check(gated ? "resolvent_bound" : "resolvent_bound_endpoint", d, row.norm - row.bound, "<=",
                                    sc.tol("resolvent_bound"), !gated));
      res.push_back({{"z", {num(row.z.real()), num(row.z.imag())}}, {"p", row.p.key()}, {"norm", num(row.norm)},
                     {"bound", num(row.bound)}});
    }
    for (const auto& row : rep.contraction) {
      const std::string d = "t=" + format_double(row.t) + " p=" + row.p.key();
      if (contractive) r.checks.push_back(make_check("contraction", d, row.norm, "<=", 1.0 + sc.tol("contraction")));
      r.checks.push_back(make_check("semigroup_positivity", d, row.min_entry, ">=", -sc.tol("semigroup_positivity"), true));
      con.push_back({{"t", num(row.t)}, {"p", row.p.key()}, {"norm", num(row.norm)}, {"min_entry", num(row.min_entry)}});
    }
    data["identity_defect"] = num(rep.identity_defect);
    data["resolvent"] = res;
    data["contraction"] = con;
  }

  // resolvent identities over the scenario grid
  std::vector<double> grid;
  for (double l : sc.resolvent_lambdas) {
    if (l < c.lambda0) {
      grid.push_back(l);
    } else {
      skip(r, "resolvent lambda=" + format_double(l), "not below " + format_double(c.lambda0));
    }
  }
  json pairs = json::array();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const auto a = c.green(grid[i]);
      const auto b = c.green(grid[j]);
      const IdentityCheck ri = resolvent_defect(a->kernel, b->kernel, c.dense.W, c.dense.nu);
      const IdentityCheck pi = pseudoresolvent_defect(a->op, b->op);
      const std::string d = "lambda=" + format_double(grid[i]) + "," + format_double(grid[j]);
      if (ri.identical_shifts) {
        skip(r, d, ri.note);
        continue;
      }
      r.checks.push_back(make_check("resolvent_identity", d, ri.defect, "<=", sc.tol("resolvent_identity")));
      r.checks.push_back(make_check("pseudoresolvent_identity", d, pi.defect, "<=", sc.tol("pseudoresolvent_identity")));
      pairs.push_back({{"lambda", {num(grid[i]), num(grid[j])}}, {"resolvent", num(ri.defect)}, {"pseudoresolvent", num(pi.defect)}});
    }
  }
  data["identities"] = pairs;
  r.data = data;
  return r;
}

// ---------------------------------------------------------------- perturb

SuiteResult run_perturb(Context& c) {
  const Scenario& sc = c.sc;
  SuiteResult r;
  r.name = "perturb";
  json data = json::object();
  if (!sc.V) {
    skip(r, "smallness", "no potential V in the scenario");
  } else {
    // support radius of V on the ambient box
    int support = -1;
    const Vector v = sc.V->on(c.ex.ambient);
    for (std::size_t i = 0; i < c.ex.ambient.size(); ++i) {
      if (v[static_cast<Eigen::Index>(i)] != 0.0) support = std::max(support, sup_norm(c.ex.ambient[i]));
    }
    data["support_radius"] = support;
    Csv csv({"mode", "k", "S_k", "verdict"});
    std::map<SmallnessMode, PerturbationProfile> profiles;
    json prof_j = json::array();
    for (auto mode : sc.modes) {
      const PerturbationProfile p = smallness_profile(sc.op, c.ex, *sc.V, mode);
      profiles[mode] = p;
      const std::string m = to_string(mode);
      r.checks.push_back(make_check("s_nonnegative", m, *std::min_element(p.S.begin(), p.S.end()), ">=", 0.0));
      bool any_mono = false;
      double worst_up = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < p.S.size(); ++i) {
        if (p.radii[i - 1] < support) continue;
        any_mono = true;
        worst_up = std::max(worst_up, p.S[i] - p.S[i - 1]);
      }
      if (any_mono) {
        r.checks.push_back(make_check("s_monotone", m + " beyond the support", worst_up, "<=", sc.tol("s_monotone")));
      } else {
        skip(r, "s_monotone " + m, "no consecutive radii beyond the support radius " + std::to_string(support));
      }
      r.checks.push_back(make_check("decaying", m + " verdict " + p.verdict, p.verdict == "decaying" ? 1.0 : 0.0, ">=", 1.0, true));
      if (mode == SmallnessMode::semismall && sc.expect_semismall_ratio) {
        r.checks.push_back(make_check("semismall_ratio",
                                      "S(" + std::to_string(p.radii.back()) + ")/S(" + std::to_string(p.radii.front()) + ")",
                                      p.last_ratio, "<", *sc.expect_semismall_ratio));
      }
      if (!p.S_half.empty()) {
        r.checks.push_back(make_check("half_ambient", m + " ambient " + std::to_string(p.ambient_radius) + " vs " +
                                                          std::to_string(p.half_ambient_radius),
                                      p.half_max_rel_diff, "<=", sc.tol("half_ambient"), true));
      }
      for (std::size_t i = 0; i < p.S.size(); ++i) {
        csv.row({m, std::to_string(p.radii[i]), format_double(p.S[i]), p.verdict});
      }
      prof_j.push_back({{"mode", m},
                        {"radii", p.radii},
                        {"S", vec(p.S)},
                        {"ambient_radius", p.ambient_radius},
                        {"verdict", p.verdict},
                        {"last_ratio", num(p.last_ratio)},
                        {"exact", p.exact},
                        {"certified_lambda0_lower", num(p.certified_lambda0_lower)},
                        {"half_ambient_radius", p.half_ambient_radius},
                        {"S_half", vec(p.S_half)},
                        {"half_max_rel_diff", num(p.half_max_rel_diff)},
                        {"half_flag", p.half_flag}});
    }
    if (profiles.count(SmallnessMode::semismall) && profiles.count(SmallnessMode::small)) {
      const auto& a = profiles[SmallnessMode::semismall].S;
      const auto& b = profiles[SmallnessMode::small].S;
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, a[i] - b[i]);
      r.checks.push_back(make_check("mode_order", "semismall minus small", worst, "<=", 0.0, true));
    }
    if (profiles.count(SmallnessMode::semismall) && profiles[SmallnessMode::semismall].verdict == "decaying") {
      if (c.cauchy) {
        r.checks.push_back(make_check("spectral_linkage", "leading Cauchy ratio with decaying semismall profile",
                                      c.cauchy->max_ratio, "<", sc.tol("cauchy_ratio"), true));
      } else {
        skip(r, "spectral_linkage", "leading Cauchy check not configured or spectrum suite not run");
      }
    }
    c.csv["perturbation_profile.csv"] = csv.str();
    data["profiles"] = prof_j;
  }
  if (sc.comparability_lambda) {
    const ComparabilityProfile cp = comparability_profile(sc.op, c.ex, *sc.comparability_lambda, sc.epsilon);
    r.checks.push_back(make_check("comparability_stability", "lambda=" + format_double(cp.lambda), cp.last_rel_change, "<=",
                                  sc.tol("comparability_stability"), true));
    data["comparability"] = {{"lambda", num(cp.lambda)}, {"radii", cp.radii}, {"C", vec(cp.C)},
                             {"last_rel_change", num(cp.last_rel_change)}, {"reference", coord(cp.reference, sc.dim)}};
  }
  r.data = data;
  return r;
}

using SuiteFn = SuiteResult (*)(Context&);

SuiteFn suite_fn(const std::string& name) {
  if (name == "classify") return run_classify;
  if (name == "norms") return run_norms;
  if (name == "spectrum") return run_spectrum;
  if (name == "semigroup") return run_semigroup;
  if (name == "perturb") return run_perturb;
  fail(ErrorKind::ParseError, "unknown suite '" + name + "'");
}

}  // namespace

Scenario apply_overrides(Scenario sc, const RunOptions& opt) {
  if (opt.suites) sc.suites = suite_closure(*opt.suites);
  if (opt.radius) {
    if (*opt.radius < 1 || *opt.radius > sc.ambient_radius) {
      fail(ErrorKind::UnknownRadius, "--radius " + std::to_string(*opt.radius) + " outside [1, " +
                                         std::to_string(sc.ambient_radius) + "]");
    }
    sc.dense_radius = *opt.radius;
  }
  if (opt.lambdas) sc.lambdas = *opt.lambdas;
  if (opt.ps) {
    sc.ps = *opt.ps;
    std::sort(sc.ps.begin(), sc.ps.end());
    sc.ps.erase(std::unique(sc.ps.begin(), sc.ps.end()), sc.ps.end());
  }
  if (opt.out) sc.output = *opt.out;
  return sc;
}

ReportBundle execute(const Scenario& sc) {
  const auto t0 = Clock::now();
  for (const auto& s : sc.suites) {
    for (const auto& d : suite_dependencies(s)) {
      if (std::find(sc.suites.begin(), sc.suites.end(), d) == sc.suites.end()) {
        fail(ErrorKind::SuiteDependencyUnmet, "scenario '" + sc.name + "': suite '" + s + "' needs '" + d + "'");
      }
    }
  }
  ReportBundle b;
  b.scenario = sc;
  Context ctx(sc);
  for (const auto& s : sc.suites) {
    const auto ts = Clock::now();
    try {
      b.suites.push_back(suite_fn(s)(ctx));
    } catch (const Error& e) {
      fail(e.kind(), "scenario '" + sc.name + "', suite '" + s + "': " + e.detail());
    }
    b.suites.back().seconds = std::chrono::duration<double>(Clock::now() - ts).count();
  }
  b.invariants = summarize(b.suites);
  b.pass = std::all_of(b.invariants.begin(), b.invariants.end(), [](const InvariantSummary& v) { return v.diagnostic || v.pass; });
  b.spectral_report = ctx.spectral_report;
  b.csv = ctx.csv;
  b.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return b;
}

ReportBundle run_scenario(const std::filesystem::path& path, const RunOptions& opt) {
  const Scenario sc = apply_overrides(load_scenario(path), opt);
  ReportBundle b = execute(sc);
  write_bundle(b, sc.output);
  return b;
}

int verify_all(const std::filesystem::path& dir, const std::filesystem::path& out_root, std::ostream& os,
               std::vector<ReportBundle>* bundles) {
  const auto files = scenario_files(dir);
  struct Outcome {
    std::optional<ReportBundle> bundle;
    std::string name, error;
    int code = 0;
  };
  auto outcomes = parallel_map<Outcome>(files.size(), [&](std::size_t i) {
    Outcome o;
    o.name = files[i].stem().string();
    try {
      RunOptions opt;
      Scenario sc = load_scenario(files[i]);
      o.name = sc.name;
      opt.out = out_root / sc.name;
      sc = apply_overrides(std::move(sc), opt);
      ReportBundle b = execute(sc);
      write_bundle(b, sc.output);
      o.code = b.pass ? 0 : 1;
      o.bundle = std::move(b);
    } catch (const Error& e) {
      o.error = e.what();
      o.code = exit_code_for(e.kind());
    }
    return o;
  });
  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.name < b.name; });
  int code = 0;
  json agg = json::array();
  for (auto& o : outcomes) {
    if (o.bundle) {
      print_table(*o.bundle, os);
      os << (o.bundle->pass ? "PASS" : "FAIL") << "     " << o.name << '\n';
    } else {
      os << "ERROR    " << o.name << ": " << o.error << '\n';
    }
    agg.push_back({{"scenario", o.name}, {"exit", o.code}, {"error", o.error}});
    code = std::max(code, o.code);
    if (bundles && o.bundle) bundles->push_back(std::move(*o.bundle));
  }
  std::filesystem::create_directories(out_root);
  std::ofstream(out_root / "verify_summary.json", std::ios::binary | std::ios::trunc)
      << dump_json({{"scenarios", agg}, {"exit", code}});
  os << outcomes.size() << " scenarios, exit " << code << '\n';
  return code;
}

}  // namespace clab
