// Frozen values from tests/oracles/*.py, computed with NumPy/SciPy before the
// C++ code existed.

#include <cmath>

#include "clab/linear_solve.hpp"
#include "clab/perturbation.hpp"
#include "clab/scenario.hpp"
#include "clab/spectral.hpp"
#include "helpers.hpp"

using namespace clab;
using clab::test::rel;
using clab::test::unit_exhaustion;

namespace {

AssembledOperator path3() {
  static const Exhaustion ex = unit_exhaustion(1, {1, 2, 4}, 4);
  return assemble(OperatorSpec{}, ex, 1);
}

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("path3 Green matrix at lambda = 0") {
  const auto op = path3();
  REQUIRE(op.size() == 3);
  Matrix expect(3, 3);
  expect << 3, 2, 1, 2, 4, 2, 1, 2, 3;
  expect /= 4.0;
  const GreenKernel g = dirichlet_green(op, 0.0);
  CHECK(max_abs_diff(g.G, expect) <= 1e-12);
  CHECK(std::abs(g.G(1, 1) - 1.0) <= 1e-12);
  CHECK(std::abs(g.G(0, 0) - 0.75) <= 1e-12);
  CHECK(std::abs(g.G(0, 2) - 0.25) <= 1e-12);
  CHECK(std::abs(g.G(0, 1) - 0.5) <= 1e-12);
  CHECK(g.min_entry == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("path3 Green matrix at lambda = -2") {
  // (T + 2)^{-1} = [[15,4,1],[4,16,4],[1,4,15]] / 56
  Matrix expect(3, 3);
  expect << 15, 4, 1, 4, 16, 4, 1, 4, 15;
  expect /= 56.0;
  CHECK(max_abs_diff(dirichlet_green(path3(), -2.0).G, expect) <= 1e-12);
}

TEST_CASE("path3 principal pair") {
  const PrincipalPair pp = principal_pair(path3());
  CHECK(std::abs(pp.lambda0 - (2.0 - std::sqrt(2.0))) <= 1e-12);
  CHECK(std::abs(pp.phi(0) - std::sqrt(0.5)) <= 1e-12);
  CHECK(std::abs(pp.phi(1) - 1.0) <= 1e-12);
  CHECK(std::abs(pp.phi(2) - std::sqrt(0.5)) <= 1e-12);
  CHECK(pp.lower <= pp.lambda0 + 1e-12);
  CHECK(pp.upper >= pp.lambda0 - 1e-12);
}

TEST_CASE("path3 top Green eigenvalue at lambda = -1") {
  const auto op = path3();
  const GreenOperator g = green_operator(dirichlet_green(op, -1.0), op.W, op.nu);
  const SpectralReport s = spectrum(g, op);
  CHECK(std::abs(s.eta_max.real() - 1.0 / (3.0 - std::sqrt(2.0))) <= 1e-12);
  CHECK(std::abs(s.eta_max.imag()) <= 1e-14);
  REQUIRE(s.eigenvalues.size() == 3);
  CHECK(std::abs(s.eigenvalues[1].real() - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(s.eigenvalues[2].real() - 1.0 / (3.0 + std::sqrt(2.0))) <= 1e-12);
}

TEST_CASE("path3 Doob transform with h = (1, 2, 1)") {
  const auto op = path3();
  const Vector h = (Vector(3) << 1, 2, 1).finished();
  const AssembledOperator t = doob_transform(op, h);
  Matrix expect(3, 3);
  expect << 2, -2, 0, -0.5, 2, -0.5, 0, -2, 2;
  CHECK(max_abs_diff(Matrix(t.L), expect) <= 1e-14);
  const Vector Lh = op.L * h;
  CHECK(std::abs(Lh(0) / h(0)) <= 1e-14);
  CHECK(std::abs(Lh(1) / h(1) - 1.0) <= 1e-14);
  CHECK_FALSE(t.symmetric);
}

TEST_CASE("Z2 Green growth, a = 1/4") {
  const Scenario sc = load_scenario(CLAB_SCENARIO_DIR "/z2-recurrent.toml");
  const GroundStateReport gs = classify(sc.op, sc.exhaustion(), {});
  const std::vector<double> expect = {1.4755765269576557, 1.881054107448975, 2.3034896790710606, 2.7350866616384137};
  REQUIRE(gs.green_probe.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) CHECK(rel(gs.green_probe[i], expect[i]) <= 1e-9);
  CHECK(std::abs(gs.log_fit.slope - 0.6060712780034235) <= 1e-8);
  CHECK(std::abs(gs.log_fit.r2 - 0.9998033093296085) <= 1e-8);
  CHECK(gs.verdict == Criticality::critical);
}

TEST_CASE("Z3 G(0, e1) on boxes of radius 8 and 16") {
  const Exhaustion ex = unit_exhaustion(3, {8, 16}, 16);
  const std::vector<double> expect = {0.07831796693781116, 0.08197112647688688};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto op = assemble(OperatorSpec{}, ex, ex.radii[i]);
    const ShiftedSolver solver(op, 0.0);
    const Vector row = green_row(solver, op, op.anchor_index());
    const auto y = op.nodes.index_of(Coord{1, 0, 0});
    REQUIRE(y.has_value());
    CHECK(rel(row(static_cast<Eigen::Index>(*y)), expect[i]) <= 1e-9);
  }
}

TEST_CASE("tail functionals on Z2, c = 0.5, V = box of radius 4") {
  OperatorSpec spec;
  spec.c = NodeField::parse("const:0.5");
  const Exhaustion ex = unit_exhaustion(2, {1, 2, 3}, 6);
  const NodeField V = NodeField::parse("box:4,1,0");
  const auto semi = smallness_profile(spec, ex, V, SmallnessMode::semismall);
  const auto small = smallness_profile(spec, ex, V, SmallnessMode::small);
  const std::vector<double> s_semi = {2.833091042640161, 1.9933099370195937, 1.0903180482074035};
  const std::vector<double> s_small = {5.939460120742832, 4.34586211971615, 2.383742085633468};
  REQUIRE(semi.S.size() == 3);
  REQUIRE(small.S.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rel(semi.S[i], s_semi[i]) <= 1e-10);
    CHECK(rel(small.S[i], s_small[i]) <= 1e-10);
  }
  CHECK(small.exact);
}

}  // TEST_SUITE
