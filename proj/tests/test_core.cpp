#include <random>

#include "clab/fields.hpp"
#include "clab/format.hpp"
#include "clab/linear_solve.hpp"
#include "clab/parallel.hpp"
#include "helpers.hpp"

using namespace clab;
using clab::test::unit_exhaustion;

TEST_SUITE("core") {

TEST_CASE("boxes are nested and ordered") {
  const auto ex = unit_exhaustion(2, {1, 2, 3}, 5);
  CHECK(ex.ambient.size() == 121);
  const NodeSet b1 = ex.box(1), b2 = ex.box(2);
  CHECK(b1.size() == 9);
  CHECK(b2.size() == 25);
  for (const auto& x : b1) CHECK(b2.contains(x));
  for (std::size_t i = 1; i < b2.size(); ++i) CHECK(b2[i - 1] < b2[i]);
  CHECK(tail_region(ex, 3).size() == 121 - 49);
  CHECK(ex.radius_index(2) == 1);
}

TEST_CASE("exhaustion input errors") {
  const auto one = [](const Coord&) { return 1.0; };
  CHECK_KIND(build_exhaustion(1, {2, 2}, 4, one), ErrorKind::NonIncreasingRadii);
  CHECK_KIND(build_exhaustion(1, {1, 2}, 4, [](const Coord& x) { return x[0] == 3 ? 0.0 : 1.0; }),
             ErrorKind::NonPositiveMeasure);
  const auto ex = unit_exhaustion(1, {1, 2}, 4);
  CHECK_KIND(ex.radius_index(3), ErrorKind::UnknownRadius);
  CHECK_KIND(NodeField::parse("spiral:2"), ErrorKind::UnknownPreset);
  CHECK_KIND(EdgeField::parse("radial"), ErrorKind::UnknownPreset);
}

TEST_CASE("field presets") {
  const NodeField r = NodeField::parse("radial:-1");
  CHECK(r(Coord{3, -1, 0}) == doctest::Approx(0.25));
  const NodeField cb = NodeField::parse("checkerboard:1,1.5");
  CHECK(cb(Coord{0, 0, 0}) == 1.0);
  CHECK(cb(Coord{1, 0, 0}) == 1.5);
  const NodeField box = NodeField::parse("box:2,3,0");
  CHECK(box(Coord{2, -2, 0}) == 3.0);
  CHECK(box(Coord{3, 0, 0}) == 0.0);
  const EdgeField per_axis = EdgeField::parse("const:0.2,-0.1");
  CHECK(per_axis(Coord{}, 0) == 0.2);
  CHECK(per_axis(Coord{}, 1) == -0.1);
  CHECK(EdgeField::parse("zero").identically_zero());
  const NodeField t = NodeField::table(2.0, {{Coord{1, 0, 0}, 5.0}});
  CHECK(t(Coord{1, 0, 0}) == 5.0);
  CHECK(t(Coord{0, 0, 0}) == 2.0);
  CHECK_KIND(NodeField::table(1.0, {{Coord{9, 0, 0}, 1.0}}).check_domain(unit_exhaustion(1, {1}, 2).ambient),
             ErrorKind::SpecDomainMismatch);
}

TEST_CASE("assembly rejects bad coefficients") {
  const auto ex = unit_exhaustion(2, {2, 3}, 4);
  OperatorSpec s;
  s.a = EdgeField::parse("const:0");
  CHECK_KIND(assemble(s, ex, 2), ErrorKind::NonPositiveConductance);
  s = OperatorSpec{};
  s.W = NodeField::parse("const:-1");
  CHECK_KIND(assemble(s, ex, 2), ErrorKind::NonPositiveWeight);
  s = OperatorSpec{};
  s.b = EdgeField::parse("const:3");
  CHECK_KIND(assemble(s, ex, 2), ErrorKind::DriftTooStrong);
  CHECK_KIND(assemble(OperatorSpec{}, ex, 5), ErrorKind::UnknownRadius);
}

TEST_CASE("adjoint is the nu-transpose") {
  const Exhaustion ex = build_exhaustion(2, {3, 4}, 5, [](const Coord& x) { return 1.0 + 0.1 * (x[0] + 5); });
  OperatorSpec s;
  s.a = EdgeField::parse("checkerboard:0.8,1.2");
  s.b = EdgeField::parse("const:0.2,-0.1");
  s.b_tilde = EdgeField::parse("const:0.05");
  s.c = NodeField::parse("const:0.1");
  const auto op = assemble(s, ex, 3);
  CHECK_FALSE(op.symmetric);
  CHECK(transpose_identity_defect(op) <= 1e-14);
  CHECK(transpose_identity_defect(assemble(OperatorSpec{}, ex, 4)) <= 1e-15);
  const Vector ones = Vector::Ones(op.size());
  const Vector bad = -ones;
  CHECK_KIND(doob_transform(op, bad), ErrorKind::NonPositiveTransformFunction);
}

TEST_CASE("direct and iterative solves agree") {
  const Exhaustion ex = unit_exhaustion(2, {6}, 6);
  OperatorSpec s;
  s.b = EdgeField::parse("const:0.3,0.1");
  s.c = NodeField::parse("const:0.2");
  for (const OperatorSpec& spec : {OperatorSpec{}, s}) {
    const auto op = assemble(spec, ex, 6);
    const ShiftedSolver d(op, -0.5);
    const ShiftedSolver it = ShiftedSolver::iterative(op, -0.5);
    CHECK(d.direct());
    CHECK_FALSE(it.direct());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    Vector b(op.size());
    for (auto& v : b) v = u(rng);
    CHECK((d.solve(b) - it.solve(b)).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((d.solve_transposed(b) - it.solve_transposed(b)).lpNorm<Eigen::Infinity>() <= 1e-10);
    const SparseMatrix M = shift(op, -0.5).L;
    CHECK((M * d.solve(b) - b).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("green above the box eigenvalue is refused") {
  const auto ex = unit_exhaustion(1, {1}, 2);
  const auto op = assemble(OperatorSpec{}, ex, 1);
  CHECK_KIND(dirichlet_green(op, 1.0), ErrorKind::ShiftAboveBoxEigenvalue);
}

TEST_CASE("parallel_map keeps order and rethrows") {
  const auto v = parallel_map<int>(50, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  CHECK_KIND(parallel_for(10, [](std::size_t i) {
               if (i == 7) fail(ErrorKind::OrderViolation, "seven");
             }),
             ErrorKind::OrderViolation);
}

TEST_CASE("shortest round-trip doubles") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-12) == "1e-12");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1.0 / 0.0) == "inf");
  CHECK(std::stod(format_double(0.6060712780034235)) == 0.6060712780034235);
}

}  // TEST_SUITE
