// Invariants on small random instances: drifted operators with uneven W and nu.

#include <random>

#include "clab/generator.hpp"
#include "clab/perturbation.hpp"
#include "clab/spectral.hpp"
#include "clab/weighted.hpp"
#include "helpers.hpp"

using namespace clab;

namespace {

struct Instance {
  AssembledOperator op;
  PrincipalPair pair;
  std::vector<WeightedSpace> family;
};

// seed picks the coefficients; d = 1 or 2
Instance make_instance(unsigned seed, int dim) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double m0 = 0.5 + u(rng), m1 = u(rng);
  const Exhaustion ex = build_exhaustion(dim, {dim == 1 ? 8 : 3}, dim == 1 ? 9 : 4,
                                         [=](const Coord& x) { return m0 + m1 * ((x[0] + x[1]) % 2 == 0); });
  OperatorSpec s;
  s.a = EdgeField::parse("checkerboard:" + std::to_string(0.6 + u(rng)) + "," + std::to_string(0.6 + u(rng)));
  s.b = EdgeField::parse("const:" + std::to_string(0.3 * u(rng)) + "," + std::to_string(-0.2 * u(rng)));
  s.b_tilde = EdgeField::parse("const:" + std::to_string(0.1 * u(rng)));
  s.c = NodeField::parse("const:" + std::to_string(0.5 * u(rng)));
  s.W = NodeField::parse("checkerboard:" + std::to_string(0.5 + u(rng)) + "," + std::to_string(0.5 + u(rng)));
  Instance in{assemble(s, ex, ex.radii[0]), {}, {}};
  in.pair = principal_pair(in.op);
  for (const char* p : {"1", "1.5", "2", "3", "inf"}) {
    in.family.push_back(make_weights(in.pair.phi, in.pair.phi_tilde, in.op.W, in.op.nu, Exponent::parse(p), true));
  }
  return in;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_SUITE("property") {

TEST_CASE("exponents") {
  CHECK(Exponent::parse("inf").is_inf());
  CHECK(Exponent::parse("1.5").conjugate().value() == doctest::Approx(3.0));
  CHECK(Exponent(1.0).conjugate().is_inf());
  CHECK(Exponent::parse("1.5").key() == "1.5");
  CHECK(Exponent(2.0).key() == "2");
  CHECK_KIND(Exponent(0.5), ErrorKind::ExponentOutOfRange);
  CHECK_KIND(Exponent::parse("abc"), ErrorKind::ExponentOutOfRange);
}

TEST_CASE("weighted chain, Holder and phi normalization") {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    const Instance in = make_instance(seed, 1 + seed % 2);
    std::mt19937_64 rng(seed);
    for (const auto& sp : in.family) {
      CHECK(std::abs(weighted_norm(in.pair.phi, sp) - 1.0) <= 1e-12);
      CHECK(sp.normalized);
    }
    for (int t = 0; t < 40; ++t) {
      const Vector f = random_vector(rng, in.op.size());
      const Vector g = random_vector(rng, in.op.size());
      const EmbeddingReport rep = embedding_chain(f, in.family);
      CHECK(rep.monotone);
      CHECK(rep.worst_increment >= -1e-12);
      for (const auto& sp : in.family) {
        const double lhs = std::abs(pairing(g, f, in.op.W, in.op.nu));
        const double rhs = weighted_norm(g, dual_space(sp)) * weighted_norm(f, sp);
        CHECK(lhs <= rhs * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("chain needs a normalized family") {
  const Instance in = make_instance(2, 1);
  std::vector<WeightedSpace> raw;
  for (const char* p : {"1", "2"}) {
    raw.push_back(make_weights(in.pair.phi, 3.0 * in.pair.phi_tilde, in.op.W, in.op.nu, Exponent::parse(p), false));
  }
  CHECK_KIND(embedding_chain(in.pair.phi, raw), ErrorKind::NotNormalized);
}

TEST_CASE("Green operator duality, eigen identity and norm bound") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    const Instance in = make_instance(seed, 1 + seed % 2);
    const double l0 = in.pair.lambda0;
    std::mt19937_64 rng(seed + 100);
    for (double lam : {l0 - 1.0, l0 - 2.0, -5.0}) {
      const GreenKernel k = dirichlet_green(in.op, lam, l0);
      CHECK(k.min_entry > 0.0);
      const GreenOperator g = green_operator(k, in.op.W, in.op.nu);
      const Vector f = random_vector(rng, in.op.size()), h = random_vector(rng, in.op.size());
      const double a = pairing(h, g.K * f, in.op.W, in.op.nu), b = pairing(g.K_dual * h, f, in.op.W, in.op.nu);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
      const double bound = 1.0 / (l0 - lam);
      CHECK((g.K * in.pair.phi - bound * in.pair.phi).cwiseAbs().maxCoeff() <= 1e-10 * bound * in.pair.phi.maxCoeff());
      for (const auto& sp : in.family) {
        const NormResult n = induced_norm(g, sp);
        CHECK(n.value <= bound * (1 + 1e-8));
        if (n.method == "exact" || n.method == "svd") CHECK(std::abs(n.value - bound) <= 1e-8 * bound);
      }
    }
  }
}

TEST_CASE("resolvent and pseudoresolvent identities") {
  const Instance in = make_instance(5, 2);
  std::vector<GreenKernel> ks;
  std::vector<GreenOperator> gs;
  for (double lam : {-0.5, -1.0, -2.0, -4.0}) {
    ks.push_back(dirichlet_green(in.op, lam, in.pair.lambda0));
    gs.push_back(green_operator(ks.back(), in.op.W, in.op.nu));
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    for (std::size_t j = 0; j < ks.size(); ++j) {
      CHECK(resolvent_defect(ks[i], ks[j], in.op.W, in.op.nu).defect <= 1e-10);
      CHECK(pseudoresolvent_defect(gs[i], gs[j]).defect <= 1e-10);
    }
  }
  CHECK(resolvent_defect(ks[0], ks[0], in.op.W, in.op.nu).identical_shifts);
}

TEST_CASE("Perron structure of the Green operator") {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    const Instance in = make_instance(seed, 1 + seed % 2);
    const GreenOperator g = green_operator(dirichlet_green(in.op, -1.0, in.pair.lambda0), in.op.W, in.op.nu);
    const SpectralReport s = spectrum(g, in.op, {in.pair.lambda0, false});
    CHECK(std::abs(s.top_imag) <= 1e-10);
    CHECK(s.gap > 1e-8);
    CHECK(s.sign_product > 0.0);
    CHECK(s.pde_residual <= 1e-8);
    CHECK(s.top_defect <= 1e-8);
  }
}

TEST_CASE("Gelfand radius is the same in every space") {
  const Instance in = make_instance(3, 2);
  const GreenOperator g = green_operator(dirichlet_green(in.op, -1.0, in.pair.lambda0), in.op.W, in.op.nu);
  std::vector<WeightedSpace> sp = {in.family[0], in.family[2], in.family[4]};
  const auto series = gelfand_radius(g, sp, 64);
  REQUIRE(series.size() == 3);
  const double r = 1.0 / (in.pair.lambda0 + 1.0);
  for (const auto& s : series) CHECK(std::abs(s.r.back() - r) <= 1e-6 * r);
}

TEST_CASE("Doob transform preserves the principal eigenvalue") {
  const Instance in = make_instance(4, 2);
  const AssembledOperator t = doob_transform(in.op, in.pair.phi);
  const Vector ones = Vector::Ones(t.size());
  const Vector r = t.L * ones - in.pair.lambda0 * t.W;
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-10 * in.pair.lambda0);
  CHECK(std::abs(principal_pair(t).lambda0 - in.pair.lambda0) <= 1e-9);
}

TEST_CASE("semigroup generator") {
  const Instance in = make_instance(6, 1);
  REQUIRE(in.pair.lambda0 > 0.0);
  const double l1 = in.pair.lambda0 - 1.0;
  const GreenOperator g = green_operator(dirichlet_green(in.op, l1, in.pair.lambda0), in.op.W, in.op.nu);
  const std::vector<WeightedSpace> sp = {in.family[0], in.family[2], in.family[4]};
  const GeneratorReport rep = generator_checks(g, in.op, in.pair.lambda0, sp);
  CHECK(rep.identity_defect <= 1e-10);
  for (const auto& row : rep.contraction) CHECK(row.norm <= 1 + 1e-9);
  for (const auto& row : rep.resolvent) {
    if (!row.p.is_inf() && row.p.value() == 2.0) CHECK(row.norm <= row.bound + 1e-9);
  }
}

TEST_CASE("zero potential has zero tail functional") {
  const auto ex = clab::test::unit_exhaustion(2, {1, 2, 3}, 5);
  OperatorSpec s;
  s.c = NodeField::parse("const:0.3");
  for (auto mode : {SmallnessMode::small, SmallnessMode::semismall, SmallnessMode::semismall_adjoint}) {
    const auto prof = smallness_profile(s, ex, NodeField::parse("zero"), mode);
    for (double v : prof.S) CHECK(v == 0.0);
    CHECK(prof.verdict == "vanishing");
  }
}

TEST_CASE("tail functional decreases along the exhaustion") {
  const auto ex = clab::test::unit_exhaustion(2, {1, 2, 3, 4}, 7);
  OperatorSpec s;
  s.c = NodeField::parse("const:0.3");
  s.b = EdgeField::parse("const:0.2,0.1");
  for (auto mode : {SmallnessMode::small, SmallnessMode::semismall, SmallnessMode::semismall_adjoint}) {
    const auto prof = smallness_profile(s, ex, NodeField::parse("radial:-3"), mode);
    for (std::size_t i = 1; i < prof.S.size(); ++i) CHECK(prof.S[i] <= prof.S[i - 1] * (1 + 1e-12));
    for (double v : prof.S) CHECK(v >= 0.0);
  }
}

}  // TEST_SUITE
