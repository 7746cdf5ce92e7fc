#include <cmath>

#include "doctest.h"
#include "mpuphase/cohomology.hpp"

using namespace mpuphase;

namespace {

// The order-2 class generator on Z2: -1 on the all-nonidentity triple.
PhaseTable3 z2_generator_cocycle() {
  PhaseTable3 c(2);
  c.at(1, 1, 1) = Complex(-1.0, 0.0);
  return c;
}

// Multiplier table of the Pauli projective representation of Z2 x Z2
// (indices p*2+q; V(01)=X, V(10)=Z, V(11)=ZX).
PhaseTable2Family pauli_sigma_singleton() {
  PhaseTable2Family s(1, 4);
  auto set = [&](int g, int h, double v) { s.at(0, g, h) = Complex(v, 0.0); };
  set(1, 2, -1.0);
  set(1, 3, -1.0);
  set(3, 2, -1.0);
  set(3, 3, -1.0);
  return s;
}

Cochain2 random_cochain2(int n, RandomStream& rng) {
  Cochain2 z{n, std::vector<Complex>(static_cast<size_t>(n) * n)};
  for (auto& v : z.v) v = rng.unit_complex();
  return z;
}

Cochain1Family random_cochain1(int nx, int n, RandomStream& rng) {
  Cochain1Family zeta{nx, n, std::vector<Complex>(static_cast<size_t>(nx) * n)};
  for (auto& v : zeta.v) v = rng.unit_complex();
  return zeta;
}

}  // namespace

TEST_CASE("3-cocycle identity") {
  FiniteGroup z2 = cyclic_group(2);
  CHECK(check_3cocycle(PhaseTable3(2), z2) == doctest::Approx(0.0));
  CHECK(check_3cocycle(z2_generator_cocycle(), z2) == doctest::Approx(0.0));

  PhaseTable3 bad(2);
  bad.at(1, 1, 1) = Complex(0.0, 1.0);
  CHECK(check_3cocycle(bad, z2) > 0.5);
}

TEST_CASE("d of d vanishes") {
  FiniteGroup z4 = cyclic_group(4);
  RandomStream rng(11);
  const PhaseTable3 dz = coboundary_of_2(random_cochain2(4, rng), z4);
  CHECK(check_3cocycle(dz, z4) < tol::kExactish);

  GSet reg = regular_gset(z4);
  Cochain1Family zeta = random_cochain1(reg.size(), 4, rng);
  const PhaseTable2Family dzeta = coboundary_of_1family(zeta, reg, z4);
  CHECK(check_pentagon(dzeta, PhaseTable3(4), reg, z4) < tol::kExactish);
}

TEST_CASE("smith normal form properties") {
  RandomStream rng(5);
  for (auto [m, n] : {std::pair{3, 5}, {4, 4}, {5, 3}}) {
    IMat a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = static_cast<long long>(rng.raw() % 11) - 5;
    if (m == n) a.row(m - 1) = a.row(0) + 2 * a.row(1);  // force rank deficiency once

    SmithDecomposition s = smith_normal_form(a);
    CHECK(((s.u.cast<double>() * a.cast<double>() * s.v.cast<double>()) -
           s.d.cast<double>())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(std::abs(std::abs(s.u.cast<double>().determinant()) - 1.0) < 1e-6);
    CHECK(std::abs(std::abs(s.v.cast<double>().determinant()) - 1.0) < 1e-6);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) CHECK(s.d(i, j) == 0);
  }
}

TEST_CASE("solve_mod1 basic behavior") {
  IMat a(1, 1);
  a(0, 0) = 2;
  RVec b(1);
  b(0) = 0.5;
  Mod1Solution sol = solve_mod1(a, b, 4);
  REQUIRE(sol.solvable);
  const double r = 2.0 * sol.x(0) - 0.5;
  CHECK(std::abs(r - std::round(r)) < 1e-12);

  a(0, 0) = 0;
  b(0) = 0.5;
  sol = solve_mod1(a, b, 4);
  CHECK(!sol.solvable);
  CHECK(sol.max_violation == doctest::Approx(0.5));

  b(0) = 1.0 - 1e-12;  // an integer mod 1
  sol = solve_mod1(a, b, 4);
  CHECK(sol.solvable);

  b(0) = 0.30000001;  // near no rational with denominator <= 4
  CHECK_THROWS_AS(solve_mod1(a, b, 4), ValidationError);
}

TEST_CASE("H3(Z2) class decision") {
  FiniteGroup z2 = cyclic_group(2);
  const PhaseTable3 triv(2);
  const PhaseTable3 gen = z2_generator_cocycle();

  CHECK(class_equal_3(triv, triv, z2).solvable);
  CHECK(class_equal_3(gen, gen, z2).solvable);

  CoboundaryReport rep = class_equal_3(triv, gen, z2);
  CHECK(!rep.solvable);
  CHECK(rep.max_violation == doctest::Approx(0.5));

  PhaseTable3 junk(2);
  junk.at(0, 1, 1) = Complex(0.0, 1.0);  // not a cocycle
  CHECK_THROWS_AS(class_equal_3(triv, junk, z2), ValidationError);
}

TEST_CASE("class decision is blind to coboundaries") {
  FiniteGroup z4 = cyclic_group(4);
  RandomStream rng(23);
  const PhaseTable3 dz = coboundary_of_2(random_cochain2(4, rng), z4);

  CoboundaryReport rep = class_equal_3(PhaseTable3(4), dz, z4);
  REQUIRE(rep.solvable);
  REQUIRE(rep.witness_z.has_value());
  // Witness reproduces dz exactly up to solver roundoff.
  const PhaseTable3 dzw = coboundary_of_2(*rep.witness_z, z4);
  double res = 0.0;
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h)
      for (int k = 0; k < 4; ++k) res = std::max(res, std::abs(dzw(g, h, k) - dz(g, h, k)));
  CHECK(res < tol::kParallel);
}

TEST_CASE("H2(Z2xZ2) obstruction: Pauli multiplier is not a coboundary") {
  FiniteGroup k4 = direct_product(cyclic_group(2), cyclic_group(2));
  GSet pt = singleton_gset(k4);
  const PhaseTable2Family sigma = pauli_sigma_singleton();

  // It is a genuine 2-cocycle: its twisted differential is the trivial 3-table.
  CHECK(check_pentagon(sigma, PhaseTable3(4), pt, k4) < tol::kExactish);

  CoboundaryReport rep = sigma_equivalence_report(PhaseTable2Family(1, 4), sigma, pt, k4);
  CHECK(!rep.solvable);
  CHECK(rep.max_violation == doctest::Approx(0.5));

  // Same class after multiplying by a coboundary.
  RandomStream rng(7);
  Cochain1Family alpha = random_cochain1(1, 4, rng);
  const PhaseTable2Family dalpha = coboundary_of_1family(alpha, pt, k4);
  PhaseTable2Family shifted(1, 4);
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h) shifted.at(0, g, h) = sigma(0, g, h) * dalpha(0, g, h);
  CHECK(sigma_equivalence_report(sigma, shifted, pt, k4).solvable);

  // Mismatched twisting cocycles are rejected up front.
  PhaseTable2Family other(1, 4);
  other.at(0, 1, 1) = Complex(-1.0, 0.0);  // breaks the cocycle identity
  CHECK_THROWS_AS(sigma_equivalence_report(sigma, other, pt, k4), ValidationError);
}

TEST_CASE("joint pair decision") {
  FiniteGroup z2 = cyclic_group(2);
  GSet reg = regular_gset(z2);
  RandomStream rng(31);

  // Forward-constructed equivalent pair: sigma_hat = dzeta . sigma . conj(z),
  // chat = dz . c, starting from the trivial pair.
  Cochain1Family zeta = random_cochain1(2, 2, rng);
  Cochain2 z = random_cochain2(2, rng);
  const PhaseTable2Family dzeta = coboundary_of_1family(zeta, reg, z2);
  const PhaseTable3 dz = coboundary_of_2(z, z2);
  PhaseTable2Family sigma_hat(2, 2);
  for (int x = 0; x < 2; ++x)
    for (int g = 0; g < 2; ++g)
      for (int h = 0; h < 2; ++h)
        sigma_hat.at(x, g, h) = dzeta(x, g, h) * std::conj(z(g, h));

  CoboundaryReport rep = class_equal_T(PhaseTable2Family(2, 2), PhaseTable3(2), sigma_hat,
                                       dz, reg, z2);
  CHECK(rep.solvable);

  // Distinct 3-classes obstruct the pair decision no matter the sigmas.
  // sigma_x(g,h) := gen(x,g,h) satisfies the pentagon with c = gen on the
  // regular set (gen is real, so its square drops out of the cocycle identity).
  const PhaseTable3 gen = z2_generator_cocycle();
  PhaseTable2Family broken(2, 2);
  for (int x = 0; x < 2; ++x)
    for (int g = 0; g < 2; ++g)
      for (int h = 0; h < 2; ++h) broken.at(x, g, h) = gen(x, g, h);
  REQUIRE(check_pentagon(broken, gen, reg, z2) < tol::kExactish);
  CHECK(!class_equal_T(PhaseTable2Family(2, 2), PhaseTable3(2), broken, gen, reg, z2)
             .solvable);
}

TEST_CASE("pair decision absorbs stacking by a 2-cocycle") {
  // On a singleton G-set with equal 3-tables, multiplying sigma by any plain
  // 2-cocycle (not merely a coboundary) stays in the same pair class: the
  // z-unknown absorbs it. The fixed-cocycle sigma_equivalence is finer.
  FiniteGroup k4 = direct_product(cyclic_group(2), cyclic_group(2));
  GSet pt = singleton_gset(k4);
  CHECK(class_equal_T(PhaseTable2Family(1, 4), PhaseTable3(4), pauli_sigma_singleton(),
                      PhaseTable3(4), pt, k4)
            .solvable);
}

TEST_CASE("restriction to the unbroken subgroup") {
  FiniteGroup z4 = cyclic_group(4);
  GSet cosets = coset_gset(z4, {0, 2});
  std::vector<int> h = unbroken_subgroup(cosets, z4);
  REQUIRE(h == std::vector<int>{0, 2});

  RandomStream rng(13);
  Cochain1Family zeta = random_cochain1(2, 4, rng);
  const PhaseTable2Family sigma = coboundary_of_1family(zeta, cosets, z4);

  RestrictedSigma rs = restrict_sigma_to_H(sigma, PhaseTable3(4), cosets, z4, h);
  CHECK(rs.h.group.order() == 2);
  CHECK(rs.sigma.xsize() == 2);
  CHECK(rs.cocycle_residual < tol::kDefault);

  // A subgroup that moves points is rejected.
  CHECK_THROWS_AS(restrict_sigma_to_H(sigma, PhaseTable3(4), cosets, z4,
                                      std::vector<int>{0, 1, 2, 3}),
                  ValidationError);
}

TEST_CASE("normalization pins identity arguments") {
  FiniteGroup z2 = cyclic_group(2);
  RandomStream rng(41);

  // A cocycle with junk on identity-argument entries, same class as the generator.
  const PhaseTable3 gen = z2_generator_cocycle();
  const PhaseTable3 dz = coboundary_of_2(random_cochain2(2, rng), z2);
  PhaseTable3 messy(2);
  for (int g = 0; g < 2; ++g)
    for (int h = 0; h < 2; ++h)
      for (int k = 0; k < 2; ++k) messy.at(g, h, k) = gen(g, h, k) * dz(g, h, k);

  PhaseTable3 norm = normalize_3cocycle(messy, z2);
  for (int g = 0; g < 2; ++g)
    for (int h = 0; h < 2; ++h)
      for (int k = 0; k < 2; ++k)
        if (g == 0 || h == 0 || k == 0) CHECK(norm(g, h, k) == Complex(1.0, 0.0));
  CHECK(check_3cocycle(norm, z2) < tol::kDefault);
  CHECK(!class_equal_3(PhaseTable3(2), norm, z2).solvable);

  // Same for a sigma family.
  GSet reg = regular_gset(z2);
  const PhaseTable2Family sigma = coboundary_of_1family(random_cochain1(2, 2, rng), reg, z2);
  PhaseTable2Family snorm = normalize_2family(sigma, reg, z2);
  for (int x = 0; x < 2; ++x)
    for (int g = 0; g < 2; ++g) {
      CHECK(snorm(x, 0, g) == Complex(1.0, 0.0));
      CHECK(snorm(x, g, 0) == Complex(1.0, 0.0));
    }
  CHECK(sigma_equivalence_report(sigma, snorm, reg, z2).solvable);
}
