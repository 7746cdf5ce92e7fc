#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "mpuphase/indices.hpp"

using namespace mpuphase;

namespace {

// Exchange table of the tiles X, Z, XZ attached to the two-qubit flip
// representation: V(g)V(h) vs V(gh), frozen from the Pauli algebra.
Complex cluster_sigma_oracle(int g, int h) {
  const bool minus = (g == 1 && h == 2) || (g == 1 && h == 3) ||
                     (g == 3 && h == 2) || (g == 3 && h == 3);
  return Complex(minus ? -1.0 : 1.0, 0.0);
}

}  // namespace

TEST_CASE("on-site permutation representation has a trivial associator") {
  const FiniteGroup s3 = symmetric_group_s3();
  PairCache cache(s3, onsite_mpu(s3, s3_permutation_rep()));
  const OmegaReport rep = extract_omega(cache);
  CHECK(rep.cocycle_residual < tol::kDefault);
  CHECK(rep.parallelism_residual < tol::kCertificate);
  CHECK(rep.unit_drift < tol::kParallel);
  for (int g = 0; g < 6; ++g)
    for (int h = 0; h < 6; ++h)
      for (int k = 0; k < 6; ++k)
        CHECK(std::abs(rep.omega(g, h, k) - Complex(1.0, 0.0)) < tol::kDefault);
}

TEST_CASE("flip-phase representation has the order-two associator class") {
  const FiniteGroup z2({{0, 1}, {1, 0}});
  PairCache cache(z2, levin_gu_mpu());
  CHECK(cache.mpo_injectivity(1) == 2);

  const OmegaReport rep = extract_omega(cache);
  CHECK(rep.cocycle_residual < tol::kDefault);
  CHECK(rep.parallelism_residual < tol::kCertificate);
  CHECK(std::abs(rep.omega(1, 1, 1) - Complex(-1.0, 0.0)) < tol::kDefault);

  // Identity arguments are hard units, not extracted values.
  CHECK(rep.omega(0, 1, 1) == Complex(1.0, 0.0));
  CHECK(rep.omega(1, 0, 1) == Complex(1.0, 0.0));
  CHECK(rep.omega(1, 1, 0) == Complex(1.0, 0.0));

  // The sign at (1,1,1) is the full class invariant over Z2.
  CHECK_FALSE(class_equal_3(PhaseTable3(2), rep.omega, z2).solvable);
  CHECK(class_equal_3(rep.omega, rep.omega, z2).solvable);
}

TEST_CASE("two-site blocking preserves the associator class") {
  const FiniteGroup z2({{0, 1}, {1, 0}});
  std::vector<MpoTensor> u = levin_gu_mpu();
  for (auto& site : u) site = block(site, 2);
  PairCache cache(z2, std::move(u));
  const OmegaReport rep = extract_omega(cache);
  CHECK(rep.cocycle_residual < tol::kDefault);
  CHECK(std::abs(rep.omega(1, 1, 1) - Complex(-1.0, 0.0)) < tol::kDefault);
}

TEST_CASE("absorption exchange phases reproduce the pauli commutation table") {
  const SymmetricModel m = cluster_state_model();
  PairCache cache(m.group, m.gset, m.mpo, m.mps);
  const SigmaReport rep = extract_sigma_hat(cache);
  CHECK(rep.parallelism_residual < tol::kCertificate);
  CHECK(rep.unit_drift < tol::kParallel);
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h)
      CHECK(std::abs(rep.sigma(0, g, h) - cluster_sigma_oracle(g, h)) < tol::kDefault);

  // Gauge-invariant detection: the generator tiles anticommute.
  const Complex comm = rep.sigma(0, 1, 2) / rep.sigma(0, 2, 1);
  CHECK(std::abs(comm - Complex(-1.0, 0.0)) < tol::kDefault);

  // Identity arguments are hard units.
  for (int g = 0; g < 4; ++g) {
    CHECK(rep.sigma(0, 0, g) == Complex(1.0, 0.0));
    CHECK(rep.sigma(0, g, 0) == Complex(1.0, 0.0));
  }
}

TEST_CASE("exchange family class decisions separate cluster from product") {
  const SymmetricModel m = cluster_state_model();
  PairCache cache(m.group, m.gset, m.mpo, m.mps);
  const SigmaReport rep = extract_sigma_hat(cache);

  PhaseTable2Family pauli(1, 4);
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h)
      pauli.at(0, g, h) = cluster_sigma_oracle(g, h);
  CHECK(sigma_equivalence_report(rep.sigma, pauli, m.gset, m.group).solvable);
  CHECK_FALSE(
      sigma_equivalence_report(rep.sigma, PhaseTable2Family(1, 4), m.gset, m.group).solvable);
}

TEST_CASE("classification matches the example catalog") {
  SUBCASE("product multiplet keeps the full group and trivial classes") {
    const PhaseLabel lab = classify(product_plus_model());
    CHECK(lab.unbroken.group.order() == 4);
    CHECK(lab.pentagon_residual < tol::kDefault);
    CHECK(lab.restricted.cocycle_residual < tol::kDefault);
    CHECK(lab.omega.cocycle_residual < tol::kDefault);
    for (int g = 0; g < 4; ++g)
      for (int h = 0; h < 4; ++h) {
        CHECK(std::abs(lab.sigma.sigma(0, g, h) - Complex(1.0, 0.0)) < tol::kDefault);
        CHECK(std::abs(lab.restricted.sigma(0, g, h) - Complex(1.0, 0.0)) < tol::kDefault);
      }
    for (int g = 1; g < 4; ++g)
      for (int h = 1; h < 4; ++h)
        for (int k = 1; k < 4; ++k)
          CHECK(std::abs(lab.omega.omega(g, h, k) - Complex(1.0, 0.0)) < tol::kDefault);
  }

  SUBCASE("degenerate pair of product states breaks the symmetry completely") {
    const SymmetricModel m = ghz_model();
    const PhaseLabel lab = classify(m);
    CHECK(lab.unbroken.group.order() == 1);
    CHECK(lab.unbroken.elements == std::vector<int>{0});
    CHECK(m.gset.size() == 2);
    CHECK(lab.pentagon_residual < tol::kDefault);
    for (int x = 0; x < 2; ++x)
      for (int g = 0; g < 2; ++g)
        for (int h = 0; h < 2; ++h)
          CHECK(std::abs(lab.sigma.sigma(x, g, h) - Complex(1.0, 0.0)) < tol::kDefault);
    CHECK(std::abs(lab.omega.omega(1, 1, 1) - Complex(1.0, 0.0)) < tol::kDefault);
  }

  SUBCASE("cluster multiplet keeps the group with a nontrivial exchange class") {
    const PhaseLabel lab = classify(cluster_state_model());
    CHECK(lab.unbroken.group.order() == 4);
    CHECK(lab.pentagon_residual < tol::kDefault);
    CHECK(lab.restricted.cocycle_residual < tol::kDefault);
    // Trivial associator, nontrivial restricted exchange class.
    for (int g = 1; g < 4; ++g)
      for (int h = 1; h < 4; ++h)
        for (int k = 1; k < 4; ++k)
          CHECK(std::abs(lab.omega.omega(g, h, k) - Complex(1.0, 0.0)) < tol::kDefault);
    const Complex comm = lab.restricted.sigma(0, 1, 2) / lab.restricted.sigma(0, 2, 1);
    CHECK(std::abs(comm - Complex(-1.0, 0.0)) < tol::kDefault);
    CHECK(lab.max_window >= 1);
    CHECK(lab.validation_residual < tol::kDefault);
  }
}

TEST_CASE("classification rejects a tensor that breaks the multiplet law") {
  SymmetricModel m = cluster_state_model();
  std::vector<Mat> scaled;
  for (int j = 0; j < m.mps[0].phys(); ++j) scaled.push_back(1.1 * m.mps[0][j]);
  m.mps[0] = MpsTensor(scaled);
  try {
    classify(m);
    FAIL("expected a validation failure");
  } catch (const ValidationError& err) {
    CHECK(std::string(err.what()).find("multiplet stage") != std::string::npos);
  }
}
