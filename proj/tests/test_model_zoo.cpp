#include "doctest.h"
#include "mpuphase/model_zoo.hpp"
#include "mpuphase/validate.hpp"

using namespace mpuphase;

TEST_CASE("on-site representations validate") {
  const FiniteGroup s3 = symmetric_group_s3();
  CHECK(validate_mpu_representation(onsite_mpu(s3, s3_permutation_rep()), s3, 3)
            .pass(tol::kDefault));

  // A non-representation is rejected up front.
  auto rep = s3_permutation_rep();
  rep[3] = identity(3);
  CHECK_THROWS_AS(onsite_mpu(s3, rep), ValidationError);
}

TEST_CASE("cluster model is a valid unbroken multiplet") {
  const SymmetricModel m = cluster_state_model();
  CHECK(m.gset.size() == 1);
  CHECK(unbroken_subgroup(m.gset, m.group) == std::vector<int>{0, 1, 2, 3});
  CHECK(validate_mpu_representation(m.mpo, m.group, 3).pass(tol::kDefault));
  CHECK(validate_symmetric_multiplet(m.mps, m.mpo, m.gset, m.group, 4).pass(tol::kDefault));
  CHECK(canonical_residual(m.mps[0]) < tol::kTight);
  CHECK(injectivity_length(m.mps[0]) == 1);
}

TEST_CASE("ghz model breaks the symmetry completely") {
  const SymmetricModel m = ghz_model();
  CHECK(m.gset.size() == 2);
  CHECK(unbroken_subgroup(m.gset, m.group) == std::vector<int>{0});
  CHECK(validate_symmetric_multiplet(m.mps, m.mpo, m.gset, m.group, 4).pass(tol::kDefault));
}

TEST_CASE("product model is trivial but symmetric") {
  const SymmetricModel m = product_plus_model();
  CHECK(validate_symmetric_multiplet(m.mps, m.mpo, m.gset, m.group, 4).pass(tol::kDefault));
  CHECK(injectivity_length(m.mps[0]) == 1);
}

TEST_CASE("flip-phase mpu is not a product of on-site unitaries") {
  // If U_n = V^(x)n, every site-vs-rest cut has operator Schmidt rank 1.
  // At n = 2 the two periodic bonds coincide and the phase gates cancel, so
  // the witness needs n = 3: site 1 against sites 2,3.
  const auto lg = levin_gu_mpu();
  const Mat u3 = dense_operator(lg[1], 3);
  Mat r(4, 16);
  for (int o1 = 0; o1 < 2; ++o1)
    for (int i1 = 0; i1 < 2; ++i1)
      for (int orest = 0; orest < 4; ++orest)
        for (int irest = 0; irest < 4; ++irest)
          r(o1 * 2 + i1, orest * 4 + irest) = u3(o1 * 4 + orest, i1 * 4 + irest);
  Eigen::JacobiSVD<Mat> svd(r);
  int rank = 0;
  for (int k = 0; k < 4; ++k)
    if (svd.singularValues()(k) > 1e-10 * svd.singularValues()(0)) ++rank;
  CHECK(rank > 1);
}

TEST_CASE("random injective mps is canonical, injective and deterministic") {
  const MpsTensor a = random_injective_mps(2, 3, 1234);
  CHECK(canonical_residual(a) < tol::kTight);
  CHECK(injectivity_length(a).has_value());

  const MpsTensor b = random_injective_mps(2, 3, 1234);
  double diff = 0.0;
  for (int j = 0; j < 2; ++j) diff = std::max(diff, (a[j] - b[j]).norm());
  CHECK(diff == 0.0);
}
