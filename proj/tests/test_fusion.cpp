#include <vector>

#include "doctest.h"
#include "mpuphase/fusion.hpp"
#include "mpuphase/model_zoo.hpp"
#include "mpuphase/tensors.hpp"
#include "mpuphase/validate.hpp"

using namespace mpuphase;

namespace {

std::vector<Mat> site_blocks(const MpsTensor& a) {
  std::vector<Mat> out;
  for (int j = 0; j < a.phys(); ++j) out.push_back(a[j]);
  return out;
}

std::vector<Mat> site_blocks(const MpoTensor& u) {
  return site_blocks(mpo_as_mps(u));
}

// Brute-force check of target^(n) = left . stack^(n) . right over every
// physical string of an n-site window.
double open_chain_defect(const std::vector<Mat>& stack,
                         const std::vector<Mat>& target, const Mat& left,
                         const Mat& right, int n) {
  REQUIRE(stack.size() == target.size());
  const int d = static_cast<int>(stack.size());
  double worst = 0.0;
  std::vector<int> s(n, 0);
  while (true) {
    Mat acc_s = identity(left.cols());
    Mat acc_t = identity(left.rows());
    for (int k = 0; k < n; ++k) {
      acc_s = acc_s * stack[s[k]];
      acc_t = acc_t * target[s[k]];
    }
    worst = std::max(worst, residual_norm(left * acc_s * right - acc_t));
    int k = n - 1;
    while (k >= 0 && ++s[k] == d) {
      s[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return worst;
}

}  // namespace

TEST_CASE("on-site fusion pairs are scalar and exact") {
  const auto flip = onsite_mpu(cyclic_group(2), z2_flip_rep());
  const auto pair = fusion_pair(flip[1], flip[1], flip[0]);
  CHECK(pair.v.rows() == 1);
  CHECK(pair.v.cols() == 1);
  CHECK(std::abs(pair.v(0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(pair.w(0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(pair.lambda - 2.0) < 1e-8);
  CHECK(pair.window == 1);
  CHECK(pair.dressing_residual < 1e-10);
  CHECK(pair.zipper_residual < 1e-10);

  const auto k4 = direct_product(cyclic_group(2), cyclic_group(2));
  const auto rep = onsite_mpu(k4, k4_two_qubit_rep());
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h) {
      const auto p = fusion_pair(rep[g], rep[h], rep[k4.mult(g, h)]);
      CHECK(p.window == 1);
      CHECK(std::abs(p.v(0, 0) - 1.0) < 1e-10);
      CHECK(std::abs(p.lambda - 4.0) < 1e-8);
    }
}

TEST_CASE("flip-phase fusion collapses the squared row to the identity row") {
  const auto mpu = levin_gu_mpu();
  const auto pair = fusion_pair(mpu[1], mpu[1], mpu[0]);
  CHECK(pair.w.rows() == 1);
  CHECK(pair.w.cols() == 4);
  CHECK(std::abs(pair.lambda - 2.0) < 1e-8);
  CHECK(pair.window >= 1);
  CHECK(pair.window <= 4);
  CHECK(pair.nilpotency_residual < tol::kCertificate);
  CHECK(pair.dressing_residual < tol::kCertificate);
  CHECK(pair.zipper_residual < tol::kCertificate);

  // v embeds the fused bond: v.w is a rank-one projector on the stack bond
  const Mat proj = pair.v * pair.w;
  CHECK(residual_norm(proj * proj - proj) < 1e-9);
  Eigen::JacobiSVD<Mat> svd(proj);
  CHECK((svd.singularValues().array() > 0.5).count() == 1);

  const auto stack = site_blocks(mpo_times_mpo(mpu[1], mpu[1]));
  const auto target = site_blocks(mpu[0]);
  for (int n = 0; n <= 4; ++n)
    CHECK(open_chain_defect(stack, target, pair.w, pair.v, n) < 1e-9);
}

TEST_CASE("mismatched fusion targets are rejected") {
  const auto mpu = levin_gu_mpu();
  // u(g).u(g) composes to the identity row, not to u(g) itself.
  CHECK_THROWS_AS(fusion_pair(mpu[1], mpu[1], mpu[1]), Error);

  const auto flip = onsite_mpu(cyclic_group(2), z2_flip_rep());
  const auto k4 = direct_product(cyclic_group(2), cyclic_group(2));
  const auto rep = onsite_mpu(k4, k4_two_qubit_rep());
  CHECK_THROWS_AS(fusion_pair(rep[1], flip[1], rep[1]), ValidationError);
}

TEST_CASE("cluster action tiles are the expected pauli endpoints") {
  const auto model = cluster_state_model();
  PairCache cache(model.group, model.gset, model.mpo, model.mps);

  Mat x(2, 2), z(2, 2), zx(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  z << 1.0, 0.0, 0.0, -1.0;
  zx << 0.0, 1.0, -1.0, 0.0;

  const auto& p1 = cache.action(0, 1);
  const auto& p2 = cache.action(0, 2);
  const auto& p3 = cache.action(0, 3);
  CHECK(residual_norm(p1.w - x) < 1e-8);
  CHECK(residual_norm(p2.w - z) < 1e-8);
  CHECK(residual_norm(p3.w - zx) < 1e-8);
  CHECK(residual_norm(p3.v + zx) < 1e-8);
  // endpoint operators of the two generators anticommute
  CHECK(residual_norm(p1.w * p2.w + p2.w * p1.w) < 1e-8);
  // the representation is real and symmetric, so both directions agree
  CHECK(residual_norm(cache.absorption(0, 1).w - x) < 1e-8);

  const auto stack = site_blocks(mpo_times_mps(dagger(model.mpo[1]), model.mps[0]));
  const auto target = site_blocks(model.mps[0]);
  for (int n = 0; n <= 4; ++n)
    CHECK(open_chain_defect(stack, target, p1.w, p1.v, n) < 1e-9);
}

TEST_CASE("broken-symmetry product states give exact scalar tiles") {
  const auto model = ghz_model();
  PairCache cache(model.group, model.gset, model.mpo, model.mps);
  const auto& act = cache.action(0, 1);
  CHECK(act.v.rows() == 1);
  CHECK(std::abs(act.v(0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(act.w(0, 0) - 1.0) < 1e-10);
  const auto& abs01 = cache.absorption(0, 1);
  CHECK(std::abs(abs01.v(0, 0) - 1.0) < 1e-10);
}

TEST_CASE("tile comparison recovers proportionality in the dressed metric") {
  const auto model = cluster_state_model();
  PairCache cache(model.group, model.gset, model.mpo, model.mps);
  const auto& p1 = cache.action(0, 1);
  const auto stack =
      TransferOperator::mps(mpo_times_mps(dagger(model.mpo[1]), model.mps[0]));

  const Mat scaled = Complex(0.0, 2.0) * p1.w;
  const auto same = compare_left_tiles(scaled, p1.w, stack, p1.window + 1);
  CHECK(std::abs(same.ratio - Complex(0.0, 2.0)) < 1e-8);
  CHECK(same.residual < 1e-7);

  const auto& p2 = cache.action(0, 2);
  const auto cross = compare_left_tiles(p2.w, p1.w, stack, p1.window + 1);
  CHECK(cross.residual > 0.3);

  const auto vsame = compare_right_tiles(Complex(0.0, 2.0) * p1.v, p1.v, stack,
                                         p1.window + 1);
  CHECK(std::abs(vsame.ratio - Complex(0.0, 2.0)) < 1e-8);
  CHECK(vsame.residual < 1e-7);
}

TEST_CASE("zipper check rejects a rescaled tile pair") {
  const auto model = cluster_state_model();
  PairCache cache(model.group, model.gset, model.mpo, model.mps);
  ChainReplacementPair bad = cache.action(0, 1);
  bad.v *= 2.0;
  const MpsTensor stacked = mpo_times_mps(dagger(model.mpo[1]), model.mps[0]);
  const auto mixed = TransferOperator::mps_pair(stacked, model.mps[0]);
  const auto self = TransferOperator::mps(stacked);
  CHECK_THROWS_AS(zipper_residual(bad, mixed, self, 2), ValidationError);
  CHECK(zipper_residual(cache.action(0, 1), mixed, self, 2) < 1e-8);
}

TEST_CASE("identity arguments produce exact identity tiles") {
  const auto mpu = levin_gu_mpu();
  PairCache cache(cyclic_group(2), mpu);
  const auto& pe = cache.fusion(0, 1);
  CHECK(pe.window == 1);
  CHECK(residual_norm(pe.v - identity(2)) == 0.0);
  CHECK(residual_norm(pe.w - identity(2)) == 0.0);
  const auto& pg = cache.fusion(1, 0);
  CHECK(residual_norm(pg.v - identity(2)) == 0.0);

  // cached pairs are stable references
  CHECK(&cache.fusion(1, 1) == &cache.fusion(1, 1));
  CHECK(cache.max_fusion_window() == cache.fusion(1, 1).window);
  CHECK(cache.max_fusion_window() >= 1);

  CHECK_THROWS_AS(cache.action(0, 1), ValidationError);
}
