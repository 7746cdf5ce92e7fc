#include <cmath>

#include "doctest.h"
#include "mpuphase/model_zoo.hpp"
#include "mpuphase/validate.hpp"

using namespace mpuphase;

namespace {

// Two-qubit controlled-Z conjugated flip chain, the dense n-site oracle for
// the bond-dimension-2 fixture: i^n * prod_k X_k * prod_k CZ_{k,k+1} (periodic).
Mat flip_phase_chain(int n) {
  const int dim = 1 << n;
  Mat u = Mat::Zero(dim, dim);
  for (int in = 0; in < dim; ++in) {
    // CZ phase: product over bonds (k, k+1 mod n) of (-1)^(bit_k bit_{k+1}).
    int par = 0;
    for (int k = 0; k < n; ++k) {
      const int b1 = (in >> (n - 1 - k)) & 1;
      const int b2 = (in >> (n - 1 - (k + 1) % n)) & 1;
      par ^= b1 & b2;
    }
    const int out = ~in & (dim - 1);  // every spin flipped
    u(out, in) = par ? -1.0 : 1.0;
  }
  return std::pow(Complex(0.0, 1.0), n) * u;
}

}  // namespace

TEST_CASE("blocking and dense chains agree") {
  const MpsTensor a = random_injective_mps(2, 3, 7);
  const Vec direct = dense_state(a, 4);
  const MpsTensor b2 = block(a, 2);
  const Vec blocked = dense_state(b2, 2);
  CHECK((direct - blocked).norm() < tol::kExactish);

  // dense_operator on a blocked MPO equals the longer chain of the site MPO.
  const auto lg = levin_gu_mpu();
  const Mat direct_op = dense_operator(lg[1], 4);
  const Mat blocked_op = dense_operator(block(lg[1], 2), 2);
  CHECK(residual_norm(direct_op - blocked_op) < tol::kExactish);
}

TEST_CASE("dagger generates the adjoint chain") {
  const auto lg = levin_gu_mpu();
  for (int n = 2; n <= 4; ++n) {
    const Mat u = dense_operator(lg[1], n);
    const Mat v = dense_operator(dagger(lg[1]), n);
    CHECK(residual_norm(v - u.adjoint()) < tol::kExactish);
  }
}

TEST_CASE("mpo products compose chains") {
  const auto lg = levin_gu_mpu();
  const MpsTensor a = random_injective_mps(2, 2, 19);
  const int n = 3;
  const Mat u = dense_operator(lg[1], n);

  const Vec applied = dense_state(mpo_times_mps(lg[1], a), n);
  CHECK((applied - u * dense_state(a, n)).norm() < 1e-10);

  const Mat squared = dense_operator(mpo_times_mpo(lg[1], lg[1]), n);
  CHECK(residual_norm(squared - u * u) < 1e-10);

  CHECK(std::abs(mpo_chain_trace(lg[1], n) - u.trace()) < 1e-10);
}

TEST_CASE("transfer apply matches dense") {
  const MpsTensor a = random_injective_mps(3, 2, 3);
  const MpsTensor b = random_injective_mps(3, 4, 4);
  const TransferOperator t = TransferOperator::mps_pair(a, b);
  RandomStream rng(55);
  Mat y(2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) y(i, j) = rng.gaussian_complex();

  const Mat direct = t.apply(y);
  const Vec vec_in = Eigen::Map<const Vec>(y.data(), 8);
  const Vec vec_out = t.dense() * vec_in;
  CHECK((Eigen::Map<const Mat>(vec_out.data(), 2, 4) - direct).norm() < tol::kExactish);

  // Adjoint really is the adjoint under tr(A† B).
  Mat z(2, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 4; ++j) z(i, j) = rng.gaussian_complex();
  const Complex lhs = (z.adjoint() * t.apply(y)).trace();
  const Complex rhs = (t.apply_adjoint(z).adjoint() * y).trace();
  CHECK(std::abs(lhs - rhs) < tol::kExactish);

  // chain_trace equals the trace of the dense power.
  const Mat e3 = t.dense() * t.dense() * t.dense();
  CHECK(std::abs(chain_trace(t, 3) - e3.trace()) < 1e-10);
}

TEST_CASE("canonical form and fixed points") {
  const MpsTensor raw = [] {
    RandomStream rng(99);
    MpsTensor a(2, 3);
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a[j](r, c) = 2.0 * rng.gaussian_complex();
    return a;
  }();
  const CanonicalMps canon = right_canonicalize(raw);
  CHECK(canon.residual < tol::kTight);
  CHECK(canonical_residual(canon.a) < tol::kTight);

  const FixedPointPair fp = leading_fixed_points(TransferOperator::mps(canon.a));
  CHECK(std::abs(fp.lambda - Complex(1.0, 0.0)) < 1e-10);
  CHECK(residual_norm(fp.right - identity(3)) < 1e-8);
  CHECK(std::abs(fp.left.trace() - Complex(1.0, 0.0)) < 1e-10);
  CHECK((fp.left - fp.left.adjoint()).norm() < 1e-10);
  CHECK((fp.left - canon.rho).norm() < 1e-8);

  // Dense states of equal length have norm -> 1 under the canonical gauge
  // (trace of the n-th transfer power approaches tr(rho * 1) = 1).
  CHECK(std::abs(dense_state(canon.a, 10).squaredNorm() - 1.0) < 0.2);
}

TEST_CASE("iterative eigensolver path matches dense") {
  const MpsTensor a = random_injective_mps(2, 4, 31);
  const TransferOperator t = TransferOperator::mps(a);
  const FixedPointPair dense = leading_fixed_points(t);
  const FixedPointPair iter = leading_fixed_points(t, /*dense_max_dim=*/1);
  CHECK(std::abs(dense.lambda - iter.lambda) < 1e-9);
  // The iterative second Ritz value is only a gap estimate; it stalls at the
  // subleading cluster scale, which is plenty for the uniqueness check.
  CHECK(std::abs(dense.gap - iter.gap) < 0.05);
  CHECK((dense.left - iter.left).norm() < 1e-7);
  CHECK((dense.right - iter.right).norm() < 1e-7);
}

TEST_CASE("degenerate spectra are reported, not silently used") {
  const SymmetricModel ghz = ghz_model();
  MpsTensor cat(2, 2);  // block-diagonal two-ground-state tensor
  cat[0] = Mat::Zero(2, 2);
  cat[0](0, 0) = 1.0;
  cat[1] = Mat::Zero(2, 2);
  cat[1](1, 1) = 1.0;
  CHECK_THROWS_AS(right_canonicalize(cat), SpectrumError);
  CHECK(!injectivity_length(cat).has_value());
  CHECK(injectivity_length(ghz.mps[0]).has_value());
}

TEST_CASE("injectivity lengths of the fixtures") {
  const auto lg = levin_gu_mpu();
  CHECK(injectivity_length(lg[1]) == 2);

  const SymmetricModel cluster = cluster_state_model();
  CHECK(injectivity_length(cluster.mps[0]) == 1);

  const MpsTensor a = random_injective_mps(2, 2, 47);
  CHECK(injectivity_length(a).has_value());
}

TEST_CASE("mpu laws: on-site s3 and the bond-2 flip-phase chain") {
  const FiniteGroup s3 = symmetric_group_s3();
  const auto us3 = onsite_mpu(s3, s3_permutation_rep());
  const MpuValidationReport r1 = validate_mpu_representation(us3, s3, 4);
  CHECK(r1.pass(tol::kDefault));

  const FiniteGroup z2 = cyclic_group(2);
  const auto lg = levin_gu_mpu();
  const MpuValidationReport r2 = validate_mpu_representation(lg, z2, 6);
  CHECK(r2.pass(tol::kDefault));

  // Independent dense oracle for the nontrivial chain.
  for (int n = 2; n <= 5; ++n) {
    const Mat u = dense_operator(lg[1], n);
    CHECK(residual_norm(u - flip_phase_chain(n)) < tol::kExactish);
    CHECK(residual_norm(u * u - identity(1 << n)) < tol::kExactish);
  }
}

TEST_CASE("trace-path validation certifies long windows") {
  // 2^9 = 512 exceeds the dense range, so window 9 goes through the
  // transfer-trace formulas. Those subtract near-equal large traces, which
  // bounds their certification floor near sqrt(eps), not eps.
  const auto lg = levin_gu_mpu();
  const FiniteGroup z2 = cyclic_group(2);
  const MpuValidationReport r = validate_mpu_representation(lg, z2, 9);
  CHECK(r.pass(1e-6));
  CHECK(r.checked_up_to == 9);
}

TEST_CASE("multiplet law for the ghz pair") {
  const SymmetricModel m = ghz_model();
  const MultipletValidationReport rep =
      validate_symmetric_multiplet(m.mps, m.mpo, m.gset, m.group, 5);
  CHECK(rep.pass(tol::kDefault));

  // Breaking one tensor breaks the law.
  SymmetricModel bad = ghz_model();
  bad.mps[1][0] = Mat::Constant(1, 1, 1.0);
  const MultipletValidationReport rbad =
      validate_symmetric_multiplet(bad.mps, bad.mpo, bad.gset, bad.group, 3);
  CHECK(!rbad.pass(1e-3));
}

TEST_CASE("conjugate gauge links the conjugate chain to the inverse") {
  // On-site real representation: the gauge is trivial.
  const FiniteGroup z2 = cyclic_group(2);
  const auto uz2 = onsite_mpu(z2, z2_flip_rep());
  const ConjugateGauge triv = conjugate_gauge(uz2[1], uz2[1]);
  CHECK(triv.residual < tol::kDefault);
  CHECK(residual_norm(triv.v - identity(1)) < 1e-9);

  // S3 3-cycles: conjugate of the chain is the chain of the inverse element.
  const FiniteGroup s3 = symmetric_group_s3();
  const auto us3 = onsite_mpu(s3, s3_permutation_rep());
  for (int g = 0; g < 6; ++g) {
    const ConjugateGauge cg = conjugate_gauge(us3[g], us3[s3.inv(g)]);
    CHECK(cg.residual < tol::kDefault);
  }

  // And for the bond-dimension-2 chain (an involution, so g^{-1} = g).
  const auto lg = levin_gu_mpu();
  const ConjugateGauge cg2 = conjugate_gauge(lg[1], lg[1]);
  CHECK(cg2.residual < tol::kDefault);
}
