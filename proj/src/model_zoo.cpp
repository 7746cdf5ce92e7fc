#include "mpuphase/model_zoo.hpp"

#include <array>
#include <cmath>

#include "mpuphase/validate.hpp"

namespace mpuphase {

std::vector<MpoTensor> onsite_mpu(const FiniteGroup& g, const std::vector<Mat>& rep) {
  if (static_cast<int>(rep.size()) != g.order())
    throw ValidationError("onsite_mpu: one matrix per group element");
  const int d = static_cast<int>(rep.front().rows());
  for (int a = 0; a < g.order(); ++a)
    for (int b = 0; b < g.order(); ++b)
      if ((rep[a] * rep[b] - rep[g.mult(a, b)]).norm() > 1e-12)
        throw ValidationError("onsite_mpu: matrices do not form a representation");
  std::vector<MpoTensor> out;
  out.reserve(rep.size());
  for (const Mat& m : rep) {
    if (m.rows() != d || m.cols() != d || (m * m.adjoint() - identity(d)).norm() > 1e-12)
      throw ValidationError("onsite_mpu: matrices must be unitary and equal-sized");
    out.push_back(onsite_mpo(m));
  }
  return out;
}

std::vector<Mat> s3_permutation_rep() {
  const FiniteGroup s3 = symmetric_group_s3();
  // Reconstruct the permutations in the element order of symmetric_group_s3:
  // lexicographic images of (0,1,2).
  std::vector<std::array<int, 3>> perms = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                           {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<Mat> rep;
  rep.reserve(perms.size());
  for (const auto& p : perms) {
    Mat m = Mat::Zero(3, 3);
    for (int j = 0; j < 3; ++j) m(p[j], j) = 1.0;
    rep.push_back(std::move(m));
  }
  // Sanity: matches the group's composition.
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      if ((rep[a] * rep[b] - rep[s3.mult(a, b)]).norm() > 0)
        throw Error("s3_permutation_rep: element order drifted from the group table");
  return rep;
}

std::vector<Mat> z2_flip_rep() {
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  return {identity(2), x};
}

std::vector<Mat> k4_two_qubit_rep() {
  Mat x(2, 2);
  x << 0, 1, 1, 0;
  const Mat eye = identity(2);
  // direct_product index layout: (a, b) -> a*2 + b; first factor on the left qubit.
  return {kron(eye, eye), kron(eye, x), kron(x, eye), kron(x, x)};
}

std::vector<MpoTensor> levin_gu_mpu() {
  // u[o,i](b,b') = i * [o = 1-i] * [b' = i] * (-1)^(b i); the scalar i makes
  // every finite-window chain square to the identity exactly.
  const Complex im(0.0, 1.0);
  MpoTensor u(2, 2);
  for (int i = 0; i < 2; ++i) {
    const int o = 1 - i;
    Mat m = Mat::Zero(2, 2);
    for (int b = 0; b < 2; ++b) m(b, i) = im * ((b & i) ? -1.0 : 1.0);
    u.at(o, i) = m;
  }
  return {identity_mpo(2), u};
}

SymmetricModel cluster_state_model() {
  // Unblocked site: A^s(b,b') = 2^{-1/2} [b' = s] (-1)^(b s); two-site blocks
  // make the on-site two-flip symmetry act homogeneously.
  MpsTensor site(2, 2);
  for (int s = 0; s < 2; ++s) {
    Mat m = Mat::Zero(2, 2);
    for (int b = 0; b < 2; ++b) m(b, s) = ((b & s) ? -1.0 : 1.0) / std::sqrt(2.0);
    site[s] = m;
  }
  SymmetricModel model;
  model.group = direct_product(cyclic_group(2), cyclic_group(2));
  model.gset = singleton_gset(model.group);
  model.mpo = onsite_mpu(model.group, k4_two_qubit_rep());
  model.mps = {block(site, 2)};
  return model;
}

SymmetricModel ghz_model() {
  MpsTensor up(2, 1), down(2, 1);
  up[0] = Mat::Constant(1, 1, 1.0);
  up[1] = Mat::Constant(1, 1, 0.0);
  down[0] = Mat::Constant(1, 1, 0.0);
  down[1] = Mat::Constant(1, 1, 1.0);

  SymmetricModel model;
  model.group = cyclic_group(2);
  model.gset = regular_gset(model.group);
  model.mpo = onsite_mpu(model.group, z2_flip_rep());
  model.mps = {std::move(up), std::move(down)};
  return model;
}

SymmetricModel product_plus_model() {
  MpsTensor plus(4, 1);
  for (int j = 0; j < 4; ++j) plus[j] = Mat::Constant(1, 1, 0.5);

  SymmetricModel model;
  model.group = direct_product(cyclic_group(2), cyclic_group(2));
  model.gset = singleton_gset(model.group);
  model.mpo = onsite_mpu(model.group, k4_two_qubit_rep());
  model.mps = {std::move(plus)};
  return model;
}

MpsTensor random_injective_mps(int phys, int bond, std::uint64_t seed) {
  std::uint64_t s = seed;
  for (int attempt = 0; attempt < 16; ++attempt) {
    RandomStream rng(s);
    MpsTensor a(phys, bond);
    for (int j = 0; j < phys; ++j)
      for (int r = 0; r < bond; ++r)
        for (int c = 0; c < bond; ++c) a[j](r, c) = rng.gaussian_complex();
    try {
      CanonicalMps canon = right_canonicalize(a);
      if (injectivity_length(canon.a).has_value()) return canon.a;
    } catch (const SpectrumError&) {
      // fall through to the next derived seed
    }
    s += 0x9e3779b97f4a7c15ull;
  }
  throw Error("random_injective_mps: no injective sample after bounded retries");
}

}  // namespace mpuphase
