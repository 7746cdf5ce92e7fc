#pragma once

#include <cstdint>
#include <vector>

#include "mpuphase/group.hpp"
#include "mpuphase/tensors.hpp"

namespace mpuphase {

// A ready-to-classify bundle: symmetry group, orbit of ground states, one MPU
// per group element and one right-canonical MPS per orbit point.
struct SymmetricModel {
  FiniteGroup group;
  GSet gset;
  std::vector<MpoTensor> mpo;
  std::vector<MpsTensor> mps;
};

// Bond-dimension-1 MPUs of an on-site unitary representation (one matrix per
// group element, U(g)U(h) = U(gh)).
std::vector<MpoTensor> onsite_mpu(const FiniteGroup& g, const std::vector<Mat>& rep);

// Permutation matrices matching symmetric_group_s3's element order.
std::vector<Mat> s3_permutation_rep();
// {1, X} on one qubit.
std::vector<Mat> z2_flip_rep();
// {1, 1(x)X, X(x)1, X(x)X} on a two-qubit site, matching
// direct_product(cyclic_group(2), cyclic_group(2)) element order.
std::vector<Mat> k4_two_qubit_rep();

// Bond-dimension-2 MPU pair {identity, V} on one qubit with V_n^2 = 1 for
// every window length; V_n acts as a product of on-site spin flips and
// nearest-neighbour phase gates. The nontrivial chain cannot be generated by
// any on-site unitary.
std::vector<MpoTensor> levin_gu_mpu();

// Two-qubit-blocked 1d cluster state with its full (unbroken) two-flip
// symmetry on a singleton orbit.
SymmetricModel cluster_state_model();

// Two-fold degenerate GHZ pair |0..0>, |1..1> with the flip symmetry acting
// regularly on the orbit.
SymmetricModel ghz_model();

// Product |+> pair state carrying the same two-flip symmetry trivially.
SymmetricModel product_plus_model();

// Deterministic random right-canonical injective MPS.
MpsTensor random_injective_mps(int phys, int bond, std::uint64_t seed);

}  // namespace mpuphase
