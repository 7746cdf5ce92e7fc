#pragma once

#include <vector>

#include "mpuphase/common.hpp"
#include "mpuphase/tensors.hpp"

namespace mpuphase {

// Completely positive transfer map between two site-tensor rows,
//   apply(Y)         = sum_k  top[k] Y bot[k]^dagger   (P x Q -> P x Q),
//   apply_adjoint(Y) = sum_k  top[k]^dagger Y bot[k],
// with P the top bond and Q the bottom bond. The same-row case (top == bot)
// is the usual MPS/MPU transfer operator; mixed rows carry the intertwiner
// eigenproblems.
class TransferOperator {
 public:
  TransferOperator(std::vector<Mat> top, std::vector<Mat> bot);

  static TransferOperator mps(const MpsTensor& a) { return mps_pair(a, a); }
  static TransferOperator mps_pair(const MpsTensor& top, const MpsTensor& bot);
  static TransferOperator mpo(const MpoTensor& u) { return mpo_pair(u, u); }
  static TransferOperator mpo_pair(const MpoTensor& top, const MpoTensor& bot);

  int terms() const { return static_cast<int>(top_.size()); }
  int top_bond() const { return p_; }
  int bot_bond() const { return q_; }
  const Mat& top(int k) const { return top_[k]; }
  const Mat& bot(int k) const { return bot_[k]; }

  Mat apply(const Mat& y) const;
  Mat apply_adjoint(const Mat& y) const;

  // Matrix of `apply` on column-major vec(Y): sum_k conj(bot[k]) (x) top[k].
  Mat dense() const;

 private:
  std::vector<Mat> top_, bot_;
  int p_ = 0, q_ = 0;
};

// tr of the n-th power of the map (trace over the P*Q matrix space).
Complex chain_trace(const TransferOperator& t, int n);

// Leading and subleading eigenpair data of a square-bond transfer map.
struct FixedPointPair {
  Complex lambda;  // leading eigenvalue of `apply`
  double gap;      // |lambda_2 / lambda_1|
  Mat left;        // apply_adjoint fixed point, normalized tr(left*right) = 1
  Mat right;       // apply fixed point, normalized tr(right) = bond dim
};

// Computes the pair by dense eigensolve when P*Q <= dense_max_dim and by
// two-vector subspace iteration beyond. Throws SpectrumError when the two
// largest eigenvalue magnitudes coincide within tol::kDegenerate (relative).
FixedPointPair leading_fixed_points(const TransferOperator& t,
                                    int dense_max_dim = tol::kDenseEigenMaxDim);

// Leading eigenvectors of a mixed transfer map, phase- and scale-fixed so
// that v * w = identity on the bottom bond space:
//   apply(w) = lambda w            (w: P x Q),
//   sum_k bot[k]^dagger z top[k] = lambda z with v = rho_bot^{-1} z (v: Q x P).
// `rho_bot` is the left fixed point of the bottom row's own transfer map.
struct IntertwinerTiles {
  Mat v, w;
  Complex lambda;
  double gap;
};
IntertwinerTiles leading_intertwiner(const TransferOperator& mixed, const Mat& rho_bot,
                                     int dense_max_dim = tol::kDenseEigenMaxDim);

}  // namespace mpuphase
