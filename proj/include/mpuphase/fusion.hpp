#pragma once

#include <map>
#include <utility>
#include <vector>

#include "mpuphase/common.hpp"
#include "mpuphase/group.hpp"
#include "mpuphase/tensors.hpp"
#include "mpuphase/transfer.hpp"

namespace mpuphase {

// Certified boundary tiles turning a stacked chain into a target chain:
//
//   target^(n) = w . stack^(n) . v   for every window n >= this->window,
//
// where stack^(n) is the n-site chain of the stacked sites with open bond
// indices and target^(n) the same for the target sites.  `v` embeds the
// target bond into the stack bond at the right end (stack_bond x target_bond),
// `w` projects it back out at the left end (target_bond x stack_bond);
// w.v = identity on the target bond.  `lambda` is the per-site leading
// eigenvalue of the mixed transfer (the physical dimension for unitary
// targets, 1 for state targets).  The residuals certify the replacement at
// `window` (a positive length):
//   - nilpotency: v.w acts as the identity inside any chain of >= window
//     sites on each side;
//   - dressing: Frobenius distance between target^(window) and the replaced
//     chain, relative to ||target^(window)||;
//   - zipper: worst relative defect of w.stack_j = target_j.w against a
//     dressed tail of window..window+2 sites.
// All three are trace-form certificates and bottom out near sqrt(eps).
struct ChainReplacementPair {
  Mat v;
  Mat w;
  Complex lambda{0.0, 0.0};
  double gap = 0.0;
  int window = 0;
  double nilpotency_residual = 0.0;
  double dressing_residual = 0.0;
  double zipper_residual = 0.0;
};

// Relative defect of target^(n) = w . stack^(n) . v in the open-chain
// Frobenius inner product, computed on the bond space.
double dressing_residual(const ChainReplacementPair& pair,
                         const TransferOperator& mixed,
                         const TransferOperator& stack_self,
                         const TransferOperator& target_self, int n);

// Relative defect of sliding the left tile through one site against an
// m-site dressed tail.  Throws ValidationError when w.v deviates from the
// identity (invalidated pair).
double zipper_residual(const ChainReplacementPair& pair,
                       const TransferOperator& mixed,
                       const TransferOperator& stack_self, int tail);

// Computes the certified tile pair for stack -> target.  `mixed` must be the
// (stack, target) transfer, `stack_self` / `target_self` the respective
// self-transfers, and `rho_target` the left fixed point used to back-solve
// the left tile.  Throws SpectrumError when the mixed transfer has no
// uniquely-leading eigenvalue, ValidationError when the leading eigenvalue
// deviates from `expected_lambda`, and CapError when no window up to
// tol::kLengthCap certifies the replacement.
ChainReplacementPair chain_replacement(const TransferOperator& mixed,
                                       const TransferOperator& stack_self,
                                       const TransferOperator& target_self,
                                       const Mat& rho_target,
                                       Complex expected_lambda);

// u_g stacked over u_h, replaced by u_gh.  lambda = physical dimension.
ChainReplacementPair fusion_pair(const MpoTensor& u_g, const MpoTensor& u_h,
                                 const MpoTensor& u_gh);

// conj(u_g) row applied to the state at x, replaced by the state at xg;
// realizes adjoint-row covariance of a symmetric multiplet.  lambda = 1.
ChainReplacementPair action_pair(const MpoTensor& u_g, const MpsTensor& a_x,
                                 const MpsTensor& a_xg);

// u_g row applied to the state at xg, replaced by the state at x.  lambda = 1.
ChainReplacementPair absorption_pair(const MpoTensor& u_g,
                                     const MpsTensor& a_xg,
                                     const MpsTensor& a_x);

// Proportionality test between two left tiles (or two right tiles) for the
// same stack -> target replacement, in the inner product induced by an
// m-site dressed chain.  `ratio` is the least-squares lambda with a = lambda.b;
// `residual` the relative distance of a from the span of b.
struct TileComparison {
  Complex ratio{0.0, 0.0};
  double residual = 0.0;
};

// Left tiles are target_bond x stack_bond (the `w` members); right tiles are
// stack_bond x target_bond (the `v` members).
TileComparison compare_left_tiles(const Mat& w_a, const Mat& w_b,
                                  const TransferOperator& stack_self, int m);
TileComparison compare_right_tiles(const Mat& v_a, const Mat& v_b,
                                   const TransferOperator& stack_self, int m);

// Lazy store of every tile pair attached to one symmetric tensor pair
// (representation u over multiplet a).  Identity-argument pairs are exact:
// stacking the trivial one-dimensional factor leaves the sites untouched, so
// their tiles are identity matrices with zero-width certificates.
class PairCache {
 public:
  PairCache(FiniteGroup group, GSet gset, std::vector<MpoTensor> mpo,
            std::vector<MpsTensor> mps);
  // Representation-only cache; action/absorption pairs are unavailable.
  PairCache(FiniteGroup group, std::vector<MpoTensor> mpo);

  const FiniteGroup& group() const { return group_; }
  const GSet& gset() const { return gset_; }
  const MpoTensor& mpo(int g) const { return mpo_.at(g); }
  const MpsTensor& mps(int x) const { return mps_.at(x); }

  const ChainReplacementPair& fusion(int g, int h);
  const ChainReplacementPair& action(int x, int g);
  const ChainReplacementPair& absorption(int x, int g);

  // Injectivity lengths (memoized); throw when the cap is exceeded.
  int mpo_injectivity(int g);
  int mps_injectivity(int x);

  // Largest certified window over all |G|^2 fusion pairs (forces them).
  int max_fusion_window();
  // Largest window among the pairs computed so far.
  int max_window_seen() const { return max_window_seen_; }

 private:
  FiniteGroup group_;
  GSet gset_;
  std::vector<MpoTensor> mpo_;
  std::vector<MpsTensor> mps_;
  std::map<std::pair<int, int>, ChainReplacementPair> fusion_;
  std::map<std::pair<int, int>, ChainReplacementPair> action_;
  std::map<std::pair<int, int>, ChainReplacementPair> absorption_;
  std::map<int, int> mpo_injectivity_;
  std::map<int, int> mps_injectivity_;
  int max_window_seen_ = 0;
};

}  // namespace mpuphase
