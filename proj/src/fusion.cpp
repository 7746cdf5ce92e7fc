#include "mpuphase/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mpuphase/validate.hpp"

namespace mpuphase {

namespace {

// m-fold dressed Gram weights on the stack bond: G_m = adj^m(1), H_m = fwd^m(1).
// tr[(P-1)^* G_m (P-1) H_m] is the squared norm of the mid-chain defect of
// inserting v.w into a chain with m sites on each side.
double nilpotency_residual_at(const Mat& p, const Mat& g, const Mat& h) {
  const Eigen::Index n = p.rows();
  const Mat d = p - identity(n);
  const double num = std::real((d.adjoint() * g * d * h).trace());
  const double den = std::real((g * h).trace());
  if (den <= 0.0) throw Error("chain replacement: degenerate gram weight");
  return std::sqrt(std::max(0.0, num) / den);
}

ChainReplacementPair exact_identity_pair(Eigen::Index bond, Complex lambda) {
  ChainReplacementPair pair;
  pair.v = identity(bond);
  pair.w = identity(bond);
  pair.lambda = lambda;
  pair.gap = 0.0;
  pair.window = 1;
  return pair;
}

std::pair<int, int> key(int a, int b) { return {a, b}; }

}  // namespace

// ||target^(n) - w.stack^(n).v||^2 / ||target^(n)||^2 in the open-chain
// Frobenius inner product <A,B> = sum over physical strings of tr[A^* B].
double dressing_residual(const ChainReplacementPair& pair,
                         const TransferOperator& mixed,
                         const TransferOperator& stack_self,
                         const TransferOperator& target_self, int n) {
  Mat tacc = identity(target_self.top_bond());
  for (int i = 0; i < n; ++i) tacc = target_self.apply(tacc);
  const double tt = std::real(tacc.trace());
  if (tt <= 0.0) throw Error("chain replacement: target chain has zero norm");
  Mat y = pair.v;
  for (int i = 0; i < n; ++i) y = mixed.apply(y);
  const Complex cross = (pair.w * y).trace();
  Mat z = pair.v * pair.v.adjoint();
  for (int i = 0; i < n; ++i) z = stack_self.apply(z);
  const double ss = std::real((pair.w.adjoint() * pair.w * z).trace());
  const double sq = tt - 2.0 * std::real(cross) + ss;
  return std::sqrt(std::max(0.0, sq) / tt);
}

double zipper_residual(const ChainReplacementPair& pair,
                       const TransferOperator& mixed,
                       const TransferOperator& stack_self, int tail) {
  const Eigen::Index q = pair.w.rows();
  if (residual_norm(pair.w * pair.v - identity(q)) > 1e-8)
    throw ValidationError("zipper check: tile pair does not compose to the identity");
  Mat k = pair.v * pair.v.adjoint();
  for (int i = 0; i < tail; ++i) k = stack_self.apply(k);
  Mat defect = Mat::Zero(k.rows(), k.cols());
  Mat scale = Mat::Zero(k.rows(), k.cols());
  for (int j = 0; j < mixed.terms(); ++j) {
    const Mat x = pair.w * mixed.top(j) - mixed.bot(j) * pair.w;
    const Mat t = mixed.bot(j) * pair.w;
    defect += x.adjoint() * x;
    scale += t.adjoint() * t;
  }
  const double num = std::real((defect * k).trace());
  const double den = std::real((scale * k).trace());
  if (den <= 0.0) throw Error("chain replacement: degenerate zipper scale");
  return std::sqrt(std::max(0.0, num) / den);
}

ChainReplacementPair chain_replacement(const TransferOperator& mixed,
                                       const TransferOperator& stack_self,
                                       const TransferOperator& target_self,
                                       const Mat& rho_target,
                                       Complex expected_lambda) {
  const IntertwinerTiles tiles = leading_intertwiner(mixed, rho_target);
  if (tiles.gap > tol::kGapMax)
    throw SpectrumError("chain replacement: mixed transfer eigenvalue not isolated");
  if (std::abs(tiles.lambda - expected_lambda) >
      1e-8 * std::abs(expected_lambda))
    throw ValidationError("chain replacement: leading eigenvalue " +
                          std::to_string(std::abs(tiles.lambda)) +
                          " deviates from expected value");

  ChainReplacementPair pair;
  pair.w = tiles.v;
  pair.v = tiles.w;
  pair.lambda = tiles.lambda;
  pair.gap = tiles.gap;

  const Eigen::Index pdim = pair.v.rows();
  const Mat proj = pair.v * pair.w;
  Mat g = identity(pdim);
  Mat h = identity(pdim);
  for (int m = 1; m <= tol::kLengthCap; ++m) {
    g = stack_self.apply_adjoint(g);
    h = stack_self.apply(h);
    const double nil = nilpotency_residual_at(proj, g, h);
    if (nil >= tol::kCertificate) continue;
    const double dress =
        dressing_residual(pair, mixed, stack_self, target_self, m);
    if (dress >= tol::kCertificate) continue;
    pair.window = m;
    pair.nilpotency_residual = nil;
    pair.dressing_residual = dress;
    double zip = 0.0;
    for (int tail = m; tail < m + 3; ++tail)
      zip = std::max(zip, zipper_residual(pair, mixed, stack_self, tail));
    if (zip >= tol::kCertificate)
      throw ValidationError("chain replacement: zipper defect " +
                            std::to_string(zip) + " above certificate gate");
    pair.zipper_residual = zip;
    return pair;
  }
  throw CapError("chain replacement: no certified window within length cap");
}

ChainReplacementPair fusion_pair(const MpoTensor& u_g, const MpoTensor& u_h,
                                 const MpoTensor& u_gh) {
  if (u_g.phys() != u_h.phys() || u_g.phys() != u_gh.phys())
    throw ValidationError("fusion pair: physical dimensions differ");
  const MpoTensor stack = mpo_times_mpo(u_g, u_h);
  return chain_replacement(TransferOperator::mpo_pair(stack, u_gh),
                           TransferOperator::mpo(stack),
                           TransferOperator::mpo(u_gh),
                           left_fixed_point(u_gh),
                           Complex(static_cast<double>(u_gh.phys()), 0.0));
}

ChainReplacementPair action_pair(const MpoTensor& u_g, const MpsTensor& a_x,
                                 const MpsTensor& a_xg) {
  if (u_g.phys() != a_x.phys() || u_g.phys() != a_xg.phys())
    throw ValidationError("action pair: physical dimensions differ");
  const MpsTensor stack = mpo_times_mps(dagger(u_g), a_x);
  return chain_replacement(TransferOperator::mps_pair(stack, a_xg),
                           TransferOperator::mps(stack),
                           TransferOperator::mps(a_xg),
                           left_fixed_point(a_xg), Complex(1.0, 0.0));
}

ChainReplacementPair absorption_pair(const MpoTensor& u_g,
                                     const MpsTensor& a_xg,
                                     const MpsTensor& a_x) {
  if (u_g.phys() != a_x.phys() || u_g.phys() != a_xg.phys())
    throw ValidationError("absorption pair: physical dimensions differ");
  const MpsTensor stack = mpo_times_mps(u_g, a_xg);
  return chain_replacement(TransferOperator::mps_pair(stack, a_x),
                           TransferOperator::mps(stack),
                           TransferOperator::mps(a_x),
                           left_fixed_point(a_x), Complex(1.0, 0.0));
}

namespace {

TileComparison tile_comparison(const Mat& gram_ba, const Mat& gram_bb,
                               const Mat& gram_aa) {
  const Complex ba = gram_ba.trace();
  const double bb = std::real(gram_bb.trace());
  const double aa = std::real(gram_aa.trace());
  if (bb <= 0.0 || aa <= 0.0)
    throw Error("tile comparison: degenerate gram");
  TileComparison cmp;
  cmp.ratio = ba / bb;
  cmp.residual = std::sqrt(std::max(0.0, 1.0 - std::norm(ba) / (aa * bb)));
  return cmp;
}

}  // namespace

TileComparison compare_left_tiles(const Mat& w_a, const Mat& w_b,
                                  const TransferOperator& stack_self, int m) {
  Mat h = identity(w_a.cols());
  for (int i = 0; i < m; ++i) h = stack_self.apply(h);
  return tile_comparison(w_b.adjoint() * w_a * h, w_b.adjoint() * w_b * h,
                         w_a.adjoint() * w_a * h);
}

TileComparison compare_right_tiles(const Mat& v_a, const Mat& v_b,
                                   const TransferOperator& stack_self, int m) {
  Mat g = identity(v_a.rows());
  for (int i = 0; i < m; ++i) g = stack_self.apply_adjoint(g);
  return tile_comparison(v_b.adjoint() * g * v_a, v_b.adjoint() * g * v_b,
                         v_a.adjoint() * g * v_a);
}

PairCache::PairCache(FiniteGroup group, GSet gset, std::vector<MpoTensor> mpo,
                     std::vector<MpsTensor> mps)
    : group_(std::move(group)),
      gset_(std::move(gset)),
      mpo_(std::move(mpo)),
      mps_(std::move(mps)) {
  if (static_cast<int>(mpo_.size()) != group_.order())
    throw ValidationError("pair cache: one representation tensor per element required");
  if (!mps_.empty() && static_cast<int>(mps_.size()) != gset_.size())
    throw ValidationError("pair cache: one state tensor per orbit point required");
}

PairCache::PairCache(FiniteGroup group, std::vector<MpoTensor> mpo)
    : PairCache(group, singleton_gset(group), std::move(mpo), {}) {}

const ChainReplacementPair& PairCache::fusion(int g, int h) {
  const auto k = key(g, h);
  auto it = fusion_.find(k);
  if (it != fusion_.end()) return it->second;
  const int e = group_.identity();
  ChainReplacementPair pair;
  if (g == e) {
    pair = exact_identity_pair(mpo_.at(h).bond(),
                               Complex(static_cast<double>(mpo_.at(h).phys()), 0.0));
  } else if (h == e) {
    pair = exact_identity_pair(mpo_.at(g).bond(),
                               Complex(static_cast<double>(mpo_.at(g).phys()), 0.0));
  } else {
    pair = fusion_pair(mpo_.at(g), mpo_.at(h), mpo_.at(group_.mult(g, h)));
  }
  max_window_seen_ = std::max(max_window_seen_, pair.window);
  return fusion_.emplace(k, std::move(pair)).first->second;
}

const ChainReplacementPair& PairCache::action(int x, int g) {
  if (mps_.empty())
    throw ValidationError("pair cache: no multiplet tensors loaded");
  const auto k = key(x, g);
  auto it = action_.find(k);
  if (it != action_.end()) return it->second;
  ChainReplacementPair pair;
  if (g == group_.identity()) {
    pair = exact_identity_pair(mps_.at(x).bond(), Complex(1.0, 0.0));
  } else {
    pair = action_pair(mpo_.at(g), mps_.at(x), mps_.at(gset_.act(x, g)));
  }
  max_window_seen_ = std::max(max_window_seen_, pair.window);
  return action_.emplace(k, std::move(pair)).first->second;
}

const ChainReplacementPair& PairCache::absorption(int x, int g) {
  if (mps_.empty())
    throw ValidationError("pair cache: no multiplet tensors loaded");
  const auto k = key(x, g);
  auto it = absorption_.find(k);
  if (it != absorption_.end()) return it->second;
  ChainReplacementPair pair;
  if (g == group_.identity()) {
    pair = exact_identity_pair(mps_.at(x).bond(), Complex(1.0, 0.0));
  } else {
    pair = absorption_pair(mpo_.at(g), mps_.at(gset_.act(x, g)), mps_.at(x));
  }
  max_window_seen_ = std::max(max_window_seen_, pair.window);
  return absorption_.emplace(k, std::move(pair)).first->second;
}

int PairCache::mpo_injectivity(int g) {
  auto it = mpo_injectivity_.find(g);
  if (it != mpo_injectivity_.end()) return it->second;
  const auto len = injectivity_length(mpo_.at(g));
  if (!len)
    throw ValidationError("pair cache: representation tensor is not injective within the length cap");
  return mpo_injectivity_.emplace(g, *len).first->second;
}

int PairCache::mps_injectivity(int x) {
  auto it = mps_injectivity_.find(x);
  if (it != mps_injectivity_.end()) return it->second;
  const auto len = injectivity_length(mps_.at(x));
  if (!len)
    throw ValidationError("pair cache: state tensor is not injective within the length cap");
  return mps_injectivity_.emplace(x, *len).first->second;
}

int PairCache::max_fusion_window() {
  int window = 0;
  for (int g = 0; g < group_.order(); ++g)
    for (int h = 0; h < group_.order(); ++h)
      window = std::max(window, fusion(g, h).window);
  return window;
}

}  // namespace mpuphase
