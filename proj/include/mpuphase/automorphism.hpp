#pragma once

#include <cstdint>
#include <map>

#include "mpuphase/cohomology.hpp"
#include "mpuphase/fusion.hpp"

namespace mpuphase {

// Dense operator on the chain sites [left, left + width - 1]; the leftmost
// site is the most significant index digit, matching the chain conventions.
// width is stored (not derived) so the one-dimensional physical space works.
struct WindowOperator {
  int left = 0;
  int phys = 0;
  int width = 0;
  Mat mat;

  int sites() const { return width; }
  int right() const { return left + width - 1; }
};

WindowOperator identity_window(int phys, int left, int sites);
// Unit-Frobenius operator with iid gaussian entries.
WindowOperator random_window(int phys, int left, int sites, RandomStream& rng);

// Tensor with identities so the support becomes exactly [left, right].
WindowOperator embed(const WindowOperator& x, int left, int right);

// Pointwise algebra on the union support; all shrink-free.
WindowOperator window_product(const WindowOperator& a, const WindowOperator& b);
WindowOperator window_adjoint(const WindowOperator& a);
// Frobenius distance after embedding both into the union support.
double window_distance(const WindowOperator& a, const WindowOperator& b);
// Largest singular value.
double operator_norm(const Mat& m);

// Certified margin below which the sandwiched conjugation is not exact: the
// window of the (g, g^{-1}) fusion pair.
int beta_margin(PairCache& pairs, int g);

// Conjugation by the symmetry on a finite window: the u(g) row over x, the
// u(g^{-1}) row under it, boundary-tiled with the (g, g^{-1}) fusion pair.
// Margins count sites added on each side and must reach beta_margin; the
// result is margin-stable and lives on the padded support.
WindowOperator beta_window(PairCache& pairs, int g, const WindowOperator& x,
                           int left_margin, int right_margin);

// Worst residuals of the algebra-automorphism laws over sampled group pairs
// and random local operators: unitality, multiplicativity, *-preservation,
// composition beta_g . beta_h = beta_gh on aligned supports, contractivity
// in operator norm, and positivity on random positive inputs.
struct AutomorphismLawReport {
  double unital = 0.0;
  double multiplicative = 0.0;
  double star = 0.0;
  double composition = 0.0;
  double contraction_excess = 0.0;
  double positivity = 0.0;

  double max_residual() const;
  bool pass(double tolerance) const { return max_residual() < tolerance; }
};

AutomorphismLawReport check_automorphism_laws(PairCache& pairs, int samples,
                                              std::uint64_t seed = 11);

// Two-cut split of the blocked tensor of u(g): the output-side cut carries
// pieces (z, v), the input-side cut pieces (x, y), reorthonormalized so that
//   x weighted by (1 (x) rho) is an isometry,   v is a plain isometry,
// which by the fixed-point structure forces the complementary Grams
//   y^dag y = 1   and   z^dag (1 (x) rho_hat) z = 1
// (recorded in gram_residual).  w is the unitary carrying the action on the
// two blocks adjacent to the cut; x/v seed the left/right half-chain tails.
struct LocalDecomposition {
  int g = 0;
  int block = 0;      // sites per cut piece
  int left_rank = 0;  // output-side cut rank, = d^block
  int right_rank = 0; // input-side cut rank, = d^block
  Mat rho;            // boundary weight of the u(g) row (positive, trace 1)
  Mat rho_hat;        // boundary weight of the adjoint row
  Mat x_piece;        // (d^block * D) x d^block, rows (input, left bond)
  Mat y_piece;        // (d^block * D) x d^block, rows (output, right bond)
  Mat z_piece;        // (d^block * D) x d^block, rows (output, left bond)
  Mat v_piece;        // (d^block * D) x d^block, rows (input, right bond)
  Mat w;              // d^{2 block} x d^{2 block}, unitary
  double w_unitarity = 0.0;
  double gram_residual = 0.0;
  double gauge_conditioning = 1.0;  // smallest alignment singular value
  double boundary_gap = 0.0;         // subleading/leading boundary eigenvalue
  double reassembly_residual = -1.0; // self-check against beta_window;
                                     // -1 when skipped for window size
};

// Splits block(u(g), block) at both cuts, verifies the cut ranks equal
// d^block, reorthonormalizes against the boundary weights, and assembles w.
// Throws ValidationError when a cut rank is off (block too short) or a Gram
// matrix fails to be positive definite.
LocalDecomposition build_local_decomposition(PairCache& pairs, int g, int block);

// Default block length: one past the largest certified fusion window.
int default_block(PairCache& pairs);

// Memoized per-element decompositions at a fixed block length.
class DecompositionCache {
 public:
  DecompositionCache(PairCache& pairs, int block);
  const LocalDecomposition& get(int g);
  int block() const { return block_; }
  PairCache& pairs() { return *pairs_; }

 private:
  PairCache* pairs_;
  int block_;
  std::map<int, LocalDecomposition> made_;
};

// Half-chain realizations of the conjugation across the cut between sites 0
// and 1.  tail_right takes x supported on sites >= 1, tail_left on sites
// <= 0; `margin` far-side sites are appended (margin >= beta_margin).  The
// far end closes through rho (left) or a plain bond turn (right); the cut
// end closes through the x/v piece with its Schmidt leg read as the block
// sites.
WindowOperator tail_right(PairCache& pairs, const LocalDecomposition& dec,
                          const WindowOperator& x, int margin);
WindowOperator tail_left(PairCache& pairs, const LocalDecomposition& dec,
                         const WindowOperator& x, int margin);

// w-conjugated tensor product of the two tails after an operator Schmidt
// split of x across the cut; equals beta_window with margins `margin` on the
// common support.
WindowOperator reassemble_beta(PairCache& pairs, const LocalDecomposition& dec,
                               const WindowOperator& x, int margin);

// Boundary unitary joining the fused double row (g over h) to the u(gh) row
// on the half chain [1, window]: the two half-rows are capped with the
// (g, h) fusion tile on the far side and their cut-side wall pieces, and the
// gh row is absorbed by adjoint.  Unitary on its support; equals the
// identity when either argument is the identity element.
WindowOperator v_operator(DecompositionCache& decos, int g, int h, int window);

// Scalar and parallelism residual of the half-chain cocycle relation
//   beta_{g,R}(v(h,k)) v(g, hk) = c(g,h,k) . v(g,h) v(gh,k).
struct OperatorCocycle {
  Complex value{1.0, 0.0};
  double residual = 0.0;
  double modulus_drift = 0.0;
};

OperatorCocycle check_operator_cocycle(DecompositionCache& decos, int g, int h,
                                       int k, int window);

// Full table over the group (identity arguments hard-set to 1), with the
// worst parallelism residual and the worst 3-cocycle defect of the table.
struct OperatorCocycleReport {
  PhaseTable3 table;
  double parallelism_residual = 0.0;
  double unit_drift = 0.0;
  double cocycle_residual = 0.0;
};

OperatorCocycleReport operator_cocycle_table(DecompositionCache& decos, int window);

}  // namespace mpuphase
