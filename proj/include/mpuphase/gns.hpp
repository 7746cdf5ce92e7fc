#pragma once

#include <vector>

#include "mpuphase/automorphism.hpp"
#include "mpuphase/common.hpp"
#include "mpuphase/fusion.hpp"
#include "mpuphase/tensors.hpp"

namespace mpuphase {

// Finite window [0, n) of the half-infinite chain built on a right-canonical
// site tensor.  Vectors live in (C^d)^n (x) M_D with the inner product
//
//   <v (x) m, w (x) p> = <v, w> tr(m^dagger rho p),
//
// where rho is a positive trace-one left fixed point of the tensor's transfer
// map.  Appending sites on the right with the tensor itself is then an exact
// isometry, which makes the window family one Hilbert space in the limit.
struct WindowHilbert {
  int x = 0;      // multiplet member the tensor belongs to
  int sites = 0;  // window length n
  int phys = 1;   // d
  int bond = 1;   // D
  MpsTensor a;    // defining right-canonical tensor
  Mat rho;        // metric weight on the left (chain-edge) bond

  long dim() const {
    long r = static_cast<long>(bond) * bond;
    for (int t = 0; t < sites; ++t) r *= phys;
    return r;
  }
};

// Coordinates over (physical^n, bond, bond): flat index ((s*D + a)*D + b)
// with s the physical string (site 0 most significant), a the metric-weighted
// left bond and b the right bond.
struct WindowVector {
  Vec data;
};

// Dense linear map between two windows (target dim x source dim rectangle).
struct WindowMap {
  WindowHilbert source;
  WindowHilbert target;
  Mat m;
};

// Builds the window over multiplet member x with rho computed from the
// tensor's own transfer map.  Throws ValidationError when the tensor is not
// right-canonical and SpectrumError when the transfer spectrum is degenerate
// (supply rho explicitly in that case).
WindowHilbert window_space(PairCache& pairs, int x, int sites);

// Same window on an explicitly supplied metric: rho must be hermitian,
// positive, trace one, and a left fixed point of the tensor.  This is the
// entry point for non-injective tensors, where the boundary weight is a
// choice rather than a computation.
WindowHilbert window_space(const MpsTensor& a, const Mat& rho, int sites, int x = 0);

Complex window_inner(const WindowHilbert& h, const WindowVector& psi,
                     const WindowVector& chi);
double window_norm(const WindowHilbert& h, const WindowVector& psi);
// Gram image of psi: rho applied on the left bond row, identity elsewhere.
WindowVector metric_image(const WindowHilbert& h, const WindowVector& psi);

// The chain vector: string s carries the bond matrix A_{s_0} ... A_{s_{n-1}}.
// Its inner products reproduce the state functional on the window.
WindowVector omega_vector(const WindowHilbert& h);

// Gaussian vector normalized to one in the window metric.
WindowVector random_window_vector(const WindowHilbert& h, RandomStream& rng);

// Isometry H^(n) -> H^(m) over the same tensor, appending sites on the right;
// m >= n, and m = n gives the identity.  Embeds compose exactly:
// embed(m) of embed(k) equals embed(m) of the smaller window.
WindowMap embed(const WindowHilbert& from, int m);

// Image of a window vector under a map (dimension-checked).
WindowVector apply(const WindowMap& f, const WindowVector& psi);
// Composition g . f with matching inner window.
WindowMap compose(const WindowMap& g, const WindowMap& f);

// On-window representation of a local operator: O on its support, identity
// on the remaining sites and on both bond factors.  The support must fit in
// [0, n); the matrix is materialized, so the window dimension is capped at
// tol::kDenseEigenMaxDim (ResourceError beyond).
WindowMap represent(const WindowHilbert& h, const WindowOperator& o);

// Columnwise image of `cols` under the represented operator; no square
// matrix is formed, so this works at window sizes `represent` refuses.
Mat represent_apply(const WindowHilbert& h, const WindowOperator& o, const Mat& cols);

// Expectation of a local operator in the half-infinite state:
//   sum_{t',t} O[t',t] tr(A_{t'}^dagger rho A_t)
// over the support strings; sites left of the support are absorbed by the
// fixed-point property, sites right of it by right-canonicality.
Complex state_expectation(const MpsTensor& a, const Mat& rho, const WindowOperator& o);

// Window growth consumed by the boundary dressing of u/w: the larger of the
// action and absorption tile windows of (x, g) plus the larger injectivity
// length of the two multiplet members involved.
int u_margin(PairCache& pairs, int x, int g);

// Symmetry implementers between multiplet windows, boundary-dressed with the
// action/absorption tiles:
//   w_window(x, g): H_x^(n) -> H_{x.g}^(m), conjugate row over the window,
//   u_window(x, g): H_{x.g}^(n) -> H_x^(m), straight row over the window.
// Both require m - n >= u_margin (ValidationError names the minimum).  The
// overall scale of w is fixed by the norm identity ||w psi|| = ||psi||
// (five-sample average; the sample spread is certified), the scale of u by
// metric adjointness against w, making the inverse laws u.w = embed and
// w.u = embed genuine checks rather than normalizations.
WindowMap w_window(PairCache& pairs, int x, int g, int m, int n);
WindowMap u_window(PairCache& pairs, int x, int g, int m, int n);

// Half-infinite conjugation by the symmetry: the straight row over the
// operator, the conjugate row under it, joined by the bond pairing at the
// chain edge and couple-tiled on the right.  The support grows right by
// beta_edge_margin sites only; the scale is fixed by unitality.  Requires
// the identity representation tensor to have bond one.
int beta_edge_margin(PairCache& pairs, int g);
WindowOperator beta_edge_window(PairCache& pairs, int g, const WindowOperator& o);

// Window triple n <= m <= k used by the lemma checks; zero fields are
// replaced by the defaults (n = injectivity + 1, then margin steps).
struct LemmaWindows {
  int n = 0, m = 0, k = 0;
};

// Residuals of the structural laws tying u/w to the embeds, all relative:
//   zipper:       u^(k,m) embed = embed u^(m,n) (and the same for w),
//   adjointness:  <embed psi, u chi> = <w psi, embed chi>,
//   inverse:      u^(k,m) w^(m,n) = embed^(k,n) and w u likewise,
//   conjugation:  u pi(O) w = embed pi(beta_edge(O)) embed on random local O,
//   composition:  u_g^(k,m) u_h^(m,n) = sigma' pi(v(g,h)) u_gh^(k,n),
// with sigma' the least-squares unit scalar of the composition law.
struct UwLemmaReport {
  LemmaWindows windows;
  double zipper_u = 0.0;
  double zipper_w = 0.0;
  double adjointness = 0.0;
  double inverse_uw = 0.0;
  double inverse_wu = 0.0;
  double conjugation = 0.0;
  double composition = 0.0;
  Complex sigma_prime{1.0, 0.0};
  double sigma_modulus_drift = 0.0;
  double lambda_spread = 0.0;  // worst norm-identity spread among the maps built

  double max_residual() const;
  bool pass(double tolerance) const { return max_residual() < tolerance; }
};

// Runs every law above for the triple (x, g, h).  Throws ValidationError
// naming the first law whose residual exceeds tol::kParallel.
UwLemmaReport verify_u_lemmas(PairCache& pairs, int x, int g, int h,
                              LemmaWindows windows = {});

// sigma' over the whole family from the composition law at the default
// windows; phase-comparable against the absorption-tile family through the
// coboundary solver (same class, not the same table).
struct SigmaPrimeReport {
  PhaseTable2Family sigma_prime;
  double worst_residual = 0.0;
  double worst_modulus_drift = 0.0;
};
SigmaPrimeReport sigma_prime_table(PairCache& pairs, LemmaWindows windows = {});

}  // namespace mpuphase
