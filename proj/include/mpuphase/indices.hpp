#pragma once

#include "mpuphase/cohomology.hpp"
#include "mpuphase/fusion.hpp"
#include "mpuphase/model_zoo.hpp"
#include "mpuphase/validate.hpp"

namespace mpuphase {

// Associativity phase of the fusion tiles: the two ways of embedding the
// fused bond of u(ghk) into the triple stack bond,
//
//   (1_g x v(h,k)) . v(g,hk)  =  omega(g,h,k) . (v(g,h) x 1_k) . v(gh,k),
//
// are proportional, and the proportionality table is a 3-cocycle whose class
// is invariant under every admissible tile rescaling.  Identity arguments
// give exactly 1 (identity tiles are hard-set).  The ratio is extracted by
// least squares in the Gram metric of an m-site dressed chain.
struct OmegaReport {
  PhaseTable3 omega;
  double parallelism_residual = 0.0;  // worst misalignment of the composites
  double unit_drift = 0.0;            // worst | |ratio| - 1 | before renormalizing
  double cocycle_residual = 0.0;      // worst defect of the 3-cocycle identity
};

OmegaReport extract_omega(PairCache& cache);

// Exchange phase between absorbing u(g) then u(h) into the multiplet and
// absorbing the fused row u(gh):
//
//   (1_g x v~(xg,h)) . v~(x,g)  =  sigma_x(g,h) . (v(g,h) x 1_xgh) . v~(x,gh),
//
// where v~ are the absorption tiles.  Together with omega the family
// satisfies the twisted 2-cocycle (pentagon) identity.
struct SigmaReport {
  PhaseTable2Family sigma;
  double parallelism_residual = 0.0;
  double unit_drift = 0.0;
};

SigmaReport extract_sigma_hat(PairCache& cache);

// Classification output: the unbroken subgroup, the anomaly 3-cocycle of the
// representation, the multiplet 2-cocycle family, and the family restricted
// to the unbroken subgroup as a plain projective class, together with every
// certificate needed to re-check the claim without rerunning eigensolves.
struct PhaseLabel {
  Subgroup unbroken;
  OmegaReport omega;
  SigmaReport sigma;
  RestrictedSigma restricted;
  double pentagon_residual = 0.0;
  double validation_residual = 0.0;  // worst representation/covariance defect
  int max_window = 0;                // largest certified tile window used
};

// Full pipeline: representation and multiplet validation, tile extraction,
// omega and sigma tables, pentagon check, restriction to the unbroken
// subgroup.  Any stage failure throws with the stage name in the message.
PhaseLabel classify(const SymmetricModel& model, int validation_window = 4);

}  // namespace mpuphase
