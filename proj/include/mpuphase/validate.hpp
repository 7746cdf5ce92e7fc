#pragma once

#include <optional>
#include <vector>

#include "mpuphase/group.hpp"
#include "mpuphase/tensors.hpp"
#include "mpuphase/transfer.hpp"

namespace mpuphase {

// ‖sum_j a_j a_j† − 1‖  /  ‖sum_{oi} u_oi u_oi† − d·1‖, in the shared norm policy.
double canonical_residual(const MpsTensor& a);
double canonical_residual(const MpoTensor& u);

// Trace-1 Hermitian rho with sum_j a_j† rho a_j = rho (resp. = d·rho for MPU).
Mat left_fixed_point(const MpsTensor& a);
Mat left_fixed_point(const MpoTensor& u);

struct CanonicalMps {
  MpsTensor a;      // gauge-transformed tensor, sum a a† = 1
  Mat rho;          // its left fixed point
  double residual;  // canonical residual after the transformation
};
// Rescales and gauges an injective MPS tensor into right-canonical form.
// Throws SpectrumError when the transfer spectrum is degenerate (e.g. GHZ) and
// ValidationError when the leading eigenvalue is not positive.
CanonicalMps right_canonicalize(const MpsTensor& a);

// Smallest k <= cap such that the map M -> (tr[A_j1..jk M])_j has full rank
// bond^2; std::nullopt if none exists up to the cap.
std::optional<int> injectivity_length(const MpsTensor& a, int cap = tol::kLengthCap);
std::optional<int> injectivity_length(const MpoTensor& u, int cap = tol::kLengthCap);

struct MpuValidationReport {
  double canonical = 0.0;       // worst canonical residual / d
  double unitarity = 0.0;       // worst ‖U_n U_n† − 1‖ (relative beyond the dense range)
  double representation = 0.0;  // worst ‖U_n(g)U_n(h) − U_n(gh)‖ (same policy)
  int checked_up_to = 0;
  bool pass(double tol_) const {
    return canonical <= tol_ && unitarity <= tol_ && representation <= tol_;
  }
};
// Checks one MPU tensor per group element (indexed by element). Windows with
// d^n <= 256 are checked densely; larger ones through transfer-trace identities.
MpuValidationReport validate_mpu_representation(const std::vector<MpoTensor>& u,
                                                const FiniteGroup& g, int max_window);

struct MultipletValidationReport {
  double canonical = 0.0;
  double covariance = 0.0;  // worst relative ‖U_n(g)† psi_n(x) − psi_n(xg)‖
  int checked_up_to = 0;
  bool pass(double tol_) const { return canonical <= tol_ && covariance <= tol_; }
};
// Checks the multiplet law U_n(g)† psi_n(x) = psi_n(x.g) for all x, g and
// window sizes 1..max_window.
MultipletValidationReport validate_symmetric_multiplet(const std::vector<MpsTensor>& psi,
                                                       const std::vector<MpoTensor>& u,
                                                       const GSet& x, const FiniteGroup& g,
                                                       int max_window);

// Site-level change of basis linking the conjugate chain to the inverse:
// v · dagger(u_g)_k · w = u_{g^-1},k for every physical pair k, with v w = 1.
struct ConjugateGauge {
  Mat v, w;
  double residual;  // worst sitewise defect in the shared norm policy
};
ConjugateGauge conjugate_gauge(const MpoTensor& u_g, const MpoTensor& u_ginv);

}  // namespace mpuphase
