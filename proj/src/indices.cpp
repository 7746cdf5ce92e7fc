#include "mpuphase/indices.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mpuphase {

namespace {

// Least-squares phase between two parallel composites in the dressed Gram
// metric, gated and renormalized to unit modulus.  The parallelism residual
// is a trace-form certificate (sqrt(eps) floor); the modulus drift is a
// ratio of traces and holds to full precision.
Complex unit_ratio(const Mat& a, const Mat& b, const TransferOperator& stack_self,
                   int m, const char* what, double& worst_parallel,
                   double& worst_drift) {
  const TileComparison cmp = compare_right_tiles(a, b, stack_self, m);
  if (!(cmp.residual < tol::kCertificate))
    throw ValidationError(std::string(what) + ": composites are not parallel (residual " +
                          std::to_string(cmp.residual) + ")");
  const double drift = std::abs(std::abs(cmp.ratio) - 1.0);
  if (!(drift <= tol::kParallel))
    throw ValidationError(std::string(what) + ": ratio modulus drifts from 1 by " +
                          std::to_string(drift));
  worst_parallel = std::max(worst_parallel, cmp.residual);
  worst_drift = std::max(worst_drift, drift);
  return cmp.ratio / std::abs(cmp.ratio);
}

}  // namespace

OmegaReport extract_omega(PairCache& cache) {
  const FiniteGroup& grp = cache.group();
  const int n = grp.order();
  const int e = grp.identity();
  OmegaReport report;
  report.omega = PhaseTable3(n);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      for (int k = 0; k < n; ++k) {
        if (g == e || h == e || k == e) {
          report.omega.at(g, h, k) = Complex(1.0, 0.0);
          continue;
        }
        const int gh = grp.mult(g, h);
        const int hk = grp.mult(h, k);
        const int ghk = grp.mult(gh, k);
        const ChainReplacementPair& f_hk = cache.fusion(h, k);
        const ChainReplacementPair& f_g_hk = cache.fusion(g, hk);
        const ChainReplacementPair& f_gh = cache.fusion(g, h);
        const ChainReplacementPair& f_gh_k = cache.fusion(gh, k);
        const Mat ra = kron(identity(cache.mpo(g).bond()), f_hk.v) * f_g_hk.v;
        const Mat rb = kron(f_gh.v, identity(cache.mpo(k).bond())) * f_gh_k.v;
        const MpoTensor stack =
            mpo_times_mpo(cache.mpo(g), mpo_times_mpo(cache.mpo(h), cache.mpo(k)));
        const TransferOperator self = TransferOperator::mpo(stack);
        const int m = 2 + std::max({f_hk.window, f_g_hk.window, f_gh.window,
                                    f_gh_k.window, cache.mpo_injectivity(ghk)});
        report.omega.at(g, h, k) =
            unit_ratio(ra, rb, self, m, "omega extraction",
                       report.parallelism_residual, report.unit_drift);
      }
    }
  }
  report.cocycle_residual = check_3cocycle(report.omega, grp);
  return report;
}

SigmaReport extract_sigma_hat(PairCache& cache) {
  const FiniteGroup& grp = cache.group();
  const GSet& xs = cache.gset();
  const int n = grp.order();
  const int e = grp.identity();
  SigmaReport report;
  report.sigma = PhaseTable2Family(xs.size(), n);
  for (int x = 0; x < xs.size(); ++x) {
    for (int g = 0; g < n; ++g) {
      for (int h = 0; h < n; ++h) {
        if (g == e || h == e) {
          report.sigma.at(x, g, h) = Complex(1.0, 0.0);
          continue;
        }
        const int xg = xs.act(x, g);
        const int gh = grp.mult(g, h);
        const int xgh = xs.act(x, gh);
        const ChainReplacementPair& t_x_g = cache.absorption(x, g);
        const ChainReplacementPair& t_xg_h = cache.absorption(xg, h);
        const ChainReplacementPair& t_x_gh = cache.absorption(x, gh);
        const ChainReplacementPair& f_gh = cache.fusion(g, h);
        const Mat r_seq = kron(identity(cache.mpo(g).bond()), t_xg_h.v) * t_x_g.v;
        const Mat r_fus = kron(f_gh.v, identity(cache.mps(xgh).bond())) * t_x_gh.v;
        const MpsTensor stack =
            mpo_times_mps(cache.mpo(g), mpo_times_mps(cache.mpo(h), cache.mps(xgh)));
        const TransferOperator self = TransferOperator::mps(stack);
        const int m = 2 + std::max({t_x_g.window, t_xg_h.window, t_x_gh.window,
                                    f_gh.window, cache.mps_injectivity(xgh)});
        report.sigma.at(x, g, h) =
            unit_ratio(r_seq, r_fus, self, m, "sigma extraction",
                       report.parallelism_residual, report.unit_drift);
      }
    }
  }
  return report;
}

PhaseLabel classify(const SymmetricModel& model, int validation_window) {
  const MpuValidationReport mpu =
      validate_mpu_representation(model.mpo, model.group, validation_window);
  if (!mpu.pass(tol::kDefault))
    throw ValidationError("classify: representation stage failed (canonical " +
                          std::to_string(mpu.canonical) + ", unitarity " +
                          std::to_string(mpu.unitarity) + ", representation " +
                          std::to_string(mpu.representation) + ")");
  const MultipletValidationReport mult = validate_symmetric_multiplet(
      model.mps, model.mpo, model.gset, model.group, validation_window);
  if (!mult.pass(tol::kDefault))
    throw ValidationError("classify: multiplet stage failed (canonical " +
                          std::to_string(mult.canonical) + ", covariance " +
                          std::to_string(mult.covariance) + ")");

  PhaseLabel label;
  label.validation_residual =
      std::max({mpu.canonical, mpu.unitarity, mpu.representation, mult.canonical,
                mult.covariance});

  PairCache cache(model.group, model.gset, model.mpo, model.mps);
  label.omega = extract_omega(cache);
  if (!(label.omega.cocycle_residual <= tol::kDefault))
    throw ValidationError("classify: omega stage: extracted table breaks the 3-cocycle identity by " +
                          std::to_string(label.omega.cocycle_residual));
  label.sigma = extract_sigma_hat(cache);
  label.pentagon_residual =
      check_pentagon(label.sigma.sigma, label.omega.omega, model.gset, model.group);
  if (!(label.pentagon_residual <= tol::kDefault))
    throw ValidationError("classify: pentagon stage: sigma/omega mismatch of " +
                          std::to_string(label.pentagon_residual));

  const std::vector<int> h_elements = unbroken_subgroup(model.gset, model.group);
  label.unbroken = subgroup_structure(model.group, h_elements);
  label.restricted = restrict_sigma_to_H(label.sigma.sigma, label.omega.omega,
                                         model.gset, model.group, h_elements);
  label.max_window = cache.max_window_seen();
  return label;
}

}  // namespace mpuphase
