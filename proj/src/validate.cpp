#include "mpuphase/validate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace mpuphase {

double canonical_residual(const MpsTensor& a) {
  Mat s = Mat::Zero(a.bond(), a.bond());
  for (int j = 0; j < a.phys(); ++j) s += a[j] * a[j].adjoint();
  return residual_norm(s - identity(a.bond()));
}

double canonical_residual(const MpoTensor& u) {
  Mat s = Mat::Zero(u.bond(), u.bond());
  for (int o = 0; o < u.phys(); ++o)
    for (int i = 0; i < u.phys(); ++i) s += u.at(o, i) * u.at(o, i).adjoint();
  return residual_norm(s - static_cast<double>(u.phys()) * identity(u.bond()));
}

Mat left_fixed_point(const MpsTensor& a) {
  return leading_fixed_points(TransferOperator::mps(a)).left;
}

Mat left_fixed_point(const MpoTensor& u) {
  return leading_fixed_points(TransferOperator::mpo(u)).left;
}

CanonicalMps right_canonicalize(const MpsTensor& a) {
  FixedPointPair fp = leading_fixed_points(TransferOperator::mps(a));
  if (std::abs(std::arg(fp.lambda)) > 1e-8 || fp.lambda.real() <= 0.0)
    throw ValidationError("right_canonicalize: leading transfer eigenvalue is not positive");
  const double scale = 1.0 / std::sqrt(fp.lambda.real());

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (fp.right + fp.right.adjoint()));
  if (es.info() != Eigen::Success) throw Error("right_canonicalize: eigensolve failed");
  const double emax = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < 1e-12 * emax)
    throw SpectrumError("right_canonicalize: singular right fixed point");
  const Mat r = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                es.eigenvectors().adjoint();
  const Mat rinv = es.eigenvectors() *
                   es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                   es.eigenvectors().adjoint();

  CanonicalMps out;
  out.a = MpsTensor(a.phys(), a.bond());
  for (int j = 0; j < a.phys(); ++j) out.a[j] = scale * (rinv * a[j] * r);
  out.residual = canonical_residual(out.a);
  if (out.residual > 1e-6)
    throw Error("right_canonicalize: gauge transformation failed to canonicalize");
  out.rho = left_fixed_point(out.a);
  return out;
}

std::optional<int> injectivity_length(const MpsTensor& a, int cap) {
  const int d2 = a.bond() * a.bond();
  for (int k = 1; k <= cap; ++k) {
    const MpsTensor blk = block(a, k);
    if (blk.phys() < d2) continue;
    Mat gamma(blk.phys(), d2);
    for (int j = 0; j < blk.phys(); ++j)
      for (int al = 0; al < a.bond(); ++al)
        for (int be = 0; be < a.bond(); ++be) gamma(j, al * a.bond() + be) = blk[j](be, al);
    Eigen::JacobiSVD<Mat> svd(gamma);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 1e-8 * sv(0)) return k;
  }
  return std::nullopt;
}

std::optional<int> injectivity_length(const MpoTensor& u, int cap) {
  return injectivity_length(mpo_as_mps(u), cap);
}

namespace {

// Relative Frobenius distance ‖X − Y‖/‖X‖ from pair-transfer traces, where
// X, Y are length-n chains of MPO tensors x, y:
//   tr[X† Y] = tr[E^n],  E = sum_k conj(x_k) ⊗ y_k.
double mpo_chain_distance(const MpoTensor& x, const MpoTensor& y, int n) {
  const Complex xx = chain_trace(TransferOperator::mpo_pair(x, x), n);
  const Complex xy = chain_trace(TransferOperator::mpo_pair(y, x), n);
  const Complex yy = chain_trace(TransferOperator::mpo_pair(y, y), n);
  const double d2 = std::max(0.0, xx.real() - 2.0 * xy.real() + yy.real());
  return std::sqrt(d2 / std::max(xx.real(), 1e-300));
}

double mps_chain_distance(const MpsTensor& x, const MpsTensor& y, int n) {
  const Complex xx = chain_trace(TransferOperator::mps_pair(x, x), n);
  const Complex xy = chain_trace(TransferOperator::mps_pair(y, x), n);
  const Complex yy = chain_trace(TransferOperator::mps_pair(y, y), n);
  const double d2 = std::max(0.0, xx.real() - 2.0 * xy.real() + yy.real());
  return std::sqrt(d2 / std::max(xx.real(), 1e-300));
}

// Relative unitarity defect of the length-n chain of u via traces:
// ‖U U† − 1‖_F² = tr[(UU†)²] − 2 tr[UU†] + d^n.
double mpo_unitarity_trace(const MpoTensor& u, int n) {
  const MpoTensor w = mpo_times_mpo(u, dagger(u));
  const double dn = std::pow(static_cast<double>(u.phys()), n);
  const double ww = chain_trace(TransferOperator::mpo_pair(w, w), n).real();
  const double wtr = mpo_chain_trace(w, n).real();
  const double d2 = std::max(0.0, ww - 2.0 * wtr + dn);
  return std::sqrt(d2 / dn);
}

}  // namespace

MpuValidationReport validate_mpu_representation(const std::vector<MpoTensor>& u,
                                                const FiniteGroup& g, int max_window) {
  if (static_cast<int>(u.size()) != g.order())
    throw ValidationError("validate_mpu_representation: one tensor per group element");
  const int d = u.front().phys();
  for (const auto& t : u)
    if (t.phys() != d)
      throw ValidationError("validate_mpu_representation: mixed physical dimensions");

  MpuValidationReport rep;
  rep.checked_up_to = max_window;
  for (int e = 0; e < g.order(); ++e)
    rep.canonical = std::max(rep.canonical, canonical_residual(u[e]) / d);

  long long dn = 1;
  for (int n = 1; n <= max_window; ++n) {
    dn *= d;
    const bool dense = dn <= 256;
    if (dense) {
      std::vector<Mat> un(g.order());
      for (int e = 0; e < g.order(); ++e) un[e] = dense_operator(u[e], n);
      const Mat eye = identity(static_cast<int>(dn));
      for (int e = 0; e < g.order(); ++e)
        rep.unitarity = std::max(rep.unitarity, residual_norm(un[e] * un[e].adjoint() - eye));
      for (int a = 0; a < g.order(); ++a)
        for (int b = 0; b < g.order(); ++b)
          rep.representation = std::max(
              rep.representation, residual_norm(un[a] * un[b] - un[g.mult(a, b)]));
    } else {
      for (int e = 0; e < g.order(); ++e)
        rep.unitarity = std::max(rep.unitarity, mpo_unitarity_trace(u[e], n));
      for (int a = 0; a < g.order(); ++a)
        for (int b = 0; b < g.order(); ++b)
          rep.representation = std::max(
              rep.representation,
              mpo_chain_distance(u[g.mult(a, b)], mpo_times_mpo(u[a], u[b]), n));
    }
  }
  return rep;
}

MultipletValidationReport validate_symmetric_multiplet(const std::vector<MpsTensor>& psi,
                                                       const std::vector<MpoTensor>& u,
                                                       const GSet& x, const FiniteGroup& g,
                                                       int max_window) {
  if (static_cast<int>(psi.size()) != x.size())
    throw ValidationError("validate_symmetric_multiplet: one MPS per orbit point");
  if (static_cast<int>(u.size()) != g.order())
    throw ValidationError("validate_symmetric_multiplet: one MPO per group element");
  const int d = psi.front().phys();

  MultipletValidationReport rep;
  rep.checked_up_to = max_window;
  for (int p = 0; p < x.size(); ++p)
    rep.canonical = std::max(rep.canonical, canonical_residual(psi[p]));

  long long dn = 1;
  for (int n = 1; n <= max_window; ++n) {
    dn *= d;
    for (int p = 0; p < x.size(); ++p)
      for (int e = 0; e < g.order(); ++e) {
        const MpsTensor moved = mpo_times_mps(dagger(u[e]), psi[p]);
        const MpsTensor& target = psi[x.act(p, e)];
        const long long work = dn * moved.bond() * moved.bond();
        double res;
        if (work <= (1ll << 22)) {
          const Vec lhs = dense_state(moved, n);
          const Vec rhs = dense_state(target, n);
          res = (lhs - rhs).norm() / std::max(rhs.norm(), 1e-300);
        } else {
          res = mps_chain_distance(target, moved, n);
        }
        rep.covariance = std::max(rep.covariance, res);
      }
  }
  return rep;
}

ConjugateGauge conjugate_gauge(const MpoTensor& u_g, const MpoTensor& u_ginv) {
  const MpoTensor dag = dagger(u_g);
  const TransferOperator mixed = TransferOperator::mpo_pair(dag, u_ginv);
  const Mat rho = left_fixed_point(u_ginv);
  IntertwinerTiles tiles = leading_intertwiner(mixed, rho);
  const double d = u_g.phys();
  if (std::abs(tiles.lambda - Complex(d, 0.0)) > 1e-6 * d)
    throw ValidationError("conjugate_gauge: chains are not related by a bond gauge");

  double res = 0.0;
  for (int o = 0; o < u_g.phys(); ++o)
    for (int i = 0; i < u_g.phys(); ++i)
      res = std::max(res,
                     residual_norm(tiles.v * dag.at(o, i) * tiles.w - u_ginv.at(o, i)));
  return ConjugateGauge{std::move(tiles.v), std::move(tiles.w), res};
}

}  // namespace mpuphase
