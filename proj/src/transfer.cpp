#include "mpuphase/transfer.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <functional>
#include <numeric>

namespace mpuphase {

TransferOperator::TransferOperator(std::vector<Mat> top, std::vector<Mat> bot)
    : top_(std::move(top)), bot_(std::move(bot)) {
  if (top_.empty() || top_.size() != bot_.size())
    throw ValidationError("transfer map: term lists must be non-empty and equal length");
  p_ = static_cast<int>(top_.front().rows());
  q_ = static_cast<int>(bot_.front().rows());
  for (const Mat& m : top_)
    if (m.rows() != p_ || m.cols() != p_)
      throw ValidationError("transfer map: top blocks must be square and equal-sized");
  for (const Mat& m : bot_)
    if (m.rows() != q_ || m.cols() != q_)
      throw ValidationError("transfer map: bottom blocks must be square and equal-sized");
}

TransferOperator TransferOperator::mps_pair(const MpsTensor& top, const MpsTensor& bot) {
  if (top.phys() != bot.phys())
    throw ValidationError("transfer map: mps physical dimensions differ");
  std::vector<Mat> s(top.phys()), t(bot.phys());
  for (int j = 0; j < top.phys(); ++j) {
    s[j] = top[j];
    t[j] = bot[j];
  }
  return TransferOperator(std::move(s), std::move(t));
}

TransferOperator TransferOperator::mpo_pair(const MpoTensor& top, const MpoTensor& bot) {
  if (top.phys() != bot.phys())
    throw ValidationError("transfer map: mpo physical dimensions differ");
  const int d = top.phys();
  std::vector<Mat> s, t;
  s.reserve(static_cast<size_t>(d) * d);
  t.reserve(static_cast<size_t>(d) * d);
  for (int o = 0; o < d; ++o)
    for (int i = 0; i < d; ++i) {
      s.push_back(top.at(o, i));
      t.push_back(bot.at(o, i));
    }
  return TransferOperator(std::move(s), std::move(t));
}

Mat TransferOperator::apply(const Mat& y) const {
  Mat out = Mat::Zero(p_, q_);
  for (size_t k = 0; k < top_.size(); ++k) out += top_[k] * y * bot_[k].adjoint();
  return out;
}

Mat TransferOperator::apply_adjoint(const Mat& y) const {
  Mat out = Mat::Zero(p_, q_);
  for (size_t k = 0; k < top_.size(); ++k) out += top_[k].adjoint() * y * bot_[k];
  return out;
}

Mat TransferOperator::dense() const {
  Mat out = Mat::Zero(static_cast<Eigen::Index>(p_) * q_, static_cast<Eigen::Index>(p_) * q_);
  for (size_t k = 0; k < top_.size(); ++k) out += kron(bot_[k].conjugate(), top_[k]);
  return out;
}

Complex chain_trace(const TransferOperator& t, int n) {
  const long long dim = static_cast<long long>(t.top_bond()) * t.bot_bond();
  if (dim > tol::kDenseEigenMaxDim)
    throw ResourceError("chain_trace: transfer map too large to materialize");
  const Mat e = t.dense();
  Mat p = Mat::Identity(dim, dim);
  for (int s = 0; s < n; ++s) p = p * e;
  return p.trace();
}

namespace {

struct EigLead {
  Complex lambda;   // largest-|.| eigenvalue
  Complex lambda2;  // second largest |.| (0 when the space is 1-dimensional)
  Mat vec;          // unit-Frobenius leading eigenvector, P x Q
};

EigLead dense_leading(const std::function<Mat(const Mat&)>& op, int p, int q) {
  const Eigen::Index dim = static_cast<Eigen::Index>(p) * q;
  Mat m(dim, dim);
  Mat basis = Mat::Zero(p, q);
  for (Eigen::Index c = 0; c < dim; ++c) {
    basis(c % p, c / p) = 1.0;
    const Mat img = op(basis);
    m.col(c) = Eigen::Map<const Vec>(img.data(), dim);
    basis(c % p, c / p) = 0.0;
  }
  Eigen::ComplexEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw Error("transfer eigensolve failed");
  Eigen::Index i1 = 0;
  for (Eigen::Index i = 1; i < dim; ++i)
    if (std::abs(es.eigenvalues()(i)) > std::abs(es.eigenvalues()(i1))) i1 = i;
  Complex l2 = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i)
    if (i != i1 && std::abs(es.eigenvalues()(i)) > std::abs(l2)) l2 = es.eigenvalues()(i);
  EigLead out;
  out.lambda = es.eigenvalues()(i1);
  out.lambda2 = l2;
  const Vec v = es.eigenvectors().col(i1);
  out.vec = Eigen::Map<const Mat>(v.data(), p, q) / v.norm();
  return out;
}

EigLead iterative_leading(const std::function<Mat(const Mat&)>& op, int p, int q) {
  RandomStream rng(0x5eed5eedull);
  auto fill = [&] {
    Mat y(p, q);
    for (int j = 0; j < q; ++j)
      for (int i = 0; i < p; ++i) y(i, j) = rng.gaussian_complex();
    return y;
  };
  auto inner = [](const Mat& a, const Mat& b) { return (a.adjoint() * b).trace(); };

  Mat y1 = fill(), y2 = fill();
  y1 /= y1.norm();
  y2 -= y1 * inner(y1, y2);
  y2 /= y2.norm();

  Eigen::Matrix2cd h = Eigen::Matrix2cd::Zero();
  EigLead out;
  for (int it = 0;; ++it) {
    const Mat w1 = op(y1), w2 = op(y2);
    h(0, 0) = inner(y1, w1);
    h(0, 1) = inner(y1, w2);
    h(1, 0) = inner(y2, w1);
    h(1, 1) = inner(y2, w2);

    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(h);
    Complex l0 = es.eigenvalues()(0), l1 = es.eigenvalues()(1);
    Eigen::Vector2cd v0 = es.eigenvectors().col(0), v1 = es.eigenvectors().col(1);
    if (std::abs(l1) > std::abs(l0)) {
      std::swap(l0, l1);
      std::swap(v0, v1);
    }
    // Residual of the leading Ritz pair only: the second pair may converge
    // arbitrarily slowly when subleading eigenvalues cluster, and it is only
    // used for the gap estimate.
    const Mat ritz = y1 * v0(0) + y2 * v0(1);
    const double res = (w1 * v0(0) + w2 * v0(1) - l0 * ritz).norm();
    if (res < tol::kPowerIter * std::max(1.0, std::abs(l0))) {
      out.lambda = l0;
      out.lambda2 = l1;
      out.vec = ritz / ritz.norm();
      return out;
    }
    if (it + 1 >= tol::kPowerIterMax)
      throw Error("transfer eigensolve: subspace iteration did not converge");

    // Re-orthonormalize the image to advance the subspace.
    Mat n1 = w1;
    const double n1n = n1.norm();
    if (n1n < 1e-300) throw SpectrumError("transfer map annihilated the iteration subspace");
    n1 /= n1n;
    Mat n2 = w2 - n1 * inner(n1, w2);
    if (n2.norm() < 1e-14) {
      n2 = fill();
      n2 -= n1 * inner(n1, n2);
    }
    n2 /= n2.norm();
    y1 = n1;
    y2 = n2;
  }
}

EigLead leading_of(const TransferOperator& t, bool adjoint, int dense_max_dim) {
  const int p = t.top_bond(), q = t.bot_bond();
  std::function<Mat(const Mat&)> op;
  if (adjoint)
    op = [&t](const Mat& y) { return t.apply_adjoint(y); };
  else
    op = [&t](const Mat& y) { return t.apply(y); };
  const long long dim = static_cast<long long>(p) * q;
  if (dim < 2 || dim <= dense_max_dim) return dense_leading(op, p, q);
  return iterative_leading(op, p, q);
}

void check_gap(const EigLead& e) {
  const double a1 = std::abs(e.lambda), a2 = std::abs(e.lambda2);
  if (a1 <= 0.0) throw SpectrumError("transfer map has zero leading eigenvalue");
  if ((a1 - a2) / a1 < tol::kDegenerate)
    throw SpectrumError("degenerate leading transfer eigenvalue");
}

// Rotate the global phase so the trace is real positive; average with the
// adjoint when that makes the matrix Hermitian to working precision.
void hermitize(Mat& m) {
  const Complex t = m.trace();
  if (std::abs(t) > 1e-12 * m.norm()) m *= std::conj(t) / std::abs(t);
  if ((m - m.adjoint()).norm() < 1e-8 * m.norm()) m = 0.5 * (m + m.adjoint());
}

}  // namespace

FixedPointPair leading_fixed_points(const TransferOperator& t, int dense_max_dim) {
  if (t.top_bond() != t.bot_bond())
    throw ValidationError("leading_fixed_points: needs equal bond dimensions");
  const int d = t.top_bond();

  EigLead right = leading_of(t, false, dense_max_dim);
  check_gap(right);
  EigLead left = leading_of(t, true, dense_max_dim);

  hermitize(right.vec);
  hermitize(left.vec);

  const Complex trr = right.vec.trace();
  if (std::abs(trr) < 1e-10 * right.vec.norm() * d)
    throw SpectrumError("transfer fixed point has (near-)zero trace");
  Mat r = right.vec * (static_cast<double>(d) / trr);

  const Complex pair = (left.vec * r).trace();
  if (std::abs(pair) < 1e-12)
    throw SpectrumError("left and right fixed points do not pair");
  Mat l = left.vec / pair;

  FixedPointPair out;
  out.lambda = right.lambda;
  out.gap = std::abs(right.lambda2) / std::abs(right.lambda);
  out.left = std::move(l);
  out.right = std::move(r);
  return out;
}

IntertwinerTiles leading_intertwiner(const TransferOperator& mixed, const Mat& rho_bot,
                                     int dense_max_dim) {
  const int p = mixed.top_bond(), q = mixed.bot_bond();
  if (rho_bot.rows() != q || rho_bot.cols() != q)
    throw ValidationError("leading_intertwiner: rho_bot must act on the bottom bond");

  EigLead wlead = leading_of(mixed, false, dense_max_dim);
  check_gap(wlead);
  EigLead zlead = leading_of(mixed, true, dense_max_dim);

  Mat w = wlead.vec * (std::sqrt(static_cast<double>(q)) / wlead.vec.norm());

  // Invert the (Hermitian, positive) bottom fixed point.
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho_bot + rho_bot.adjoint()));
  if (es.info() != Eigen::Success) throw Error("rho inversion failed");
  const double emax = es.eigenvalues().maxCoeff();
  if (es.eigenvalues().minCoeff() < 1e-12 * emax)
    throw SpectrumError("bottom fixed point is singular");
  const Mat rho_inv = es.eigenvectors() *
                      es.eigenvalues().cwiseInverse().asDiagonal() *
                      es.eigenvectors().adjoint();

  Mat v = rho_inv * zlead.vec.adjoint();  // Q x P

  const Complex c = (v * w).trace() / static_cast<double>(q);
  if (std::abs(c) < 1e-12)
    throw SpectrumError("intertwiner tiles do not pair into an isomorphism");
  v /= c;
  if ((v * w - identity(q)).norm() > tol::kTight * q)
    throw Error("intertwiner tiles violate v*w = 1");

  // Deterministic phase: divide out the phase of the first largest-modulus
  // entry of v (row-major scan, 1e-9 slack).
  double amax = 0.0;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < p; ++j) amax = std::max(amax, std::abs(v(i, j)));
  Complex phi(1.0, 0.0);
  bool found = false;
  for (int i = 0; i < q && !found; ++i)
    for (int j = 0; j < p; ++j)
      if (std::abs(v(i, j)) > amax - 1e-9) {
        phi = v(i, j) / std::abs(v(i, j));
        found = true;
        break;
      }
  v /= phi;
  w *= phi;

  IntertwinerTiles out;
  out.v = std::move(v);
  out.w = std::move(w);
  out.lambda = wlead.lambda;
  out.gap = std::abs(wlead.lambda2) / std::abs(wlead.lambda);
  return out;
}

}  // namespace mpuphase
