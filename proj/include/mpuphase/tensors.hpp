#pragma once

#include <vector>

#include "mpuphase/common.hpp"

namespace mpuphase {

// Translation-invariant MPS site tensor: `phys` matrices of size bond x bond,
// rows = left bond, columns = right bond. A length-n chain entry is
// tr(A[j1] ... A[jn]) with the leftmost site the most significant digit.
template <typename Scalar>
class MpsTensorT {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  MpsTensorT() = default;
  MpsTensorT(int phys, int bond)
      : m_(static_cast<size_t>(phys), MatrixType::Zero(bond, bond)) {}
  explicit MpsTensorT(std::vector<MatrixType> blocks) : m_(std::move(blocks)) {
    for (const auto& b : m_)
      if (b.rows() != bond() || b.cols() != bond())
        throw ValidationError("mps tensor: bond blocks must be square and equal-sized");
  }

  int phys() const { return static_cast<int>(m_.size()); }
  int bond() const { return m_.empty() ? 0 : static_cast<int>(m_.front().rows()); }
  MatrixType& operator[](int j) { return m_[j]; }
  const MatrixType& operator[](int j) const { return m_[j]; }

 private:
  std::vector<MatrixType> m_;
};

// MPU/MPO site tensor: matrices indexed by (out, in) at out*phys + in.
template <typename Scalar>
class MpoTensorT {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  MpoTensorT() = default;
  MpoTensorT(int phys, int bond)
      : d_(phys), m_(static_cast<size_t>(phys) * phys, MatrixType::Zero(bond, bond)) {}
  MpoTensorT(int phys, std::vector<MatrixType> blocks) : d_(phys), m_(std::move(blocks)) {
    if (static_cast<int>(m_.size()) != d_ * d_)
      throw ValidationError("mpo tensor: needs phys^2 bond blocks");
    for (const auto& b : m_)
      if (b.rows() != bond() || b.cols() != bond())
        throw ValidationError("mpo tensor: bond blocks must be square and equal-sized");
  }

  int phys() const { return d_; }
  int bond() const { return m_.empty() ? 0 : static_cast<int>(m_.front().rows()); }
  MatrixType& at(int out, int in) { return m_[static_cast<size_t>(out) * d_ + in]; }
  const MatrixType& at(int out, int in) const {
    return m_[static_cast<size_t>(out) * d_ + in];
  }

 private:
  int d_ = 0;
  std::vector<MatrixType> m_;
};

using MpsTensor = MpsTensorT<Complex>;
using MpoTensor = MpoTensorT<Complex>;

// L-site blocking; the leftmost site is the most significant physical digit.
template <typename Scalar>
MpsTensorT<Scalar> block(const MpsTensorT<Scalar>& a, int sites) {
  using M = typename MpsTensorT<Scalar>::MatrixType;
  const int d = a.phys();
  MpsTensorT<Scalar> out(1, a.bond());
  out[0] = M::Identity(a.bond(), a.bond());
  for (int s = 0; s < sites; ++s) {
    MpsTensorT<Scalar> next(out.phys() * d, a.bond());
    for (int j = 0; j < out.phys(); ++j)
      for (int k = 0; k < d; ++k) next[j * d + k] = out[j] * a[k];
    out = std::move(next);
  }
  return out;
}

template <typename Scalar>
MpoTensorT<Scalar> block(const MpoTensorT<Scalar>& u, int sites) {
  using M = typename MpoTensorT<Scalar>::MatrixType;
  const int d = u.phys();
  MpoTensorT<Scalar> out(1, u.bond());
  out.at(0, 0) = M::Identity(u.bond(), u.bond());
  for (int s = 0; s < sites; ++s) {
    MpoTensorT<Scalar> next(out.phys() * d, u.bond());
    for (int o = 0; o < out.phys(); ++o)
      for (int i = 0; i < out.phys(); ++i)
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) next.at(o * d + p, i * d + q) = out.at(o, i) * u.at(p, q);
    out = std::move(next);
  }
  return out;
}

// Site tensor of the adjoint chain: v[o,i] = conj(u[i,o]) generates U_n^dagger.
inline MpoTensor dagger(const MpoTensor& u) {
  MpoTensor v(u.phys(), u.bond());
  for (int o = 0; o < u.phys(); ++o)
    for (int i = 0; i < u.phys(); ++i) v.at(o, i) = u.at(i, o).conjugate();
  return v;
}

// Vertical products; bond of the result is the Kronecker pair (top slow).
inline MpoTensor mpo_times_mpo(const MpoTensor& top, const MpoTensor& bot) {
  if (top.phys() != bot.phys())
    throw ValidationError("mpo product: physical dimensions differ");
  const int d = top.phys();
  MpoTensor w(d, top.bond() * bot.bond());
  for (int o = 0; o < d; ++o)
    for (int i = 0; i < d; ++i) {
      Mat acc = Mat::Zero(w.bond(), w.bond());
      for (int m = 0; m < d; ++m) acc += kron(top.at(o, m), bot.at(m, i));
      w.at(o, i) = acc;
    }
  return w;
}

inline MpsTensor mpo_times_mps(const MpoTensor& u, const MpsTensor& a) {
  if (u.phys() != a.phys()) throw ValidationError("mpo on mps: physical dimensions differ");
  const int d = a.phys();
  MpsTensor b(d, u.bond() * a.bond());
  for (int o = 0; o < d; ++o) {
    Mat acc = Mat::Zero(b.bond(), b.bond());
    for (int i = 0; i < d; ++i) acc += kron(u.at(o, i), a[i]);
    b[o] = acc;
  }
  return b;
}

// The MPO tensor viewed as an MPS with physical index (o, i); shares the
// canonical-form and injectivity machinery.
inline MpsTensor mpo_as_mps(const MpoTensor& u) {
  MpsTensor a(u.phys() * u.phys(), u.bond());
  for (int o = 0; o < u.phys(); ++o)
    for (int i = 0; i < u.phys(); ++i) a[o * u.phys() + i] = u.at(o, i);
  return a;
}

inline MpoTensor identity_mpo(int phys) {
  MpoTensor u(phys, 1);
  for (int o = 0; o < phys; ++o)
    for (int i = 0; i < phys; ++i) u.at(o, i) = Mat::Constant(1, 1, o == i ? 1.0 : 0.0);
  return u;
}

// Bond-dimension-1 MPO of an on-site operator.
inline MpoTensor onsite_mpo(const Mat& op) {
  const int d = static_cast<int>(op.rows());
  MpoTensor u(d, 1);
  for (int o = 0; o < d; ++o)
    for (int i = 0; i < d; ++i) u.at(o, i) = Mat::Constant(1, 1, op(o, i));
  return u;
}

// Dense periodic chains. Guarded against runaway sizes with ResourceError.
Mat dense_operator(const MpoTensor& u, int sites);
Vec dense_state(const MpsTensor& a, int sites);

// tr of the length-n periodic chain of u (sum over the diagonal physical pair).
Complex mpo_chain_trace(const MpoTensor& u, int sites);

}  // namespace mpuphase
