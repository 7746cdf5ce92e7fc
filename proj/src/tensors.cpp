#include "mpuphase/tensors.hpp"

#include <string>

namespace mpuphase {

namespace {

constexpr long long kDenseBudget = 1ll << 25;  // complex entries

void guard_budget(long long entries, const char* what) {
  if (entries > kDenseBudget)
    throw ResourceError(std::string("dense chain too large: ") + what);
}

}  // namespace

Mat dense_operator(const MpoTensor& u, int sites) {
  const int d = u.phys();
  long long dn = 1;
  for (int s = 0; s < sites; ++s) dn *= d;
  guard_budget(dn * dn * u.bond() * u.bond(), "operator");

  // Chain state: per physical pair (O, I) the partial bond product.
  std::vector<Mat> chain(1, Mat::Identity(u.bond(), u.bond()));
  int dim = 1;
  for (int s = 0; s < sites; ++s) {
    std::vector<Mat> next(static_cast<size_t>(dim) * dim * d * d);
    for (int O = 0; O < dim; ++O)
      for (int I = 0; I < dim; ++I)
        for (int o = 0; o < d; ++o)
          for (int i = 0; i < d; ++i)
            next[(static_cast<size_t>(O) * d + o) * dim * d + I * d + i] =
                chain[static_cast<size_t>(O) * dim + I] * u.at(o, i);
    chain = std::move(next);
    dim *= d;
  }
  Mat out(dim, dim);
  for (int O = 0; O < dim; ++O)
    for (int I = 0; I < dim; ++I) out(O, I) = chain[static_cast<size_t>(O) * dim + I].trace();
  return out;
}

Vec dense_state(const MpsTensor& a, int sites) {
  const int d = a.phys();
  long long dn = 1;
  for (int s = 0; s < sites; ++s) dn *= d;
  guard_budget(dn * a.bond() * a.bond(), "state");

  std::vector<Mat> chain(1, Mat::Identity(a.bond(), a.bond()));
  long long dim = 1;
  for (int s = 0; s < sites; ++s) {
    std::vector<Mat> next(static_cast<size_t>(dim) * d);
    for (long long J = 0; J < dim; ++J)
      for (int j = 0; j < d; ++j) next[J * d + j] = chain[J] * a[j];
    chain = std::move(next);
    dim *= d;
  }
  Vec out(dim);
  for (long long J = 0; J < dim; ++J) out(J) = chain[J].trace();
  return out;
}

Complex mpo_chain_trace(const MpoTensor& u, int sites) {
  Mat f = Mat::Zero(u.bond(), u.bond());
  for (int o = 0; o < u.phys(); ++o) f += u.at(o, o);
  Mat p = Mat::Identity(u.bond(), u.bond());
  for (int s = 0; s < sites; ++s) p = p * f;
  return p.trace();
}

}  // namespace mpuphase
