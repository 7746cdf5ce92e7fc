#pragma once

#include <optional>
#include <vector>

#include "mpuphase/common.hpp"
#include "mpuphase/group.hpp"

namespace mpuphase {

// U(1)-valued table on G^3. Entries are kept as unit complex numbers; class
// arithmetic happens on log-phases in R/Z with branch [0,1).
class PhaseTable3 {
 public:
  PhaseTable3() = default;
  explicit PhaseTable3(int order, Complex fill = Complex(1.0, 0.0))
      : n_(order), v_(static_cast<size_t>(order) * order * order, fill) {}

  int order() const { return n_; }
  Complex operator()(int g, int h, int k) const { return v_[idx(g, h, k)]; }
  Complex& at(int g, int h, int k) { return v_[idx(g, h, k)]; }
  const std::vector<Complex>& values() const { return v_; }

  // Largest deviation of |entry| from 1.
  double unit_violation() const;

 private:
  size_t idx(int g, int h, int k) const {
    return (static_cast<size_t>(g) * n_ + h) * n_ + k;
  }
  int n_ = 0;
  std::vector<Complex> v_;
};

// U(1)-valued table on X x G^2 (one 2-cochain per multiplet member).
class PhaseTable2Family {
 public:
  PhaseTable2Family() = default;
  PhaseTable2Family(int xsize, int order, Complex fill = Complex(1.0, 0.0))
      : nx_(xsize), n_(order), v_(static_cast<size_t>(xsize) * order * order, fill) {}

  int xsize() const { return nx_; }
  int order() const { return n_; }
  Complex operator()(int x, int g, int h) const { return v_[idx(x, g, h)]; }
  Complex& at(int x, int g, int h) { return v_[idx(x, g, h)]; }
  double unit_violation() const;

 private:
  size_t idx(int x, int g, int h) const {
    return (static_cast<size_t>(x) * n_ + g) * n_ + h;
  }
  int nx_ = 0, n_ = 0;
  std::vector<Complex> v_;
};

// 1-cochain family zeta_x(g) and plain 2-cochain z(g,h) — witness shapes.
struct Cochain1Family {
  int xsize = 0, order = 0;
  std::vector<Complex> v;  // (x, g)
  Complex operator()(int x, int g) const { return v[static_cast<size_t>(x) * order + g]; }
};
struct Cochain2 {
  int order = 0;
  std::vector<Complex> v;  // (g, h)
  Complex operator()(int g, int h) const { return v[static_cast<size_t>(g) * order + h]; }
};

struct CoboundaryReport {
  bool solvable = false;
  // Distance of the obstruction components from the nearest integers,
  // in log-phase units (0 when solvable).
  double max_violation = 0.0;
  std::optional<Cochain2> witness_z;
  std::optional<Cochain1Family> witness_zeta;
};

// max over G^4 of |c(g,h,k)c(g,hk,l)c(h,k,l) - c(g,h,kl)c(gh,k,l)|.
double check_3cocycle(const PhaseTable3& c, const FiniteGroup& g);

// (d sigma)_x(g,h,k) = sigma_x(g,h) sigma_x(gh,k) / (sigma_{xg}(h,k) sigma_x(g,hk)),
// one 3-table per x.
std::vector<PhaseTable3> twisted_differential(const PhaseTable2Family& sigma,
                                              const GSet& x, const FiniteGroup& g);

// max over (x,g,h,k) of |sigma_x(g,h)sigma_x(gh,k) - c(g,h,k)sigma_{xg}(h,k)sigma_x(g,hk)|.
double check_pentagon(const PhaseTable2Family& sigma, const PhaseTable3& c,
                      const GSet& x, const FiniteGroup& g);

// (d zeta)_x(g,h) = zeta_x(gh) / (zeta_{xg}(h) zeta_x(g)).
PhaseTable2Family coboundary_of_1family(const Cochain1Family& zeta, const GSet& x,
                                        const FiniteGroup& g);
// (d z)(g,h,k) = z(h,k) z(g,hk) / (z(g,h) z(gh,k)).
PhaseTable3 coboundary_of_2(const Cochain2& z, const FiniteGroup& g);

// Decides whether chat / c is a coboundary dz (same H^3 class). Inputs must
// pass check_3cocycle within `cocycle_tol`.
CoboundaryReport class_equal_3(const PhaseTable3& c, const PhaseTable3& chat,
                               const FiniteGroup& g, double cocycle_tol = tol::kDefault);

// Joint class decision on pairs: solves sigma_hat = dzeta . sigma . conj(z),
// chat = dz . c. Inputs must satisfy the pentagon within `pentagon_tol`.
CoboundaryReport class_equal_T(const PhaseTable2Family& sigma, const PhaseTable3& c,
                               const PhaseTable2Family& sigma_hat, const PhaseTable3& chat,
                               const GSet& x, const FiniteGroup& g,
                               double pentagon_tol = tol::kDefault);

// Solves sigma' = sigma . dalpha with alpha a 1-cochain family (same twisted
// class at fixed 3-cocycle). Both inputs must satisfy the pentagon with the
// same c; callers pass that c for the precondition check.
CoboundaryReport sigma_equivalence_report(const PhaseTable2Family& sigma,
                                          const PhaseTable2Family& sigma_prime,
                                          const GSet& x, const FiniteGroup& g);

struct RestrictedSigma {
  Subgroup h;
  PhaseTable2Family sigma;   // untwisted representative on H
  double cocycle_residual;   // max violation of the plain 2-cocycle identity
  Cochain2 trivialization;   // z on H with dz = c|_H used to untwist
};

// Restricts sigma to the unbroken subgroup and divides out a trivialization
// of c|_H. Throws ValidationError when c|_H is not a coboundary.
RestrictedSigma restrict_sigma_to_H(const PhaseTable2Family& sigma, const PhaseTable3& c,
                                    const GSet& x, const FiniteGroup& g,
                                    const std::vector<int>& h_elements);

// Gauge-fixes identity-argument entries to exactly 1 by applying a
// compensating coboundary; class is unchanged.
PhaseTable3 normalize_3cocycle(const PhaseTable3& c, const FiniteGroup& g);
PhaseTable2Family normalize_2family(const PhaseTable2Family& sigma, const GSet& x,
                                    const FiniteGroup& g);

// --- integer linear algebra used by the class decisions ---

struct SmithDecomposition {
  IMat u, v, d;  // u * a * v = d with u, v unimodular, d diagonal
};
SmithDecomposition smith_normal_form(IMat a);

struct Mod1Solution {
  bool solvable = false;
  double max_violation = 0.0;
  RVec x;  // a solution of A x = b (mod 1) when solvable
};
// Solves A x = b (mod 1). Obstruction components are snapped to rationals
// with denominator <= denom_bound; components farther than kClassRational
// from every such rational raise ValidationError (inconsistent input).
Mod1Solution solve_mod1(const IMat& a, const RVec& b, int denom_bound);

}  // namespace mpuphase
