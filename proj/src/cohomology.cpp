#include "mpuphase/cohomology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace mpuphase {

double PhaseTable3::unit_violation() const {
  double m = 0.0;
  for (const Complex& z : v_) m = std::max(m, std::abs(std::abs(z) - 1.0));
  return m;
}

double PhaseTable2Family::unit_violation() const {
  double m = 0.0;
  for (const Complex& z : v_) m = std::max(m, std::abs(std::abs(z) - 1.0));
  return m;
}

double check_3cocycle(const PhaseTable3& c, const FiniteGroup& g) {
  const int n = g.order();
  if (c.order() != n) throw ValidationError("3-cocycle table has wrong order");
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const Complex lhs = c(a, b, k) * c(a, g.mult(b, k), l) * c(b, k, l);
          const Complex rhs = c(a, b, g.mult(k, l)) * c(g.mult(a, b), k, l);
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return worst;
}

std::vector<PhaseTable3> twisted_differential(const PhaseTable2Family& sigma,
                                              const GSet& x, const FiniteGroup& g) {
  const int n = g.order();
  std::vector<PhaseTable3> out(x.size(), PhaseTable3(n));
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int k = 0; k < n; ++k)
          out[p].at(a, b, k) = sigma(p, a, b) * sigma(p, g.mult(a, b), k) /
                               (sigma(x.act(p, a), b, k) * sigma(p, a, g.mult(b, k)));
  return out;
}

double check_pentagon(const PhaseTable2Family& sigma, const PhaseTable3& c,
                      const GSet& x, const FiniteGroup& g) {
  const int n = g.order();
  double worst = 0.0;
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int k = 0; k < n; ++k) {
          const Complex lhs = sigma(p, a, b) * sigma(p, g.mult(a, b), k);
          const Complex rhs =
              c(a, b, k) * sigma(x.act(p, a), b, k) * sigma(p, a, g.mult(b, k));
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return worst;
}

PhaseTable2Family coboundary_of_1family(const Cochain1Family& zeta, const GSet& x,
                                        const FiniteGroup& g) {
  const int n = g.order();
  PhaseTable2Family out(x.size(), n);
  for (int p = 0; p < x.size(); ++p)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out.at(p, a, b) = zeta(p, g.mult(a, b)) / (zeta(x.act(p, a), b) * zeta(p, a));
  return out;
}

PhaseTable3 coboundary_of_2(const Cochain2& z, const FiniteGroup& g) {
  const int n = g.order();
  PhaseTable3 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int k = 0; k < n; ++k)
        out.at(a, b, k) =
            z(b, k) * z(a, g.mult(b, k)) / (z(a, b) * z(g.mult(a, b), k));
  return out;
}

// --- Smith normal form over the integers ---

namespace {

constexpr long long kOverflowGuard = 1ll << 40;

void check_magnitude(const IMat& a) {
  if (a.size() > 0 && a.cwiseAbs().maxCoeff() > kOverflowGuard)
    throw Error("integer elimination overflow guard tripped");
}

}  // namespace

SmithDecomposition smith_normal_form(IMat a) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  IMat u = IMat::Identity(m, m);
  IMat v = IMat::Identity(n, n);

  const int tmax = std::min(m, n);
  for (int t = 0; t < tmax; ++t) {
    // Pick the nonzero entry of smallest magnitude as pivot.
    int pi = -1, pj = -1;
    long long best = 0;
    for (int i = t; i < m; ++i)
      for (int j = t; j < n; ++j) {
        const long long val = std::llabs(a(i, j));
        if (val != 0 && (pi < 0 || val < best)) {
          best = val;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // remaining submatrix is zero
    if (pi != t) {
      a.row(pi).swap(a.row(t));
      u.row(pi).swap(u.row(t));
    }
    if (pj != t) {
      a.col(pj).swap(a.col(t));
      v.col(pj).swap(v.col(t));
    }

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < m; ++i) {
        if (a(i, t) == 0) continue;
        const long long q = a(i, t) / a(t, t);
        if (q != 0) {
          a.row(i) -= q * a.row(t);
          u.row(i) -= q * u.row(t);
        }
        if (a(i, t) != 0) {  // remainder is a smaller pivot
          a.row(i).swap(a.row(t));
          u.row(i).swap(u.row(t));
          clean = false;
        }
      }
      for (int j = t + 1; j < n; ++j) {
        if (a(t, j) == 0) continue;
        const long long q = a(t, j) / a(t, t);
        if (q != 0) {
          a.col(j) -= q * a.col(t);
          v.col(j) -= q * v.col(t);
        }
        if (a(t, j) != 0) {
          a.col(j).swap(a.col(t));
          v.col(j).swap(v.col(t));
          clean = false;
        }
      }
      check_magnitude(a);
    }
  }
  return SmithDecomposition{std::move(u), std::move(v), std::move(a)};
}

namespace {

// Distance from v to the nearest p/q with 1 <= q <= qmax; ties keep smallest q.
double nearest_rational(double v, int qmax, int* den_out) {
  double best = std::numeric_limits<double>::infinity();
  int bq = 1;
  long long bp = 0;
  for (int q = 1; q <= qmax; ++q) {
    const long long p = std::llround(v * q);
    const double d = std::abs(v - static_cast<double>(p) / q);
    if (d < best - 1e-15) {
      best = d;
      bq = q;
      bp = p;
    }
  }
  if (den_out) {
    // reduce p/q
    long long g = std::gcd(std::llabs(bp), static_cast<long long>(bq));
    *den_out = static_cast<int>(bq / (g == 0 ? 1 : g));
  }
  return best;
}

}  // namespace

Mod1Solution solve_mod1(const IMat& a, const RVec& b, int denom_bound) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  SmithDecomposition s = smith_normal_form(a);
  const RVec bp = s.u.cast<double>() * b;

  Mod1Solution sol;
  sol.solvable = true;
  RVec y = RVec::Zero(n);
  const int r = std::min(m, n);
  for (int i = 0; i < m; ++i) {
    const long long di = (i < r) ? s.d(i, i) : 0;
    if (di != 0) {
      y(i) = bp(i) / static_cast<double>(di);
    } else {
      int den = 1;
      const double drat = nearest_rational(bp(i), std::max(denom_bound, 1), &den);
      if (drat > tol::kClassRational)
        throw ValidationError(
            "class decision: obstruction component is not near any rational "
            "with bounded denominator — inputs are not consistent cocycles");
      const double dint = std::abs(bp(i) - std::llround(bp(i)));
      sol.max_violation = std::max(sol.max_violation, dint);
      if (dint > tol::kClassRational) sol.solvable = false;
    }
  }
  if (sol.solvable) sol.x = s.v.cast<double>() * y;
  return sol;
}

// --- class decisions ---

namespace {

// Coboundary operator C^2(G) -> C^3(G) as an integer matrix; rows (g,h,k)
// lexicographic, columns (g,h) lexicographic.
IMat delta2_matrix(const FiniteGroup& g) {
  const int n = g.order();
  IMat a = IMat::Zero(n * n * n, n * n);
  auto col = [n](int p, int q) { return p * n + q; };
  int row = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k, ++row) {
        a(row, col(q, k)) += 1;
        a(row, col(p, g.mult(q, k))) += 1;
        a(row, col(p, q)) -= 1;
        a(row, col(g.mult(p, q), k)) -= 1;
      }
  return a;
}

Cochain2 cochain2_from(const RVec& x, int n, int offset = 0) {
  Cochain2 z{n, std::vector<Complex>(static_cast<size_t>(n) * n)};
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      z.v[static_cast<size_t>(p) * n + q] = from_log_phase(x(offset + p * n + q));
  return z;
}

Cochain1Family cochain1_from(const RVec& x, int nx, int n, int offset = 0) {
  Cochain1Family zeta{nx, n, std::vector<Complex>(static_cast<size_t>(nx) * n)};
  for (int p = 0; p < nx; ++p)
    for (int a = 0; a < n; ++a)
      zeta.v[static_cast<size_t>(p) * n + a] = from_log_phase(x(offset + p * n + a));
  return zeta;
}

}  // namespace

CoboundaryReport class_equal_3(const PhaseTable3& c, const PhaseTable3& chat,
                               const FiniteGroup& g, double cocycle_tol) {
  const int n = g.order();
  if (check_3cocycle(c, g) > cocycle_tol || check_3cocycle(chat, g) > cocycle_tol)
    throw ValidationError("class_equal_3: input fails the 3-cocycle condition");

  const IMat a = delta2_matrix(g);
  RVec b(n * n * n);
  int row = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k, ++row) b(row) = log_phase(chat(p, q, k) / c(p, q, k));

  Mod1Solution sol = solve_mod1(a, b, n * n);
  CoboundaryReport rep;
  rep.solvable = sol.solvable;
  rep.max_violation = sol.max_violation;
  if (sol.solvable) {
    Cochain2 z = cochain2_from(sol.x, n);
    const PhaseTable3 dz = coboundary_of_2(z, g);
    double res = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int k = 0; k < n; ++k)
          res = std::max(res, std::abs(dz(p, q, k) * c(p, q, k) - chat(p, q, k)));
    if (res > tol::kParallel)
      throw Error("class_equal_3: witness failed to reproduce the target");
    rep.witness_z = std::move(z);
  }
  return rep;
}

CoboundaryReport class_equal_T(const PhaseTable2Family& sigma, const PhaseTable3& c,
                               const PhaseTable2Family& sigma_hat, const PhaseTable3& chat,
                               const GSet& x, const FiniteGroup& g, double pentagon_tol) {
  const int n = g.order();
  const int nx = x.size();
  if (check_pentagon(sigma, c, x, g) > pentagon_tol ||
      check_pentagon(sigma_hat, chat, x, g) > pentagon_tol)
    throw ValidationError("class_equal_T: input pair fails the pentagon");

  // Unknowns: zeta (nx*n) then z (n*n).
  const int ncols = nx * n + n * n;
  const int nrows = nx * n * n + n * n * n;
  IMat a = IMat::Zero(nrows, ncols);
  RVec b(nrows);
  auto zeta_col = [n](int p, int q) { return p * n + q; };
  auto z_col = [n, nx](int p, int q) { return nx * n + p * n + q; };
  int row = 0;
  // sigma_hat = dzeta . sigma . conj(z)
  for (int p = 0; p < nx; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k, ++row) {
        a(row, zeta_col(p, g.mult(q, k))) += 1;
        a(row, zeta_col(x.act(p, q), k)) -= 1;
        a(row, zeta_col(p, q)) -= 1;
        a(row, z_col(q, k)) -= 1;
        b(row) = log_phase(sigma_hat(p, q, k) / sigma(p, q, k));
      }
  // chat = dz . c
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k, ++row) {
        a(row, z_col(q, k)) += 1;
        a(row, z_col(p, g.mult(q, k))) += 1;
        a(row, z_col(p, q)) -= 1;
        a(row, z_col(g.mult(p, q), k)) -= 1;
        b(row) = log_phase(chat(p, q, k) / c(p, q, k));
      }

  Mod1Solution sol = solve_mod1(a, b, std::max(n * n, nx * n));
  CoboundaryReport rep;
  rep.solvable = sol.solvable;
  rep.max_violation = sol.max_violation;
  if (sol.solvable) {
    Cochain1Family zeta = cochain1_from(sol.x, nx, n);
    Cochain2 z = cochain2_from(sol.x, n, nx * n);
    const PhaseTable2Family dzeta = coboundary_of_1family(zeta, x, g);
    const PhaseTable3 dz = coboundary_of_2(z, g);
    double res = 0.0;
    for (int p = 0; p < nx; ++p)
      for (int q = 0; q < n; ++q)
        for (int k = 0; k < n; ++k)
          res = std::max(res, std::abs(dzeta(p, q, k) * sigma(p, q, k) *
                                           std::conj(z(q, k)) -
                                       sigma_hat(p, q, k)));
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int k = 0; k < n; ++k)
          res = std::max(res, std::abs(dz(p, q, k) * c(p, q, k) - chat(p, q, k)));
    if (res > tol::kParallel)
      throw Error("class_equal_T: witness failed to reproduce the target");
    rep.witness_zeta = std::move(zeta);
    rep.witness_z = std::move(z);
  }
  return rep;
}

CoboundaryReport sigma_equivalence_report(const PhaseTable2Family& sigma,
                                          const PhaseTable2Family& sigma_prime,
                                          const GSet& x, const FiniteGroup& g) {
  const int n = g.order();
  const int nx = x.size();
  // Both families must be twisted by the same 3-cocycle.
  const auto d1 = twisted_differential(sigma, x, g);
  const auto d2 = twisted_differential(sigma_prime, x, g);
  for (int p = 0; p < nx; ++p)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int k = 0; k < n; ++k)
          if (std::abs(d1[p](a, b, k) - d2[p](a, b, k)) > 1e-6)
            throw ValidationError(
                "sigma_equivalence: inputs are twisted by different 3-cocycles");

  IMat a = IMat::Zero(nx * n * n, nx * n);
  RVec b(nx * n * n);
  auto col = [n](int p, int q) { return p * n + q; };
  int row = 0;
  for (int p = 0; p < nx; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k, ++row) {
        a(row, col(p, g.mult(q, k))) += 1;
        a(row, col(x.act(p, q), k)) -= 1;
        a(row, col(p, q)) -= 1;
        b(row) = log_phase(sigma_prime(p, q, k) / sigma(p, q, k));
      }

  Mod1Solution sol = solve_mod1(a, b, std::max(n * n, nx * n));
  CoboundaryReport rep;
  rep.solvable = sol.solvable;
  rep.max_violation = sol.max_violation;
  if (sol.solvable) {
    Cochain1Family alpha = cochain1_from(sol.x, nx, n);
    const PhaseTable2Family dalpha = coboundary_of_1family(alpha, x, g);
    double res = 0.0;
    for (int p = 0; p < nx; ++p)
      for (int q = 0; q < n; ++q)
        for (int k = 0; k < n; ++k)
          res = std::max(res,
                         std::abs(sigma(p, q, k) * dalpha(p, q, k) - sigma_prime(p, q, k)));
    if (res > tol::kParallel)
      throw Error("sigma_equivalence: witness failed to reproduce the target");
    rep.witness_zeta = std::move(alpha);
  }
  return rep;
}

RestrictedSigma restrict_sigma_to_H(const PhaseTable2Family& sigma, const PhaseTable3& c,
                                    const GSet& x, const FiniteGroup& g,
                                    const std::vector<int>& h_elements) {
  Subgroup sub = subgroup_structure(g, h_elements);
  const int m = sub.group.order();
  const int nx = x.size();
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < nx; ++p)
      if (x.act(p, sub.elements[i]) != p)
        throw ValidationError("restrict_sigma_to_H: subgroup does not fix the G-set");

  PhaseTable3 c_h(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        c_h.at(i, j, k) = c(sub.elements[i], sub.elements[j], sub.elements[k]);

  // Find z on H with dz = c|_H.
  CoboundaryReport triv = class_equal_3(PhaseTable3(m), c_h, sub.group);
  if (!triv.solvable)
    throw ValidationError(
        "restrict_sigma_to_H: c restricted to H is not a coboundary — "
        "inconsistent input");
  const Cochain2& z = *triv.witness_z;

  PhaseTable2Family out(nx, m);
  for (int p = 0; p < nx; ++p)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        out.at(p, i, j) = sigma(p, sub.elements[i], sub.elements[j]) * z(i, j);

  double res = 0.0;
  for (int p = 0; p < nx; ++p)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const Complex lhs = out(p, i, j) * out(p, sub.group.mult(i, j), k);
          const Complex rhs = out(p, j, k) * out(p, i, sub.group.mult(j, k));
          res = std::max(res, std::abs(lhs - rhs));
        }
  return RestrictedSigma{std::move(sub), std::move(out), res, z};
}

PhaseTable3 normalize_3cocycle(const PhaseTable3& c, const FiniteGroup& g) {
  const int n = g.order();
  // Rows: triples containing the identity; solve dz(t) = conj(c(t)) there.
  const IMat full = delta2_matrix(g);
  std::vector<int> rows;
  RVec bfull(n * n * n);
  int row = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k, ++row) {
        bfull(row) = log_phase(Complex(1.0, 0.0) / c(p, q, k));
        if (p == 0 || q == 0 || k == 0) rows.push_back(row);
      }
  IMat a(rows.size(), n * n);
  RVec b(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    a.row(i) = full.row(rows[i]);
    b(i) = bfull(rows[i]);
  }
  Mod1Solution sol = solve_mod1(a, b, n * n);
  if (!sol.solvable)
    throw ValidationError("normalize_3cocycle: table cannot be normalized");
  const PhaseTable3 dz = coboundary_of_2(cochain2_from(sol.x, n), g);
  PhaseTable3 out(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k) {
        Complex v = c(p, q, k) * dz(p, q, k);
        if (p == 0 || q == 0 || k == 0) {
          if (std::abs(v - 1.0) > 1e-6)
            throw Error("normalize_3cocycle: identity entries did not normalize");
          v = Complex(1.0, 0.0);
        }
        out.at(p, q, k) = v;
      }
  return out;
}

PhaseTable2Family normalize_2family(const PhaseTable2Family& sigma, const GSet& x,
                                    const FiniteGroup& g) {
  const int n = g.order();
  const int nx = x.size();
  std::vector<std::array<int, 3>> rows;
  for (int p = 0; p < nx; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k)
        if (q == 0 || k == 0) rows.push_back({p, q, k});

  IMat a = IMat::Zero(rows.size(), nx * n);
  RVec b(rows.size());
  auto col = [n](int p, int q) { return p * n + q; };
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto [p, q, k] = rows[i];
    a(i, col(p, g.mult(q, k))) += 1;
    a(i, col(x.act(p, q), k)) -= 1;
    a(i, col(p, q)) -= 1;
    b(i) = log_phase(Complex(1.0, 0.0) / sigma(p, q, k));
  }
  Mod1Solution sol = solve_mod1(a, b, std::max(n * n, nx * n));
  if (!sol.solvable)
    throw ValidationError("normalize_2family: table cannot be normalized");
  const PhaseTable2Family dalpha = coboundary_of_1family(cochain1_from(sol.x, nx, n), x, g);
  PhaseTable2Family out(nx, n);
  for (int p = 0; p < nx; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k) {
        Complex v = sigma(p, q, k) * dalpha(p, q, k);
        if (q == 0 || k == 0) {
          if (std::abs(v - 1.0) > 1e-6)
            throw Error("normalize_2family: identity entries did not normalize");
          v = Complex(1.0, 0.0);
        }
        out.at(p, q, k) = v;
      }
  return out;
}

}  // namespace mpuphase
