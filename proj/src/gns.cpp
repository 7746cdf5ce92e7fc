#include "mpuphase/gns.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mpuphase/validate.hpp"

namespace mpuphase {

namespace {

using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr long kMaxDenseEntries = 1L << 23;

long window_dim_checked(int phys, int sites, int bond, const char* what) {
  if (sites < 0) throw ValidationError(std::string(what) + ": negative window length");
  if (phys < 1 || bond < 1) throw ValidationError(std::string(what) + ": empty tensor");
  long dim = static_cast<long>(bond) * bond;
  for (int t = 0; t < sites; ++t) {
    dim *= phys;
    if (dim > (1L << 22))
      throw ResourceError(std::string(what) + ": window dimension " + std::to_string(dim) +
                          " exceeds the supported size");
  }
  return dim;
}

void check_vector(const WindowHilbert& h, const WindowVector& psi, const char* what) {
  if (psi.data.size() != h.dim())
    throw ValidationError(std::string(what) + ": vector length does not match the window");
}

// One site appended on the right: the bond matrix is right-multiplied,
// out[(s d + i), (a, b')] = sum_b psi[s, (a, b)] A_i(b, b').
Vec append_site(const MpsTensor& a, const Vec& psi) {
  const int d = a.phys(), db = a.bond();
  const long blocks = psi.size() / (static_cast<long>(db) * db);
  Vec out(psi.size() * d);
  for (long s = 0; s < blocks; ++s) {
    Eigen::Map<const RowMat> m(psi.data() + s * db * db, db, db);
    for (int i = 0; i < d; ++i)
      Eigen::Map<RowMat>(out.data() + (s * d + i) * static_cast<long>(db) * db, db, db) =
          m * a[i];
  }
  return out;
}

Mat embed_cols(const MpsTensor& a, int m, int n, const Mat& cols) {
  if (m == n) return cols;
  long dim = cols.rows();
  for (int t = n; t < m; ++t) dim *= a.phys();
  Mat out(dim, cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Vec v = cols.col(j);
    for (int t = n; t < m; ++t) v = append_site(a, v);
    out.col(j) = v;
  }
  return out;
}

Mat metric_cols(const WindowHilbert& h, const Mat& cols) {
  const int db = h.bond;
  const long blocks = h.dim() / (static_cast<long>(db) * db);
  Mat out(cols.rows(), cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j)
    for (long s = 0; s < blocks; ++s)
      Eigen::Map<RowMat>(out.col(j).data() + s * db * db, db, db) =
          h.rho * Eigen::Map<const RowMat>(cols.col(j).data() + s * db * db, db, db);
  return out;
}

// The g row applied to every physical digit of a window column, both row
// bonds left open; result indexed gl * Dg + gr.
std::vector<Vec> row_sweep(const MpoTensor& row, int sites, const Vec& v) {
  const int d = row.phys(), dg = row.bond();
  std::vector<Mat> coef(static_cast<size_t>(dg) * dg, Mat(d, d));
  for (int g1 = 0; g1 < dg; ++g1)
    for (int g2 = 0; g2 < dg; ++g2)
      for (int o = 0; o < d; ++o)
        for (int i = 0; i < d; ++i) coef[static_cast<size_t>(g1) * dg + g2](o, i) = row.at(o, i)(g1, g2);

  std::vector<Vec> out(static_cast<size_t>(dg) * dg);
  for (int gl = 0; gl < dg; ++gl) {
    std::vector<Vec> cur(dg, Vec::Zero(v.size()));
    cur[gl] = v;
    long outer = 1, rest = v.size() / d;
    for (int t = 0; t < sites; ++t) {
      std::vector<Vec> nxt(dg, Vec::Zero(v.size()));
      for (int g1 = 0; g1 < dg; ++g1)
        for (int g2 = 0; g2 < dg; ++g2) {
          const Mat& c = coef[static_cast<size_t>(g1) * dg + g2];
          for (long ob = 0; ob < outer; ++ob)
            Eigen::Map<RowMat>(nxt[g2].data() + ob * d * rest, d, rest).noalias() +=
                c * Eigen::Map<const RowMat>(cur[g1].data() + ob * d * rest, d, rest);
        }
      cur = std::move(nxt);
      outer *= d;
      rest /= d;
    }
    for (int gr = 0; gr < dg; ++gr) out[static_cast<size_t>(gl) * dg + gr] = std::move(cur[gr]);
  }
  return out;
}

// Boundary tiles contracted onto the open row bonds: cap_right merges
// (gr, b) into the target right bond, cap_left merges (gl, a) into the
// target left bond.
Vec apply_caps(const std::vector<Vec>& sw, const Mat& cap_left, const Mat& cap_right, int dg,
               int ds, int dt, long nstr) {
  Vec out = Vec::Zero(nstr * dt * dt);
  for (int gl = 0; gl < dg; ++gl) {
    RowMat tmp = RowMat::Zero(nstr * ds, dt);
    for (int gr = 0; gr < dg; ++gr) {
      const Vec& w = sw[static_cast<size_t>(gl) * dg + gr];
      tmp.noalias() +=
          Eigen::Map<const RowMat>(w.data(), nstr * ds, ds) * cap_right.middleRows(gr * ds, ds);
    }
    const Mat lw = cap_left.middleCols(gl * ds, ds);
    for (long s = 0; s < nstr; ++s)
      Eigen::Map<RowMat>(out.data() + s * dt * dt, dt, dt).noalias() +=
          lw * tmp.middleRows(s * ds, ds);
  }
  return out;
}

// Shared u/w pipeline: append the source tensor out to m sites, run the row
// with open bonds, contract the boundary tiles, rescale.
Mat uw_apply(const MpoTensor& row, const MpsTensor& app, const Mat& cap_left,
             const Mat& cap_right, int m, int n, Complex scale, const Mat& cols) {
  const int d = app.phys(), ds = app.bond();
  const int dt = static_cast<int>(cap_left.rows());
  long nstr = 1;
  for (int t = 0; t < m; ++t) nstr *= d;
  Mat out(nstr * dt * dt, cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    Vec v = cols.col(j);
    for (int t = n; t < m; ++t) v = append_site(app, v);
    out.col(j) = scale * apply_caps(row_sweep(row, m, v), cap_left, cap_right, row.bond(), ds,
                                    dt, nstr);
  }
  return out;
}

WindowHilbert finish_space(const MpsTensor& a, Mat rho, int sites, int x, const char* what) {
  WindowHilbert h;
  h.x = x;
  h.sites = sites;
  h.phys = a.phys();
  h.bond = a.bond();
  h.a = a;
  h.rho = std::move(rho);
  window_dim_checked(h.phys, h.sites, h.bond, what);

  const double canon = canonical_residual(a);
  if (!(canon <= tol::kDefault))
    throw ValidationError(std::string(what) + ": tensor is not right-canonical (residual " +
                          std::to_string(canon) + ")");
  if (h.rho.rows() != h.bond || h.rho.cols() != h.bond)
    throw ValidationError(std::string(what) + ": metric dimension does not match the bond");
  if (residual_norm(h.rho - h.rho.adjoint()) > tol::kDefault)
    throw ValidationError(std::string(what) + ": metric is not hermitian");
  if (std::abs(h.rho.trace() - Complex(1.0, 0.0)) > tol::kDefault)
    throw ValidationError(std::string(what) + ": metric trace is not one");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h.rho + h.rho.adjoint()));
  if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() >
                                       tol::kExactish * std::max(es.eigenvalues().maxCoeff(), 1.0)))
    throw ValidationError(std::string(what) + ": metric is not positive definite");
  Mat fp = Mat::Zero(h.bond, h.bond);
  for (int i = 0; i < h.phys; ++i) fp += a[i].adjoint() * h.rho * a[i];
  if (residual_norm(fp - h.rho) > tol::kDefault)
    throw ValidationError(std::string(what) + ": metric is not a left fixed point");
  return h;
}

double relative_distance(const Mat& a, const Mat& b) {
  const double scale = std::max(b.norm(), 1e-300);
  return (a - b).norm() / scale;
}

}  // namespace

WindowHilbert window_space(PairCache& pairs, int x, int sites) {
  const MpsTensor& a = pairs.mps(x);
  return finish_space(a, left_fixed_point(a), sites, x, "window space");
}

WindowHilbert window_space(const MpsTensor& a, const Mat& rho, int sites, int x) {
  return finish_space(a, rho, sites, x, "window space");
}

WindowVector metric_image(const WindowHilbert& h, const WindowVector& psi) {
  check_vector(h, psi, "metric image");
  return {metric_cols(h, psi.data)};
}

Complex window_inner(const WindowHilbert& h, const WindowVector& psi, const WindowVector& chi) {
  check_vector(h, psi, "window inner");
  check_vector(h, chi, "window inner");
  return psi.data.dot(metric_cols(h, chi.data).col(0));
}

double window_norm(const WindowHilbert& h, const WindowVector& psi) {
  return std::sqrt(std::max(0.0, std::real(window_inner(h, psi, psi))));
}

WindowVector omega_vector(const WindowHilbert& h) {
  Vec v(static_cast<long>(h.bond) * h.bond);
  for (int a = 0; a < h.bond; ++a)
    for (int b = 0; b < h.bond; ++b) v[static_cast<long>(a) * h.bond + b] = a == b ? 1.0 : 0.0;
  for (int t = 0; t < h.sites; ++t) v = append_site(h.a, v);
  return {std::move(v)};
}

WindowVector random_window_vector(const WindowHilbert& h, RandomStream& rng) {
  Vec v(h.dim());
  for (long i = 0; i < v.size(); ++i) v[i] = rng.gaussian_complex();
  WindowVector psi{std::move(v)};
  const double norm = window_norm(h, psi);
  if (!(norm > 0.0)) throw Error("random window vector: degenerate draw");
  psi.data /= norm;
  return psi;
}

WindowMap embed(const WindowHilbert& from, int m) {
  if (m < from.sites)
    throw ValidationError("embed: target window " + std::to_string(m) +
                          " is shorter than the source " + std::to_string(from.sites));
  WindowHilbert target = from;
  target.sites = m;
  const long td = window_dim_checked(from.phys, m, from.bond, "embed");
  if (td * from.dim() > kMaxDenseEntries)
    throw ResourceError("embed: dense map would exceed the supported size");
  WindowMap f{from, target, embed_cols(from.a, m, from.sites, identity(static_cast<int>(from.dim())))};
  // Certify the isometry in the two metrics before handing the map out.
  const Mat gram = f.m.adjoint() * metric_cols(f.target, f.m);
  const Mat gn = metric_cols(from, identity(static_cast<int>(from.dim())));
  if (relative_distance(gram, gn) > tol::kTight)
    throw Error("embed: append chain failed the isometry certificate");
  return f;
}

WindowVector apply(const WindowMap& f, const WindowVector& psi) {
  check_vector(f.source, psi, "window map");
  return {f.m * psi.data};
}

WindowMap compose(const WindowMap& g, const WindowMap& f) {
  if (g.source.x != f.target.x || g.source.sites != f.target.sites ||
      g.source.dim() != f.target.dim())
    throw ValidationError("compose: inner windows do not match");
  return {f.source, g.target, g.m * f.m};
}

Mat represent_apply(const WindowHilbert& h, const WindowOperator& o, const Mat& cols) {
  if (o.phys != h.phys)
    throw ValidationError("represent: operator and window physical dimensions differ");
  if (o.left < 0 || o.right() >= h.sites)
    throw ValidationError("represent: support [" + std::to_string(o.left) + ", " +
                          std::to_string(o.right()) + "] overflows the window [0, " +
                          std::to_string(h.sites) + ")");
  if (cols.rows() != h.dim())
    throw ValidationError("represent: column length does not match the window");
  const long dop = ipow(h.phys, o.width);
  long outer = 1;
  for (int t = 0; t < o.left; ++t) outer *= h.phys;
  const long rest = h.dim() / (outer * dop);
  Mat out(cols.rows(), cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j)
    for (long ob = 0; ob < outer; ++ob)
      Eigen::Map<RowMat>(out.col(j).data() + ob * dop * rest, dop, rest).noalias() =
          o.mat * Eigen::Map<const RowMat>(cols.col(j).data() + ob * dop * rest, dop, rest);
  return out;
}

WindowMap represent(const WindowHilbert& h, const WindowOperator& o) {
  if (h.dim() > tol::kDenseEigenMaxDim)
    throw ResourceError("represent: window dimension " + std::to_string(h.dim()) +
                        " too large to materialize");
  return {h, h, represent_apply(h, o, identity(static_cast<int>(h.dim())))};
}

Complex state_expectation(const MpsTensor& a, const Mat& rho, const WindowOperator& o) {
  if (o.phys != a.phys())
    throw ValidationError("state expectation: operator and tensor physical dimensions differ");
  if (o.left < 0)
    throw ValidationError("state expectation: support must sit in the half-infinite chain");
  const long dop = ipow(a.phys(), o.width);
  if (dop > tol::kDenseEigenMaxDim)
    throw ResourceError("state expectation: support too wide to enumerate");
  std::vector<Mat> chain(static_cast<size_t>(dop));
  for (long t = 0; t < dop; ++t) {
    // leftmost site of the support is the most significant digit of t
    Mat b = identity(a.bond());
    for (int s = 0; s < o.width; ++s) {
      long div = 1;
      for (int u = 0; u < o.width - 1 - s; ++u) div *= a.phys();
      b = b * a[static_cast<int>((t / div) % a.phys())];
    }
    chain[static_cast<size_t>(t)] = std::move(b);
  }
  Complex acc(0.0, 0.0);
  for (long tp = 0; tp < dop; ++tp)
    for (long t = 0; t < dop; ++t) {
      const Complex c = o.mat(tp, t);
      if (c == Complex(0.0, 0.0)) continue;
      acc += c * (chain[static_cast<size_t>(tp)].adjoint() * rho * chain[static_cast<size_t>(t)])
                     .trace();
    }
  return acc;
}

int u_margin(PairCache& pairs, int x, int g) {
  const int xg = pairs.gset().act(x, g);
  const int tile = std::max(pairs.action(x, g).window, pairs.absorption(x, g).window);
  const int inj = std::max(pairs.mps_injectivity(x), pairs.mps_injectivity(xg));
  return tile + inj;
}

namespace {

struct UwCalibration {
  double lambda = 1.0;        // norm scale of the conjugate-row map
  Complex u_scale{1.0, 0.0};  // complex scale of the straight-row map
  double spread = 0.0;        // worst norm-identity deviation across samples
  double adjoint_residual = 0.0;
};

// Scales are window-independent, so they are always measured at the smallest
// admissible pair of windows; maps at other windows reuse them, and the
// zipper law certifies the transport.
UwCalibration calibrate_uw(PairCache& pairs, int x, int g) {
  const int xg = pairs.gset().act(x, g);
  const int margin = u_margin(pairs, x, g);
  const int n0 = std::max(pairs.mps_injectivity(x), pairs.mps_injectivity(xg)) + 1;
  const int m0 = n0 + margin;
  const WindowHilbert hxn = window_space(pairs, x, n0);
  const WindowHilbert hxm = window_space(pairs, x, m0);
  const WindowHilbert hgn = window_space(pairs, xg, n0);
  const WindowHilbert hgm = window_space(pairs, xg, m0);
  const MpoTensor wrow = dagger(pairs.mpo(g));
  const ChainReplacementPair& act = pairs.action(x, g);
  const ChainReplacementPair& abs_ = pairs.absorption(x, g);
  const Mat wraw = uw_apply(wrow, pairs.mps(x), act.w, act.v, m0, n0, Complex(1.0, 0.0),
                            identity(static_cast<int>(hxn.dim())));
  const Mat uraw = uw_apply(pairs.mpo(g), pairs.mps(xg), abs_.w, abs_.v, m0, n0,
                            Complex(1.0, 0.0), identity(static_cast<int>(hgn.dim())));

  UwCalibration cal;
  RandomStream rng(0xB5E77EDBull ^ (static_cast<std::uint64_t>(x) << 24) ^
                   (static_cast<std::uint64_t>(g) << 8));
  double qs[5], mean = 0.0;
  for (int i = 0; i < 5; ++i) {
    const WindowVector psi = random_window_vector(hxn, rng);
    const WindowVector img{wraw * psi.data};
    qs[i] = std::real(window_inner(hgm, img, img));
    mean += qs[i] / 5.0;
  }
  if (!(mean > 0.0)) throw ValidationError("u/w calibration: conjugate-row map vanishes");
  for (double q : qs) cal.spread = std::max(cal.spread, std::abs(q - mean) / mean);
  if (cal.spread > tol::kParallel)
    throw ValidationError("u/w calibration: norm identity drifts across samples (spread " +
                          std::to_string(cal.spread) + ")");
  cal.lambda = std::sqrt(mean);

  const Mat phix = embed_cols(pairs.mps(x), m0, n0, identity(static_cast<int>(hxn.dim())));
  const Mat phig = embed_cols(pairs.mps(xg), m0, n0, identity(static_cast<int>(hgn.dim())));
  const Mat a = phix.adjoint() * metric_cols(hxm, uraw);
  const Mat b = (wraw / Complex(cal.lambda, 0.0)).adjoint() * metric_cols(hgm, phig);
  const Complex num = (b.adjoint() * a).trace();
  const double den = std::real((b.adjoint() * b).trace());
  if (!(den > 0.0)) throw ValidationError("u/w calibration: degenerate adjointness gram");
  cal.u_scale = num / den;
  if (!(std::abs(cal.u_scale) > 0.0))
    throw ValidationError("u/w calibration: straight-row map vanishes");
  cal.adjoint_residual = relative_distance(a / cal.u_scale, b);

  const double us = std::norm(cal.u_scale);
  for (int i = 0; i < 5; ++i) {
    const WindowVector chi = random_window_vector(hgn, rng);
    const WindowVector img{uraw * chi.data};
    const double q = std::real(window_inner(hxm, img, img)) / us;
    cal.spread = std::max(cal.spread, std::abs(q - 1.0));
  }
  if (cal.spread > tol::kParallel)
    throw ValidationError("u/w calibration: norm identity drifts across samples (spread " +
                          std::to_string(cal.spread) + ")");
  return cal;
}

void check_uw_windows(PairCache& pairs, int x, int g, int m, int n, const char* what) {
  if (n < 1) throw ValidationError(std::string(what) + ": source window must be positive");
  const int margin = u_margin(pairs, x, g);
  if (m - n < margin)
    throw ValidationError(std::string(what) + ": window margin " + std::to_string(m - n) +
                          " below the required minimum " + std::to_string(margin));
}

Mat w_matrix(PairCache& pairs, int x, int g, int m, int n, const UwCalibration& cal,
             const Mat& cols) {
  const ChainReplacementPair& act = pairs.action(x, g);
  return uw_apply(dagger(pairs.mpo(g)), pairs.mps(x), act.w, act.v, m, n,
                  Complex(1.0 / cal.lambda, 0.0), cols);
}

Mat u_matrix(PairCache& pairs, int x, int g, int m, int n, const UwCalibration& cal,
             const Mat& cols) {
  const int xg = pairs.gset().act(x, g);
  const ChainReplacementPair& abs_ = pairs.absorption(x, g);
  return uw_apply(pairs.mpo(g), pairs.mps(xg), abs_.w, abs_.v, m, n,
                  Complex(1.0, 0.0) / cal.u_scale, cols);
}

}  // namespace

WindowMap w_window(PairCache& pairs, int x, int g, int m, int n) {
  check_uw_windows(pairs, x, g, m, n, "w window");
  const int xg = pairs.gset().act(x, g);
  WindowHilbert src = window_space(pairs, x, n);
  WindowHilbert tgt = window_space(pairs, xg, m);
  if (src.dim() * tgt.dim() > kMaxDenseEntries)
    throw ResourceError("w window: dense map would exceed the supported size");
  const UwCalibration cal = calibrate_uw(pairs, x, g);
  Mat mat = w_matrix(pairs, x, g, m, n, cal, identity(static_cast<int>(src.dim())));
  return {std::move(src), std::move(tgt), std::move(mat)};
}

WindowMap u_window(PairCache& pairs, int x, int g, int m, int n) {
  check_uw_windows(pairs, x, g, m, n, "u window");
  const int xg = pairs.gset().act(x, g);
  WindowHilbert src = window_space(pairs, xg, n);
  WindowHilbert tgt = window_space(pairs, x, m);
  if (src.dim() * tgt.dim() > kMaxDenseEntries)
    throw ResourceError("u window: dense map would exceed the supported size");
  const UwCalibration cal = calibrate_uw(pairs, x, g);
  Mat mat = u_matrix(pairs, x, g, m, n, cal, identity(static_cast<int>(src.dim())));
  return {std::move(src), std::move(tgt), std::move(mat)};
}

namespace {

// d^n x d^n row blocks at fixed boundary bonds, indexed a * bond + b.
std::vector<Mat> edge_bond_chain(const MpoTensor& u, int n) {
  const int d = u.phys(), dg = u.bond();
  std::vector<Mat> site(static_cast<size_t>(dg) * dg, Mat(d, d));
  for (int a = 0; a < dg; ++a)
    for (int b = 0; b < dg; ++b)
      for (int o = 0; o < d; ++o)
        for (int i = 0; i < d; ++i) site[static_cast<size_t>(a) * dg + b](o, i) = u.at(o, i)(a, b);
  std::vector<Mat> cur(static_cast<size_t>(dg) * dg);
  for (int a = 0; a < dg; ++a)
    for (int b = 0; b < dg; ++b)
      cur[static_cast<size_t>(a) * dg + b] = Mat::Constant(1, 1, a == b ? 1.0 : 0.0);
  for (int t = 0; t < n; ++t) {
    std::vector<Mat> nxt(static_cast<size_t>(dg) * dg,
                         Mat::Zero(cur[0].rows() * d, cur[0].cols() * d));
    for (int a = 0; a < dg; ++a)
      for (int b = 0; b < dg; ++b)
        for (int mid = 0; mid < dg; ++mid)
          nxt[static_cast<size_t>(a) * dg + b] +=
              kron(cur[static_cast<size_t>(a) * dg + mid], site[static_cast<size_t>(mid) * dg + b]);
    cur = std::move(nxt);
  }
  return cur;
}

// Certifies the replacement of the straight row stacked over its conjugate
// by the identity row; realizes the right closure of the edge conjugation.
ChainReplacementPair edge_pair(PairCache& pairs, int g) {
  const int e = pairs.group().identity();
  if (pairs.mpo(e).bond() != 1)
    throw ValidationError("beta edge: identity representation tensor must have bond one");
  const int d = pairs.mpo(g).phys();
  if (g == e) {
    ChainReplacementPair pair;
    pair.v = Mat::Ones(1, 1);
    pair.w = Mat::Ones(1, 1);
    pair.lambda = Complex(static_cast<double>(d), 0.0);
    pair.window = 1;
    return pair;
  }
  const MpoTensor stack = mpo_times_mpo(pairs.mpo(g), dagger(pairs.mpo(g)));
  const MpoTensor& unit = pairs.mpo(e);
  return chain_replacement(TransferOperator::mpo_pair(stack, unit), TransferOperator::mpo(stack),
                           TransferOperator::mpo(unit), left_fixed_point(unit),
                           Complex(static_cast<double>(d), 0.0));
}

}  // namespace

int beta_edge_margin(PairCache& pairs, int g) { return edge_pair(pairs, g).window; }

WindowOperator beta_edge_window(PairCache& pairs, int g, const WindowOperator& o) {
  const MpoTensor& top = pairs.mpo(g);
  if (o.phys != top.phys())
    throw ValidationError("beta edge: operator and representation dimensions differ");
  if (o.left < 0)
    throw ValidationError("beta edge: support must sit in the half-infinite window");
  const ChainReplacementPair pair = edge_pair(pairs, g);
  const int d = o.phys, dg = top.bond();
  const int width = o.right() + 1 + pair.window;
  if (ipow(d, width) > tol::kDenseEigenMaxDim)
    throw ResourceError("beta edge: padded support too large to materialize");
  const Mat xe = embed(o, 0, width - 1).mat;
  const std::vector<Mat> tc = edge_bond_chain(top, width);
  const std::vector<Mat> bc = edge_bond_chain(dagger(top), width);

  // Chain-edge pairing on the left, certified closure tile on the right:
  // out = sum_{a,b,be} v[(b,be)] . top(a,b) . x . bottom(a,be).
  const auto contract = [&](const Mat& x) {
    Mat out = Mat::Zero(x.rows(), x.cols());
    for (int b = 0; b < dg; ++b)
      for (int be = 0; be < dg; ++be) {
        const Complex c = pair.v(b * dg + be, 0);
        if (std::abs(c) < 1e-300) continue;
        for (int a = 0; a < dg; ++a)
          out += c * (tc[static_cast<size_t>(a) * dg + b] * x * bc[static_cast<size_t>(a) * dg + be]);
      }
    return out;
  };
  Mat raw = contract(xe);
  const Mat unit = contract(identity(static_cast<int>(xe.rows())));
  const Complex scale = unit.trace() / static_cast<double>(unit.rows());
  if (!(std::abs(scale) > 0.0) ||
      relative_distance(unit, scale * identity(static_cast<int>(unit.rows()))) > tol::kParallel)
    throw ValidationError("beta edge: closure is not unital");
  raw /= scale;
  return {0, d, width, std::move(raw)};
}

double UwLemmaReport::max_residual() const {
  return std::max({zipper_u, zipper_w, adjointness, inverse_uw, inverse_wu, conjugation,
                   composition, sigma_modulus_drift, lambda_spread});
}

namespace {

struct LemmaGate {
  const char* name;
  double value;
};

void gate_lemmas(const std::vector<LemmaGate>& gates) {
  for (const LemmaGate& g : gates)
    if (!(g.value <= tol::kParallel))
      throw ValidationError(std::string("u/w lemmas: ") + g.name + " residual " +
                            std::to_string(g.value) + " above the certificate gate");
}

// Least-squares scalar of lhs = c . rhs with the parallelism residual.
struct ScalarFit {
  Complex value{1.0, 0.0};
  double residual = 0.0;
  double modulus_drift = 0.0;
};

ScalarFit fit_scalar(const Mat& lhs, const Mat& rhs) {
  const Complex num = (rhs.adjoint() * lhs).trace();
  const double den = std::real((rhs.adjoint() * rhs).trace());
  if (!(den > 0.0)) throw ValidationError("u/w lemmas: degenerate composition gram");
  ScalarFit fit;
  const Complex c = num / den;
  fit.residual = (lhs - c * rhs).norm() / std::max(lhs.norm(), 1e-300);
  fit.modulus_drift = std::abs(std::abs(c) - 1.0);
  fit.value = std::abs(c) > 0.0 ? c / std::abs(c) : Complex(1.0, 0.0);
  return fit;
}

LemmaWindows resolve_windows(PairCache& pairs, int x, int g, int h, LemmaWindows win) {
  const int xg = pairs.gset().act(x, g);
  const int gh = pairs.group().mult(g, h);
  const int xgh = pairs.gset().act(xg, h);
  const int margin =
      std::max({u_margin(pairs, x, g), u_margin(pairs, xg, h), u_margin(pairs, x, gh)});
  const int inj = std::max({pairs.mps_injectivity(x), pairs.mps_injectivity(xg),
                            pairs.mps_injectivity(xgh)});
  LemmaWindows w = win;
  if (w.n <= 0) w.n = inj + 1;
  if (w.m <= 0) w.m = w.n + margin;
  if (w.k <= 0) w.k = w.m + margin;
  if (w.m - w.n < margin || w.k - w.m < margin)
    throw ValidationError("u/w lemmas: window margins must be at least " +
                          std::to_string(margin) + " sites");
  return w;
}

}  // namespace

UwLemmaReport verify_u_lemmas(PairCache& pairs, int x, int g, int h, LemmaWindows windows) {
  const FiniteGroup& grp = pairs.group();
  const GSet& gs = pairs.gset();
  const int xg = gs.act(x, g), gh = grp.mult(g, h), xgh = gs.act(xg, h);
  const int d = pairs.mpo(g).phys();
  const LemmaWindows w = resolve_windows(pairs, x, g, h, windows);

  const UwCalibration cal_g = calibrate_uw(pairs, x, g);
  const UwCalibration cal_h = calibrate_uw(pairs, xg, h);
  const UwCalibration cal_gh = calibrate_uw(pairs, x, gh);

  UwLemmaReport rep;
  rep.windows = w;
  rep.lambda_spread = std::max({cal_g.spread, cal_h.spread, cal_gh.spread});
  rep.adjointness =
      std::max({cal_g.adjoint_residual, cal_h.adjoint_residual, cal_gh.adjoint_residual});

  const MpsTensor& ax = pairs.mps(x);
  const MpsTensor& axg = pairs.mps(xg);
  const WindowHilbert hx_n = window_space(pairs, x, w.n);
  const WindowHilbert hxg_n = window_space(pairs, xg, w.n);
  const WindowHilbert hxgh_n = window_space(pairs, xgh, w.n);
  const WindowHilbert hx_m = window_space(pairs, x, w.m);
  const WindowHilbert hxg_m = window_space(pairs, xg, w.m);
  const WindowHilbert hx_k = window_space(pairs, x, w.k);
  const Mat in_x = identity(static_cast<int>(hx_n.dim()));
  const Mat in_xg = identity(static_cast<int>(hxg_n.dim()));
  const Mat in_xgh = identity(static_cast<int>(hxgh_n.dim()));

  // (zip) the implementers commute with the embeds.
  rep.zipper_u = relative_distance(
      u_matrix(pairs, x, g, w.k, w.m, cal_g, embed_cols(axg, w.m, w.n, in_xg)),
      embed_cols(ax, w.k, w.m, u_matrix(pairs, x, g, w.m, w.n, cal_g, in_xg)));
  rep.zipper_w = relative_distance(
      w_matrix(pairs, x, g, w.k, w.m, cal_g, embed_cols(ax, w.m, w.n, in_x)),
      embed_cols(axg, w.k, w.m, w_matrix(pairs, x, g, w.m, w.n, cal_g, in_x)));

  // (inverse) u . w and w . u reduce to the embeds.
  rep.inverse_uw = relative_distance(
      u_matrix(pairs, x, g, w.k, w.m, cal_g, w_matrix(pairs, x, g, w.m, w.n, cal_g, in_x)),
      embed_cols(ax, w.k, w.n, in_x));
  rep.inverse_wu = relative_distance(
      w_matrix(pairs, x, g, w.k, w.m, cal_g, u_matrix(pairs, x, g, w.m, w.n, cal_g, in_xg)),
      embed_cols(axg, w.k, w.n, in_xg));

  // (conjugation) transporting a local operator through u/w matches the
  // edge-closed conjugation between the embeds.
  const int edge = beta_edge_margin(pairs, g);
  const int owidth = std::min(w.n, w.m - edge);
  if (owidth < 1)
    throw ValidationError("u/w lemmas: conjugation window cannot host the closure margin " +
                          std::to_string(edge));
  RandomStream rng(0x51D3C0DEull ^ (static_cast<std::uint64_t>(x) << 32) ^
                   (static_cast<std::uint64_t>(g) << 16) ^ static_cast<std::uint64_t>(h));
  for (int trial = 0; trial < 3; ++trial) {
    const WindowOperator o = random_window(d, 0, owidth, rng);
    const Mat lhs = u_matrix(pairs, x, g, w.k, w.m, cal_g,
                             represent_apply(hxg_m, o, w_matrix(pairs, x, g, w.m, w.n, cal_g, in_x)));
    const WindowOperator bo = beta_edge_window(pairs, g, o);
    const Mat rhs = embed_cols(
        ax, w.k, w.m, represent_apply(hx_m, bo, embed_cols(ax, w.m, w.n, in_x)));
    rep.conjugation = std::max(rep.conjugation, relative_distance(lhs, rhs));
  }

  // (composition) two implementers fuse into the third through the boundary
  // unitary of the fused rows, up to the scalar sigma'.
  DecompositionCache decos(pairs, default_block(pairs));
  const int vwidth = decos.block() + pairs.fusion(g, h).window;
  if (1 + vwidth > w.k)
    throw ValidationError("u/w lemmas: composition window cannot host the fused tile of width " +
                          std::to_string(vwidth));
  const WindowOperator vgh = v_operator(decos, g, h, vwidth);
  const Mat lhs = u_matrix(pairs, x, g, w.k, w.m, cal_g,
                           u_matrix(pairs, xg, h, w.m, w.n, cal_h, in_xgh));
  const Mat rhs = represent_apply(
      hx_k, vgh, u_matrix(pairs, x, gh, w.k, w.n, cal_gh, in_xgh));
  const ScalarFit fit = fit_scalar(lhs, rhs);
  rep.composition = fit.residual;
  rep.sigma_prime = fit.value;
  rep.sigma_modulus_drift = fit.modulus_drift;

  gate_lemmas({{"zipper (u)", rep.zipper_u},
               {"zipper (w)", rep.zipper_w},
               {"adjointness", rep.adjointness},
               {"inverse (u.w)", rep.inverse_uw},
               {"inverse (w.u)", rep.inverse_wu},
               {"conjugation", rep.conjugation},
               {"composition", rep.composition},
               {"composition modulus", rep.sigma_modulus_drift},
               {"norm identity", rep.lambda_spread}});
  return rep;
}

SigmaPrimeReport sigma_prime_table(PairCache& pairs, LemmaWindows windows) {
  const FiniteGroup& grp = pairs.group();
  const GSet& gs = pairs.gset();
  const int order = grp.order(), xsize = gs.size();

  // One shared window triple large enough for every pair in the family.
  int margin = 1, inj = 1;
  for (int x = 0; x < xsize; ++x) {
    inj = std::max(inj, pairs.mps_injectivity(x));
    for (int g = 0; g < order; ++g) margin = std::max(margin, u_margin(pairs, x, g));
  }
  LemmaWindows w = windows;
  if (w.n <= 0) w.n = inj + 1;
  if (w.m <= 0) w.m = w.n + margin;
  if (w.k <= 0) w.k = w.m + margin;
  if (w.m - w.n < margin || w.k - w.m < margin)
    throw ValidationError("sigma prime: window margins must be at least " +
                          std::to_string(margin) + " sites");

  std::map<std::pair<int, int>, UwCalibration> cals;
  const auto cal_of = [&](int x, int g) -> const UwCalibration& {
    const auto key = std::make_pair(x, g);
    auto it = cals.find(key);
    if (it == cals.end()) it = cals.emplace(key, calibrate_uw(pairs, x, g)).first;
    return it->second;
  };

  DecompositionCache decos(pairs, default_block(pairs));
  SigmaPrimeReport rep;
  rep.sigma_prime = PhaseTable2Family(xsize, order);
  for (int x = 0; x < xsize; ++x) {
    const WindowHilbert hx_k = window_space(pairs, x, w.k);
    for (int g = 0; g < order; ++g) {
      const int xg = gs.act(x, g);
      for (int h = 0; h < order; ++h) {
        const int gh = grp.mult(g, h);
        const int xgh = gs.act(xg, h);
        const int vwidth = decos.block() + pairs.fusion(g, h).window;
        if (1 + vwidth > w.k)
          throw ValidationError("sigma prime: window cannot host the fused tile of width " +
                                std::to_string(vwidth));
        const Mat in_xgh = identity(static_cast<int>(window_space(pairs, xgh, w.n).dim()));
        const Mat lhs =
            u_matrix(pairs, x, g, w.k, w.m, cal_of(x, g),
                     u_matrix(pairs, xg, h, w.m, w.n, cal_of(xg, h), in_xgh));
        const Mat rhs = represent_apply(
            hx_k, v_operator(decos, g, h, vwidth),
            u_matrix(pairs, x, gh, w.k, w.n, cal_of(x, gh), in_xgh));
        const ScalarFit fit = fit_scalar(lhs, rhs);
        rep.sigma_prime.at(x, g, h) = fit.value;
        rep.worst_residual = std::max(rep.worst_residual, fit.residual);
        rep.worst_modulus_drift = std::max(rep.worst_modulus_drift, fit.modulus_drift);
      }
    }
  }
  if (!(rep.worst_residual <= tol::kParallel))
    throw ValidationError("sigma prime: composition residual " +
                          std::to_string(rep.worst_residual) + " above the certificate gate");
  return rep;
}

}  // namespace mpuphase
