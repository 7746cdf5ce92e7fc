#include "mpuphase/automorphism.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace mpuphase {

namespace {

int checked_dim(int phys, int sites, const char* what) {
  long long dim = 1;
  for (int s = 0; s < sites; ++s) {
    dim *= phys;
    if (dim > tol::kDenseEigenMaxDim)
      throw ResourceError(std::string(what) + ": dense window of " + std::to_string(sites) +
                          " sites exceeds the materialization cap");
  }
  return static_cast<int>(dim);
}

// Chain matrices of `sites` consecutive tensors with open bond ends,
// index a * D + b -> (out, in) matrix on the window space.
std::vector<Mat> bond_chain(const MpoTensor& u, int sites) {
  const int d = u.phys(), bond = u.bond();
  std::vector<Mat> site(static_cast<size_t>(bond) * bond, Mat(d, d));
  for (int c = 0; c < bond; ++c)
    for (int b = 0; b < bond; ++b)
      for (int o = 0; o < d; ++o)
        for (int i = 0; i < d; ++i) site[c * bond + b](o, i) = u.at(o, i)(c, b);

  std::vector<Mat> cur(static_cast<size_t>(bond) * bond);
  for (int a = 0; a < bond; ++a)
    for (int b = 0; b < bond; ++b)
      cur[a * bond + b] = Mat::Constant(1, 1, a == b ? 1.0 : 0.0);
  for (int s = 0; s < sites; ++s) {
    std::vector<Mat> next(cur.size());
    for (int a = 0; a < bond; ++a)
      for (int b = 0; b < bond; ++b) {
        Mat acc = kron(cur[a * bond], site[b]);
        for (int c = 1; c < bond; ++c) acc += kron(cur[a * bond + c], site[c * bond + b]);
        next[a * bond + b] = std::move(acc);
      }
    cur = std::move(next);
  }
  return cur;
}

int effective_rank(const Eigen::VectorXd& sv) {
  if (sv.size() == 0) return 0;
  const double cut = sv(0) * 1e-8;
  int r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

// Unitary polar factor aligning an isometry's column space with the physical
// basis at the first bond index; bond-one tensors then come out exactly on
// the identity gauge, and the remaining freedom is fixed deterministically.
Mat alignment_rotation(const Mat& iso, int bond, double& conditioning) {
  const Eigen::Index r = iso.cols();
  Mat a(r, r);
  for (Eigen::Index j = 0; j < r; ++j) a.col(j) = iso.row(j * bond).adjoint();
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  conditioning = std::min(conditioning, svd.singularValues()(r - 1));
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Trace-one positive left fixed point of the row's own transfer map.
Mat boundary_weight(const MpoTensor& u, const char* what, double& gap) {
  const FixedPointPair fp = leading_fixed_points(TransferOperator::mpo(u));
  if (std::abs(fp.lambda - Complex(u.phys(), 0.0)) > 1e-6 * u.phys())
    throw ValidationError(std::string(what) +
                          ": leading transfer eigenvalue is not the physical dimension");
  gap = std::max(gap, fp.gap);
  const Mat rho = 0.5 * (fp.left + fp.left.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  if (es.info() != Eigen::Success) throw Error("boundary weight eigensolve failed");
  if (!(es.eigenvalues().minCoeff() > -1e-8 * std::max(es.eigenvalues().maxCoeff(), 1.0)))
    throw ValidationError(std::string(what) + ": boundary weight is not positive");
  return rho;
}

// Per-bond half-row matrices on [1, sites]: the v piece on the block
// [1, block] with its Schmidt leg read as those sites, then plain tensors
// out to the right edge; the right bond stays open.
std::vector<Mat> half_row(PairCache& pairs, const LocalDecomposition& dec, int sites) {
  const MpoTensor& u = pairs.mpo(dec.g);
  const int d = u.phys(), bond = u.bond();
  const int dl = ipow(d, dec.block);
  if (sites < dec.block) throw ValidationError("half row: window shorter than the block");
  checked_dim(d, sites, "half row");
  std::vector<Mat> wall(bond, Mat(dl, dl));
  for (int a = 0; a < bond; ++a)
    for (int s = 0; s < dl; ++s)
      for (int i = 0; i < dl; ++i) wall[a](s, i) = dec.v_piece(static_cast<Eigen::Index>(i) * bond + a, s);
  const std::vector<Mat> rest = bond_chain(u, sites - dec.block);
  std::vector<Mat> rows(bond);
  for (int b = 0; b < bond; ++b) {
    Mat acc = kron(wall[0], rest[b]);
    for (int a = 1; a < bond; ++a) acc += kron(wall[a], rest[a * bond + b]);
    rows[b] = std::move(acc);
  }
  return rows;
}

}  // namespace

WindowOperator identity_window(int phys, int left, int sites) {
  const int dim = ipow(phys, sites);
  return {left, phys, sites, Mat::Identity(dim, dim)};
}

WindowOperator random_window(int phys, int left, int sites, RandomStream& rng) {
  const int dim = ipow(phys, sites);
  Mat m(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) m(i, j) = rng.gaussian_complex();
  m /= m.norm();
  return {left, phys, sites, std::move(m)};
}

WindowOperator embed(const WindowOperator& x, int left, int right) {
  if (left > x.left || right < x.right())
    throw ValidationError("window embed: target interval does not contain the support");
  Mat m = kron(identity(ipow(x.phys, x.left - left)),
               kron(x.mat, identity(ipow(x.phys, right - x.right()))));
  return {left, x.phys, right - left + 1, std::move(m)};
}

WindowOperator window_product(const WindowOperator& a, const WindowOperator& b) {
  if (a.phys != b.phys) throw ValidationError("window product: physical dimensions differ");
  const int l = std::min(a.left, b.left), r = std::max(a.right(), b.right());
  return {l, a.phys, r - l + 1, embed(a, l, r).mat * embed(b, l, r).mat};
}

WindowOperator window_adjoint(const WindowOperator& a) {
  return {a.left, a.phys, a.width, a.mat.adjoint()};
}

double window_distance(const WindowOperator& a, const WindowOperator& b) {
  if (a.phys != b.phys) throw ValidationError("window distance: physical dimensions differ");
  const int l = std::min(a.left, b.left), r = std::max(a.right(), b.right());
  return (embed(a, l, r).mat - embed(b, l, r).mat).norm();
}

double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

int beta_margin(PairCache& pairs, int g) {
  return pairs.fusion(g, pairs.group().inv(g)).window;
}

WindowOperator beta_window(PairCache& pairs, int g, const WindowOperator& x,
                           int left_margin, int right_margin) {
  const FiniteGroup& grp = pairs.group();
  const int gi = grp.inv(g);
  const ChainReplacementPair& pair = pairs.fusion(g, gi);
  if (left_margin < pair.window || right_margin < pair.window)
    throw ValidationError("beta window: margins below the certified tile window");
  const MpoTensor& top = pairs.mpo(g);
  const MpoTensor& bot = pairs.mpo(gi);
  if (x.phys != top.phys())
    throw ValidationError("beta window: operator and representation dimensions differ");
  const int n = left_margin + x.sites() + right_margin;
  checked_dim(x.phys, n, "beta window");
  const int dg = top.bond(), di = bot.bond();
  const Mat xe = embed(x, x.left - left_margin, x.right() + right_margin).mat;

  // Boundary coupling across the tiles: c[(b,be),(a,al)] = (v . w)[(b,be),(a,al)];
  // the action is sum c * U_g-chain(a,b) . x . U_{g^-1}-chain(al,be).
  const Mat couple = pair.v * pair.w;
  const std::vector<Mat> tc = bond_chain(top, n);
  const std::vector<Mat> bc = bond_chain(bot, n);

  Mat out = Mat::Zero(xe.rows(), xe.cols());
  for (int a = 0; a < dg; ++a)
    for (int b = 0; b < dg; ++b) {
      Mat mix = Mat::Zero(xe.rows(), xe.cols());
      bool any = false;
      for (int al = 0; al < di; ++al)
        for (int be = 0; be < di; ++be) {
          const Complex c = couple(b * di + be, a * di + al);
          if (std::abs(c) < 1e-300) continue;
          mix += c * bc[al * di + be];
          any = true;
        }
      if (any) out += tc[a * dg + b] * (xe * mix);
    }
  return {x.left - left_margin, x.phys, n, std::move(out)};
}

double AutomorphismLawReport::max_residual() const {
  return std::max({unital, multiplicative, star, composition, contraction_excess, positivity});
}

AutomorphismLawReport check_automorphism_laws(PairCache& pairs, int samples, std::uint64_t seed) {
  const FiniteGroup& grp = pairs.group();
  const int order = grp.order();
  const int d = pairs.mpo(0).phys();
  RandomStream rng(seed);
  std::vector<int> margin(order);
  for (int g = 0; g < order; ++g) margin[g] = beta_margin(pairs, g);

  AutomorphismLawReport rep;
  for (int s = 0; s < samples; ++s) {
    const int g = static_cast<int>(rng.raw() % order);
    const int left = static_cast<int>(rng.raw() % 3) - 1;
    const int width = 1 + static_cast<int>(rng.raw() % 2);
    const WindowOperator x = random_window(d, left, width, rng);
    const WindowOperator y = random_window(d, left, width, rng);
    const int m = margin[g];

    const WindowOperator bx = beta_window(pairs, g, x, m, m);
    const WindowOperator by = beta_window(pairs, g, y, m, m);

    rep.unital = std::max(
        rep.unital,
        window_distance(beta_window(pairs, g, identity_window(d, left, width), m, m),
                        identity_window(d, left - m, width + 2 * m)));
    rep.multiplicative = std::max(
        rep.multiplicative,
        window_distance(beta_window(pairs, g, window_product(x, y), m, m),
                        window_product(bx, by)));
    rep.star = std::max(
        rep.star,
        window_distance(beta_window(pairs, g, window_adjoint(x), m, m), window_adjoint(bx)));
    rep.contraction_excess = std::max(
        rep.contraction_excess, std::max(0.0, operator_norm(bx.mat) - operator_norm(x.mat)));

    const WindowOperator pos = window_product(window_adjoint(x), x);
    const WindowOperator bp = beta_window(pairs, g, pos, m, m);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (bp.mat + bp.mat.adjoint()));
    if (es.info() != Eigen::Success) throw Error("positivity eigensolve failed");
    const double herm = 0.5 * (bp.mat - bp.mat.adjoint()).norm();
    rep.positivity = std::max(
        rep.positivity, std::max(herm, std::max(0.0, -es.eigenvalues().minCoeff())));
  }

  // Composition over every group pair, on a single-site probe to keep the
  // doubled margins inside the dense-window cap.
  const WindowOperator probe = random_window(d, 0, 1, rng);
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h) {
      const int gh = grp.mult(g, h);
      const WindowOperator inner = beta_window(pairs, h, probe, margin[h], margin[h]);
      const WindowOperator outer = beta_window(pairs, g, inner, margin[g], margin[g]);
      const int mm = std::max(margin[gh], margin[g] + margin[h]);
      rep.composition = std::max(
          rep.composition, window_distance(outer, beta_window(pairs, gh, probe, mm, mm)));
    }
  return rep;
}

LocalDecomposition build_local_decomposition(PairCache& pairs, int g, int len) {
  if (len < 1) throw ValidationError("local decomposition: block must be positive");
  const MpoTensor& u = pairs.mpo(g);
  const int d = u.phys(), bond = u.bond();
  const int dl = checked_dim(d, len, "local decomposition");
  checked_dim(d, 2 * len, "local decomposition");

  LocalDecomposition dec;
  dec.g = g;
  dec.block = len;

  const MpoTensor ub = block(u, len);
  const Eigen::Index big = static_cast<Eigen::Index>(dl) * bond;
  Mat red(big, big), blue(big, big);
  for (int o = 0; o < dl; ++o)
    for (int i = 0; i < dl; ++i) {
      const Mat& m = ub.at(o, i);
      for (int a = 0; a < bond; ++a)
        for (int b = 0; b < bond; ++b) {
          red(static_cast<Eigen::Index>(i) * bond + a, static_cast<Eigen::Index>(o) * bond + b) =
              m(a, b);
          blue(static_cast<Eigen::Index>(o) * bond + a, static_cast<Eigen::Index>(i) * bond + b) =
              m(a, b);
        }
    }

  dec.gauge_conditioning = 1.0;
  double gap = 0.0;
  dec.rho = boundary_weight(u, "local decomposition", gap);
  dec.rho_hat = boundary_weight(dagger(u), "local decomposition", gap);
  dec.boundary_gap = gap;

  // Input-side cut: split, align toward the identity gauge, reorthonormalize
  // against (1 (x) rho); the y half absorbs the inverse factor.
  Eigen::JacobiSVD<Mat> svd_red(red, Eigen::ComputeThinU | Eigen::ComputeThinV);
  dec.right_rank = effective_rank(svd_red.singularValues());
  if (dec.right_rank != dl)
    throw ValidationError("local decomposition: input-side cut rank " +
                          std::to_string(dec.right_rank) + " does not match the block dimension " +
                          std::to_string(dl) + " (block too short?)");
  const Mat x_raw = svd_red.matrixU().leftCols(dl);
  const Mat y_raw = svd_red.matrixV().conjugate().leftCols(dl) *
                    svd_red.singularValues().head(dl).cast<Complex>().asDiagonal();
  const Mat rot_red = alignment_rotation(x_raw, bond, dec.gauge_conditioning);
  const Mat x0 = x_raw * rot_red;
  const Mat y0 = y_raw * rot_red.conjugate();

  Mat lam1 = Mat::Zero(dl, dl);
  for (int i = 0; i < dl; ++i)
    lam1 += x0.middleRows(static_cast<Eigen::Index>(i) * bond, bond).adjoint() * dec.rho *
            x0.middleRows(static_cast<Eigen::Index>(i) * bond, bond);
  lam1 = 0.5 * (lam1 + lam1.adjoint());
  Eigen::LLT<Mat> llt1(lam1);
  if (llt1.info() != Eigen::Success)
    throw ValidationError("local decomposition: input-side Gram is not positive definite");
  const Mat m1 = llt1.matrixU();
  dec.x_piece = x0 * m1.inverse();
  dec.y_piece = y0 * m1.transpose();

  // Output-side cut: same treatment; the plain Gram of v is already the
  // identity after alignment, so the Cholesky step is the identity too.
  Eigen::JacobiSVD<Mat> svd_blue(blue, Eigen::ComputeThinU | Eigen::ComputeThinV);
  dec.left_rank = effective_rank(svd_blue.singularValues());
  if (dec.left_rank != dl)
    throw ValidationError("local decomposition: output-side cut rank " +
                          std::to_string(dec.left_rank) + " does not match the block dimension " +
                          std::to_string(dl) + " (block too short?)");
  const Mat z_raw = svd_blue.matrixU().leftCols(dl) *
                    svd_blue.singularValues().head(dl).cast<Complex>().asDiagonal();
  const Mat v_raw = svd_blue.matrixV().conjugate().leftCols(dl);
  const Mat rot_blue = alignment_rotation(v_raw, bond, dec.gauge_conditioning);
  const Mat v0 = v_raw * rot_blue;
  const Mat z0 = z_raw * rot_blue.conjugate();

  Mat lam4 = v0.adjoint() * v0;
  lam4 = 0.5 * (lam4 + lam4.adjoint());
  Eigen::LLT<Mat> llt4(lam4);
  if (llt4.info() != Eigen::Success)
    throw ValidationError("local decomposition: output-side Gram is not positive definite");
  const Mat m4 = llt4.matrixU();
  dec.v_piece = v0 * m4.inverse();
  dec.z_piece = z0 * m4.transpose();

  // The complementary Grams close by the fixed-point structure; record the
  // slack instead of enforcing it.
  const Mat lam_r = dec.y_piece.adjoint() * dec.y_piece;
  Mat lam_l = Mat::Zero(dl, dl);
  for (int o = 0; o < dl; ++o)
    lam_l += dec.z_piece.middleRows(static_cast<Eigen::Index>(o) * bond, bond).adjoint() *
             dec.rho_hat * dec.z_piece.middleRows(static_cast<Eigen::Index>(o) * bond, bond);
  dec.gram_residual = std::max(residual_norm(lam_r - identity(dl)),
                               residual_norm(lam_l - identity(dl)));

  // The block unitary: cut-facing halves contracted over the cut bond.
  Mat w = Mat::Zero(static_cast<Eigen::Index>(dl) * dl, static_cast<Eigen::Index>(dl) * dl);
  for (int o1 = 0; o1 < dl; ++o1)
    for (int o2 = 0; o2 < dl; ++o2)
      for (int r = 0; r < dl; ++r)
        for (int s = 0; s < dl; ++s) {
          Complex acc = 0.0;
          for (int b = 0; b < bond; ++b)
            acc += dec.y_piece(static_cast<Eigen::Index>(o1) * bond + b, r) *
                   dec.z_piece(static_cast<Eigen::Index>(o2) * bond + b, s);
          w(static_cast<Eigen::Index>(o1) * dl + o2, static_cast<Eigen::Index>(r) * dl + s) = acc;
        }
  dec.w = std::move(w);
  dec.w_unitarity = residual_norm(dec.w.adjoint() * dec.w - identity(dl * dl));

  // Self-check: reassembled action against the boundary-tiled window.
  // Skipped (residual stays -1) when the comparison window would be larger
  // than a quarter of the dense cap; callers can still run it explicitly.
  RandomStream rng(0xb10c + static_cast<std::uint64_t>(g));
  const int m = beta_margin(pairs, g);
  long long dim = 1;
  for (int s = 0; s < 2 * (len + m) && dim <= tol::kDenseEigenMaxDim; ++s) dim *= d;
  if (4 * dim <= static_cast<long long>(tol::kDenseEigenMaxDim)) {
    dec.reassembly_residual = 0.0;
    for (int t = 0; t < 2; ++t) {
      const WindowOperator x = random_window(d, 0, 2, rng);
      const int lo = std::min(x.left, 1 - len), hi = std::max(x.right(), len);
      dec.reassembly_residual = std::max(
          dec.reassembly_residual,
          window_distance(reassemble_beta(pairs, dec, x, m),
                          beta_window(pairs, g, embed(x, lo, hi), m, m)));
    }
  }
  return dec;
}

int default_block(PairCache& pairs) { return pairs.max_fusion_window() + 1; }

DecompositionCache::DecompositionCache(PairCache& pairs, int block)
    : pairs_(&pairs), block_(block) {
  if (block < 1) throw ValidationError("decomposition cache: block must be positive");
}

const LocalDecomposition& DecompositionCache::get(int g) {
  auto it = made_.find(g);
  if (it == made_.end())
    it = made_.emplace(g, build_local_decomposition(*pairs_, g, block_)).first;
  return it->second;
}

WindowOperator tail_right(PairCache& pairs, const LocalDecomposition& dec,
                          const WindowOperator& x, int margin) {
  const MpoTensor& u = pairs.mpo(dec.g);
  const int d = u.phys(), bond = u.bond();
  if (x.phys != d) throw ValidationError("right tail: physical dimensions differ");
  if (x.left < 1) throw ValidationError("right tail: support must lie right of the cut");
  if (margin < beta_margin(pairs, dec.g))
    throw ValidationError("right tail: margin below the certified window");
  const int n = std::max(x.right(), dec.block) + margin;
  checked_dim(d, n, "right tail");
  const Mat xe = embed(x, 1, n).mat;
  const std::vector<Mat> rows = half_row(pairs, dec, n);
  Mat out = Mat::Zero(xe.rows(), xe.cols());
  for (int b = 0; b < bond; ++b) out += rows[b] * xe * rows[b].adjoint();
  return {1, d, n, std::move(out)};
}

WindowOperator tail_left(PairCache& pairs, const LocalDecomposition& dec,
                         const WindowOperator& x, int margin) {
  const MpoTensor& u = pairs.mpo(dec.g);
  const int d = u.phys(), bond = u.bond();
  const int dl = ipow(d, dec.block);
  if (x.phys != d) throw ValidationError("left tail: physical dimensions differ");
  if (x.right() > 0) throw ValidationError("left tail: support must lie left of the cut");
  if (margin < beta_margin(pairs, dec.g))
    throw ValidationError("left tail: margin below the certified window");
  const int n = std::max(1 - x.left, dec.block) + margin;
  checked_dim(d, n, "left tail");
  const Mat xe = embed(x, 1 - n, 0).mat;

  std::vector<Mat> wall(bond, Mat(dl, dl));
  for (int a = 0; a < bond; ++a)
    for (int r = 0; r < dl; ++r)
      for (int i = 0; i < dl; ++i)
        wall[a](r, i) = dec.x_piece(static_cast<Eigen::Index>(i) * bond + a, r);
  const std::vector<Mat> rest = bond_chain(u, n - dec.block);
  std::vector<Mat> t(bond);
  for (int afar = 0; afar < bond; ++afar) {
    Mat acc = kron(rest[afar * bond], wall[0]);
    for (int a = 1; a < bond; ++a) acc += kron(rest[afar * bond + a], wall[a]);
    t[afar] = std::move(acc);
  }
  // Far end closes through the boundary weight; the conjugated layer carries
  // its first index.
  Mat out = Mat::Zero(xe.rows(), xe.cols());
  for (int a1 = 0; a1 < bond; ++a1)
    for (int a2 = 0; a2 < bond; ++a2) {
      const Complex c = dec.rho(a2, a1);
      if (std::abs(c) < 1e-300) continue;
      out += c * (t[a1] * xe * t[a2].adjoint());
    }
  return {1 - n, d, n, std::move(out)};
}

WindowOperator reassemble_beta(PairCache& pairs, const LocalDecomposition& dec,
                               const WindowOperator& x, int margin) {
  const int d = x.phys;
  const int len = dec.block;
  const int lo = std::min(x.left, 1 - len), hi = std::max(x.right(), len);
  const WindowOperator xe = embed(x, lo, hi);
  const int nl = 1 - lo, nr = hi;
  const int dleft = ipow(d, nl), dright = ipow(d, nr);

  // Operator Schmidt split across the cut.
  Mat ms(static_cast<Eigen::Index>(dleft) * dleft, static_cast<Eigen::Index>(dright) * dright);
  for (int ol = 0; ol < dleft; ++ol)
    for (int il = 0; il < dleft; ++il)
      for (int orr = 0; orr < dright; ++orr)
        for (int ir = 0; ir < dright; ++ir)
          ms(static_cast<Eigen::Index>(ol) * dleft + il,
             static_cast<Eigen::Index>(orr) * dright + ir) =
              xe.mat(static_cast<Eigen::Index>(ol) * dright + orr,
                     static_cast<Eigen::Index>(il) * dright + ir);
  Eigen::JacobiSVD<Mat> svd(ms, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();

  Mat acc;
  bool first = true;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) <= sv(0) * 1e-14) break;
    const double scale = std::sqrt(sv(k));
    Mat a(dleft, dleft), b(dright, dright);
    for (int ol = 0; ol < dleft; ++ol)
      for (int il = 0; il < dleft; ++il)
        a(ol, il) = scale * svd.matrixU()(static_cast<Eigen::Index>(ol) * dleft + il, k);
    for (int orr = 0; orr < dright; ++orr)
      for (int ir = 0; ir < dright; ++ir)
        b(orr, ir) =
            scale * std::conj(svd.matrixV()(static_cast<Eigen::Index>(orr) * dright + ir, k));
    const WindowOperator la = tail_left(pairs, dec, {lo, d, nl, std::move(a)}, margin);
    const WindowOperator rb = tail_right(pairs, dec, {1, d, nr, std::move(b)}, margin);
    Mat term = kron(la.mat, rb.mat);
    if (first) {
      acc = std::move(term);
      first = false;
    } else {
      acc += term;
    }
  }
  if (first) acc = Mat::Zero(ipow(d, nl + nr + 2 * margin), ipow(d, nl + nr + 2 * margin));

  // Conjugate by w on the two blocks around the cut.
  const int padl = (1 - len) - (lo - margin);
  const int padr = (hi + margin) - len;
  const Mat wfull = kron(identity(ipow(d, padl)), kron(dec.w, identity(ipow(d, padr))));
  Mat out = wfull * acc * wfull.adjoint();
  return {lo - margin, d, nl + nr + 2 * margin, std::move(out)};
}

WindowOperator v_operator(DecompositionCache& decos, int g, int h, int window) {
  PairCache& pairs = decos.pairs();
  const FiniteGroup& grp = pairs.group();
  const int gh = grp.mult(g, h);
  const ChainReplacementPair& fuse = pairs.fusion(g, h);
  if (window < decos.block() + fuse.window)
    throw ValidationError("v operator: support too small for the wall and the fused window");
  const int d = pairs.mpo(g).phys();
  const int dim = checked_dim(d, window, "v operator");
  const std::vector<Mat> tg = half_row(pairs, decos.get(g), window);
  const std::vector<Mat> th = half_row(pairs, decos.get(h), window);
  const std::vector<Mat> tk = half_row(pairs, decos.get(gh), window);
  const int bg = pairs.mpo(g).bond(), bh = pairs.mpo(h).bond(), bk = pairs.mpo(gh).bond();

  Mat out = Mat::Zero(dim, dim);
  for (int c = 0; c < bk; ++c) {
    Mat mix = Mat::Zero(dim, dim);
    bool any = false;
    for (int b1 = 0; b1 < bg; ++b1) {
      Mat inner = Mat::Zero(dim, dim);
      bool got = false;
      for (int b2 = 0; b2 < bh; ++b2) {
        const Complex cf = fuse.v(b1 * bh + b2, c);
        if (std::abs(cf) < 1e-300) continue;
        inner += cf * th[b2];
        got = true;
      }
      if (got) {
        mix += tg[b1] * inner;
        any = true;
      }
    }
    if (any) out += mix * tk[c].adjoint();
  }
  // The cap tile is unique up to a scalar, so the result is a positive
  // multiple of a unitary; fix the magnitude (the phase stays with the tile).
  const Mat gram = out.adjoint() * out;
  const double scale = std::sqrt(gram.trace().real() / dim);
  if (!(scale > tol::kCertificate))
    throw ValidationError("v operator: result vanishes");
  out /= scale;
  const double defect =
      ((gram / (scale * scale)) - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (!(defect < tol::kDefault))
    throw ValidationError("v operator: result is not unitary (defect " + std::to_string(defect) +
                          ")");
  return {1, d, window, std::move(out)};
}

namespace {

OperatorCocycle cocycle_scalar(const WindowOperator& lhs, const WindowOperator& rhs) {
  const int lo = std::min(lhs.left, rhs.left), hi = std::max(lhs.right(), rhs.right());
  const Mat a = embed(lhs, lo, hi).mat;
  const Mat b = embed(rhs, lo, hi).mat;
  const Complex c = (b.adjoint() * a).trace() / (b.adjoint() * b).trace();
  OperatorCocycle out;
  out.residual = (a - c * b).norm() / a.norm();
  if (!(out.residual < tol::kCertificate))
    throw ValidationError("operator cocycle: sides are not parallel (residual " +
                          std::to_string(out.residual) + ")");
  out.modulus_drift = std::abs(std::abs(c) - 1.0);
  if (!(out.modulus_drift <= tol::kParallel))
    throw ValidationError("operator cocycle: scalar modulus drifts from 1 by " +
                          std::to_string(out.modulus_drift));
  out.value = c / std::abs(c);
  return out;
}

}  // namespace

OperatorCocycle check_operator_cocycle(DecompositionCache& decos, int g, int h, int k,
                                       int window) {
  PairCache& pairs = decos.pairs();
  const FiniteGroup& grp = pairs.group();
  const WindowOperator vhk = v_operator(decos, h, k, window);
  const WindowOperator vg_hk = v_operator(decos, g, grp.mult(h, k), window);
  const WindowOperator vgh = v_operator(decos, g, h, window);
  const WindowOperator vgh_k = v_operator(decos, grp.mult(g, h), k, window);
  const int m = beta_margin(pairs, g);
  return cocycle_scalar(window_product(tail_right(pairs, decos.get(g), vhk, m), vg_hk),
                        window_product(vgh, vgh_k));
}

OperatorCocycleReport operator_cocycle_table(DecompositionCache& decos, int window) {
  PairCache& pairs = decos.pairs();
  const FiniteGroup& grp = pairs.group();
  const int order = grp.order();
  const int e = grp.identity();

  std::vector<WindowOperator> vs(static_cast<size_t>(order) * order);
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h) vs[g * order + h] = v_operator(decos, g, h, window);

  OperatorCocycleReport rep;
  rep.table = PhaseTable3(order);
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h)
      for (int k = 0; k < order; ++k) {
        if (g == e || h == e || k == e) {
          rep.table.at(g, h, k) = Complex(1.0, 0.0);
          continue;
        }
        const int m = beta_margin(pairs, g);
        const OperatorCocycle oc = cocycle_scalar(
            window_product(tail_right(pairs, decos.get(g), vs[h * order + k], m),
                           vs[g * order + grp.mult(h, k)]),
            window_product(vs[g * order + h], vs[grp.mult(g, h) * order + k]));
        rep.table.at(g, h, k) = oc.value;
        rep.parallelism_residual = std::max(rep.parallelism_residual, oc.residual);
        rep.unit_drift = std::max(rep.unit_drift, oc.modulus_drift);
      }
  rep.cocycle_residual = check_3cocycle(rep.table, grp);
  return rep;
}

}  // namespace mpuphase
