#include "mpuphase/group.hpp"

#include <algorithm>

namespace mpuphase {

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> mult) : mult_(std::move(mult)) {
  n_ = static_cast<int>(mult_.size());
  if (n_ <= 0) throw ValidationError("group: empty multiplication table");
  for (const auto& row : mult_) {
    if (static_cast<int>(row.size()) != n_)
      throw ValidationError("group: multiplication table is not square");
    for (int v : row)
      if (v < 0 || v >= n_) throw ValidationError("group: table entry out of range");
  }
  if (n_ <= 64) {
    for (int g = 0; g < n_; ++g)
      for (int h = 0; h < n_; ++h)
        for (int k = 0; k < n_; ++k)
          if (mult_[mult_[g][h]][k] != mult_[g][mult_[h][k]])
            throw ValidationError("group: multiplication is not associative");
  }
  for (int g = 0; g < n_; ++g)
    if (mult_[0][g] != g || mult_[g][0] != g)
      throw ValidationError("group: index 0 is not a two-sided identity");
  inv_.assign(n_, -1);
  for (int g = 0; g < n_; ++g) {
    for (int h = 0; h < n_; ++h)
      if (mult_[g][h] == 0 && mult_[h][g] == 0) {
        inv_[g] = h;
        break;
      }
    if (inv_[g] < 0) throw ValidationError("group: element without two-sided inverse");
  }
}

FiniteGroup FiniteGroup::normalized(const std::vector<std::vector<int>>& mult,
                                    std::vector<int>* perm_out) {
  const int n = static_cast<int>(mult.size());
  int e = -1;
  for (int g = 0; g < n; ++g) {
    bool ok = true;
    for (int h = 0; h < n && ok; ++h)
      ok = static_cast<int>(mult[g].size()) == n && mult[g][h] == h && mult[h][g] == h;
    if (ok) {
      e = g;
      break;
    }
  }
  if (e < 0) throw ValidationError("group: no two-sided identity found");
  std::vector<int> perm(n);  // perm[new] = old
  perm[0] = e;
  int next = 1;
  for (int g = 0; g < n; ++g)
    if (g != e) perm[next++] = g;
  std::vector<int> inv_perm(n);
  for (int i = 0; i < n; ++i) inv_perm[perm[i]] = i;
  std::vector<std::vector<int>> out(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = inv_perm[mult[perm[i]][perm[j]]];
  if (perm_out) *perm_out = perm;
  return FiniteGroup(std::move(out));
}

FiniteGroup cyclic_group(int n) {
  std::vector<std::vector<int>> mult(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) mult[i][j] = (i + j) % n;
  return FiniteGroup(std::move(mult));
}

FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b) {
  const int na = a.order(), nb = b.order(), n = na * nb;
  std::vector<std::vector<int>> mult(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int ia = i / nb, ib = i % nb, ja = j / nb, jb = j % nb;
      mult[i][j] = a.mult(ia, ja) * nb + b.mult(ib, jb);
    }
  return FiniteGroup(std::move(mult));
}

FiniteGroup symmetric_group_s3() {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto find = [&](const int p[3]) {
    for (int i = 0; i < 6; ++i)
      if (perms[i][0] == p[0] && perms[i][1] == p[1] && perms[i][2] == p[2]) return i;
    return -1;
  };
  std::vector<std::vector<int>> mult(6, std::vector<int>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      int comp[3];  // (i ∘ j)(k) = i[j[k]]
      for (int k = 0; k < 3; ++k) comp[k] = perms[i][perms[j][k]];
      mult[i][j] = find(comp);
    }
  return FiniteGroup(std::move(mult));
}

GSet::GSet(std::vector<std::vector<int>> act, const FiniteGroup& g) : act_(std::move(act)) {
  const int nx = static_cast<int>(act_.size());
  const int n = g.order();
  if (nx <= 0) throw ValidationError("gset: empty action table");
  for (const auto& row : act_) {
    if (static_cast<int>(row.size()) != n)
      throw ValidationError("gset: action table width != group order");
    for (int v : row)
      if (v < 0 || v >= nx) throw ValidationError("gset: action entry out of range");
  }
  for (int x = 0; x < nx; ++x) {
    if (act_[x][g.identity()] != x)
      throw ValidationError("gset: identity does not act trivially");
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (act_[act_[x][a]][b] != act_[x][g.mult(a, b)])
          throw ValidationError("gset: action is not compatible with multiplication");
  }
}

GSet regular_gset(const FiniteGroup& g) { return GSet(g.table(), g); }

GSet singleton_gset(const FiniteGroup& g) {
  return GSet({std::vector<int>(g.order(), 0)}, g);
}

GSet coset_gset(const FiniteGroup& g, const std::vector<int>& subgroup) {
  const int n = g.order();
  std::vector<int> coset_of(n, -1);
  std::vector<int> reps;
  for (int x = 0; x < n; ++x) {
    if (coset_of[x] >= 0) continue;
    const int id = static_cast<int>(reps.size());
    reps.push_back(x);
    for (int h : subgroup) coset_of[g.mult(h, x)] = id;  // coset Hx
  }
  const int m = static_cast<int>(reps.size());
  std::vector<std::vector<int>> act(m, std::vector<int>(n));
  for (int c = 0; c < m; ++c)
    for (int a = 0; a < n; ++a) act[c][a] = coset_of[g.mult(reps[c], a)];
  return GSet(std::move(act), g);
}

std::vector<int> unbroken_subgroup(const GSet& x, const FiniteGroup& g) {
  std::vector<int> h;
  for (int a = 0; a < g.order(); ++a) {
    bool fixes_all = true;
    for (int p = 0; p < x.size() && fixes_all; ++p) fixes_all = x.act(p, a) == p;
    if (fixes_all) h.push_back(a);
  }
  for (int a : h) {
    if (std::find(h.begin(), h.end(), g.inv(a)) == h.end())
      throw ValidationError("unbroken subgroup is not closed under inverses");
    for (int b : h)
      if (std::find(h.begin(), h.end(), g.mult(a, b)) == h.end())
        throw ValidationError("unbroken subgroup is not closed under multiplication");
  }
  return h;
}

Subgroup subgroup_structure(const FiniteGroup& g, const std::vector<int>& elements) {
  std::vector<int> elems = elements;
  std::sort(elems.begin(), elems.end());
  if (elems.empty() || elems[0] != g.identity())
    throw ValidationError("subgroup: must contain the identity");
  const int m = static_cast<int>(elems.size());
  std::vector<int> parent_to_sub(g.order(), -1);
  for (int i = 0; i < m; ++i) parent_to_sub[elems[i]] = i;
  std::vector<std::vector<int>> mult(m, std::vector<int>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const int p = g.mult(elems[i], elems[j]);
      if (parent_to_sub[p] < 0) throw ValidationError("subgroup: element list not closed");
      mult[i][j] = parent_to_sub[p];
    }
  return Subgroup{FiniteGroup(std::move(mult)), std::move(elems), std::move(parent_to_sub)};
}

}  // namespace mpuphase
