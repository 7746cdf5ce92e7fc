#pragma once

#include <vector>

#include "mpuphase/common.hpp"

namespace mpuphase {

// Finite group as a dense multiplication table. Elements are indices
// 0..order-1 with the identity normalized to index 0.
class FiniteGroup {
 public:
  FiniteGroup() = default;
  // Validates associativity (exhaustively, order <= 64), a two-sided
  // identity and two-sided inverses. Throws ValidationError otherwise.
  explicit FiniteGroup(std::vector<std::vector<int>> mult);

  int order() const { return n_; }
  int mult(int g, int h) const { return mult_[g][h]; }
  int inv(int g) const { return inv_[g]; }
  int identity() const { return 0; }
  const std::vector<std::vector<int>>& table() const { return mult_; }

  // Relabels elements so the identity lands on index 0; `perm[new] = old`.
  static FiniteGroup normalized(const std::vector<std::vector<int>>& mult,
                                std::vector<int>* perm = nullptr);

 private:
  int n_ = 0;
  std::vector<std::vector<int>> mult_;
  std::vector<int> inv_;
};

FiniteGroup cyclic_group(int n);
FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);
// Permutations of {0,1,2} in lexicographic order; identity is index 0.
FiniteGroup symmetric_group_s3();

// Right G-set: act[x][g] = x.g with act[x][e] = x and act[act[x][g]][h] = act[x][gh].
class GSet {
 public:
  GSet() = default;
  GSet(std::vector<std::vector<int>> act, const FiniteGroup& g);

  int size() const { return static_cast<int>(act_.size()); }
  int act(int x, int g) const { return act_[x][g]; }
  const std::vector<std::vector<int>>& table() const { return act_; }

 private:
  std::vector<std::vector<int>> act_;
};

GSet regular_gset(const FiniteGroup& g);
GSet singleton_gset(const FiniteGroup& g);
// Right cosets H\g ordered by their smallest element; action by right multiplication.
GSet coset_gset(const FiniteGroup& g, const std::vector<int>& subgroup);

// H = { h : x.h = x for all x }. The result is checked to be closed under
// multiplication and inverses before it is returned.
std::vector<int> unbroken_subgroup(const GSet& x, const FiniteGroup& g);

// The abstract group structure on a (validated) subgroup element list.
// `elements[i]` is the parent-group element behind subgroup index i; the
// subgroup identity is re-normalized to index 0.
struct Subgroup {
  FiniteGroup group;
  std::vector<int> elements;
  std::vector<int> parent_to_sub;  // -1 for elements outside the subgroup
};
Subgroup subgroup_structure(const FiniteGroup& g, const std::vector<int>& elements);

}  // namespace mpuphase
