#include "doctest.h"
#include "mpuphase/group.hpp"

using namespace mpuphase;

TEST_CASE("cyclic group tables") {
  FiniteGroup z4 = cyclic_group(4);
  CHECK(z4.order() == 4);
  CHECK(z4.identity() == 0);
  CHECK(z4.mult(1, 3) == 0);
  CHECK(z4.mult(3, 3) == 2);
  CHECK(z4.inv(1) == 3);
  CHECK(z4.inv(2) == 2);
}

TEST_CASE("constructor rejects broken tables") {
  // Non-associative magma on 3 elements.
  std::vector<std::vector<int>> bad = {{0, 1, 2}, {1, 2, 2}, {2, 2, 0}};
  CHECK_THROWS_AS(FiniteGroup{bad}, ValidationError);

  // Left-but-not-right identity.
  std::vector<std::vector<int>> lop = {{0, 1}, {0, 1}};
  CHECK_THROWS_AS(FiniteGroup{lop}, ValidationError);
}

TEST_CASE("normalized relabels the identity to index 0") {
  // Z2 written with identity at index 1.
  std::vector<std::vector<int>> shifted = {{1, 0}, {0, 1}};
  std::vector<int> perm;
  FiniteGroup g = FiniteGroup::normalized(shifted, &perm);
  CHECK(g.order() == 2);
  CHECK(g.mult(0, 0) == 0);
  CHECK(g.mult(1, 1) == 0);
  CHECK(perm == std::vector<int>{1, 0});
}

TEST_CASE("s3 structure") {
  FiniteGroup s3 = symmetric_group_s3();
  CHECK(s3.order() == 6);
  // Count elements of each order: 1 identity, 3 transpositions, 2 3-cycles.
  int ord2 = 0, ord3 = 0;
  for (int g = 1; g < 6; ++g) {
    if (s3.mult(g, g) == 0)
      ++ord2;
    else if (s3.mult(g, s3.mult(g, g)) == 0)
      ++ord3;
  }
  CHECK(ord2 == 3);
  CHECK(ord3 == 2);
  // Non-abelian witness.
  bool commutes = true;
  for (int g = 0; g < 6 && commutes; ++g)
    for (int h = 0; h < 6; ++h)
      if (s3.mult(g, h) != s3.mult(h, g)) {
        commutes = false;
        break;
      }
  CHECK(!commutes);
}

TEST_CASE("direct product z2 x z2") {
  FiniteGroup z2 = cyclic_group(2);
  FiniteGroup k4 = direct_product(z2, z2);
  CHECK(k4.order() == 4);
  for (int g = 0; g < 4; ++g) CHECK(k4.mult(g, g) == 0);  // every element is an involution
  CHECK(k4.mult(1, 2) == 3);
}

TEST_CASE("regular and singleton gsets") {
  FiniteGroup z4 = cyclic_group(4);
  GSet reg = regular_gset(z4);
  CHECK(reg.size() == 4);
  CHECK(reg.act(1, 2) == 3);
  CHECK(unbroken_subgroup(reg, z4) == std::vector<int>{0});

  GSet pt = singleton_gset(z4);
  CHECK(pt.size() == 1);
  CHECK(unbroken_subgroup(pt, z4) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("coset gset for z4 over {0,2}") {
  FiniteGroup z4 = cyclic_group(4);
  GSet cosets = coset_gset(z4, {0, 2});
  CHECK(cosets.size() == 2);
  // Acting by the generator swaps the two cosets; acting by 2 fixes them.
  CHECK(cosets.act(0, 1) == 1);
  CHECK(cosets.act(1, 1) == 0);
  CHECK(cosets.act(0, 2) == 0);
  CHECK(cosets.act(1, 2) == 1);
  CHECK(unbroken_subgroup(cosets, z4) == std::vector<int>{0, 2});
}

TEST_CASE("gset validation") {
  FiniteGroup z2 = cyclic_group(2);
  // Identity must fix every point.
  CHECK_THROWS_AS(GSet({{1, 0}, {0, 1}}, z2), ValidationError);
  // Compatibility x.(gh) = (x.g).h — this table breaks it at x=0, g=h=1.
  FiniteGroup z4 = cyclic_group(4);
  std::vector<std::vector<int>> bad = {{0, 1, 1, 1}, {1, 0, 0, 0}};
  CHECK_THROWS_AS(GSet(bad, z4), ValidationError);
}

TEST_CASE("subgroup structure re-normalizes indices") {
  FiniteGroup s3 = symmetric_group_s3();
  // Pick a transposition t; {e, t} is closed.
  int t = -1;
  for (int g = 1; g < 6; ++g)
    if (s3.mult(g, g) == 0) {
      t = g;
      break;
    }
  Subgroup sub = subgroup_structure(s3, {0, t});
  CHECK(sub.group.order() == 2);
  CHECK(sub.elements == std::vector<int>{0, t});
  CHECK(sub.parent_to_sub[0] == 0);
  CHECK(sub.parent_to_sub[t] == 1);
  CHECK(sub.group.mult(1, 1) == 0);

  // Two distinct transpositions generate a 3-cycle, so {e, t1, t2} is not closed.
  CHECK_THROWS_AS(subgroup_structure(s3, {0, 1, 2}), ValidationError);
}
