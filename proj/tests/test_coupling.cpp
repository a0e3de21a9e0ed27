#include "fixtures.hpp"

#include "bondforge/coupling.hpp"

#include <gtest/gtest.h>

using namespace bondforge;
using namespace fixtures;

namespace {

std::vector<int> window(int start, int len, int n) {
  std::vector<int> c;
  for (int k = 0; k < len; ++k) c.push_back((start + k) % n);
  return c;
}

/// Three-joint chain whose two links have DH data (w1, d1) and (w2, d2), middle offset s2.
Linkage three_chain(const Rational& w1, const Rational& d1, const Rational& w2, const Rational& d2, const Rational& s2) {
  return linkage_from_dh({DHParams::make(0, w1, d1), DHParams::make(s2, w2, d2), DHParams::make(0, 3, 1)});
}

}  // namespace

TEST(Coupling, SingleJointSpansTwoDimensions) {
  EXPECT_EQ(coupling_space(bennett(), {0}).dimension, 2);
  EXPECT_EQ(coupling_space(random_6r(4), {3}).dimension, 2);
}

TEST(Coupling, BennettTriplesSpanSix) {
  Linkage l = bennett();
  for (int r = 0; r < 4; ++r) {
    EXPECT_EQ(coupling_space(l, window(r, 3, 4)).dimension, 6);
    EXPECT_EQ(coupling_dimension_float(l, window(r, 3, 4)), 6);
  }
}

TEST(Coupling, GenericTriplesSpanEight) {
  Linkage l = random_6r(5);
  for (int r = 0; r < 6; ++r) {
    EXPECT_EQ(coupling_space(l, window(r, 3, 6)).dimension, 8);
    EXPECT_EQ(coupling_dimension_float(l, window(r, 3, 6)), 8);
  }
}

TEST(Coupling, CoincidentAxesSpanTwo) {
  std::mt19937_64 rng(6);
  auto h = random_line(rng);
  Linkage l = linkage_from_axes({h, h, random_line(rng)});
  EXPECT_EQ(coupling_space(l, {0, 1}).dimension, 2);
}

TEST(Coupling, ConcurrentAxesSpanFour) {
  std::mt19937_64 rng(5);
  Linkage l = random_spherical_4r(rng);
  EXPECT_EQ(coupling_space(l, {0, 1, 2}).dimension, 4);
  EXPECT_EQ(coupling_dimension_float(l, {0, 1, 2}), 4);
}

TEST(Coupling, DimensionIsAlwaysEven) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> size(2, 6), len(1, 4), coin(0, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = size(rng);
    Linkage l = random_dh_linkage(n, rng);
    // Some chains get coincident, parallel or intersecting neighbours.
    std::vector<DHParams> p;
    for (const auto& j : l.joints) p.push_back(*j.dh);
    for (auto& q : p) {
      int c = coin(rng);
      if (c == 1) q.d = 0;
      if (c == 2) q.w = ProjectiveParam<Rational>::infinity();
      if (c == 3) q.w = ProjectiveParam<Rational>::finite(0);
    }
    l = linkage_from_dh(p);
    auto cs = coupling_space(l, window(0, std::min(len(rng), n), n));
    EXPECT_TRUE(check_parity(cs)) << trial << " dim " << cs.dimension;
  }
}

TEST(Coupling, BennettConditionOnLinkData) {
  EXPECT_TRUE(bennett_condition(Rational(4), Rational(1), Rational(16, 5), Rational(2), Rational(0)));
  EXPECT_FALSE(bennett_condition(Rational(4), Rational(1), Rational(5), Rational(2), Rational(0)));
  EXPECT_FALSE(bennett_condition(Rational(4), Rational(1), Rational(16, 5), Rational(2), Rational(1)));
  EXPECT_TRUE(bennett_condition_float(4, 1, 3.2, 2, 0));
  EXPECT_FALSE(bennett_condition_float(4, 1, 5, 2, 0));
}

TEST(Coupling, BennettConditionIffTripleSpansSix) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Rational w1 = random_nonzero_rational(rng), w2 = random_nonzero_rational(rng), d1 = random_nonzero_rational(rng);
    Rational d2 = bennett_partner_distance(w1, w2, d1);
    bool same = w1 == w2 || w1 * w2 == -1;
    if (same) continue;
    EXPECT_EQ(coupling_space(three_chain(w1, d1, w2, d2, 0), {0, 1, 2}).dimension, 6) << trial;
    EXPECT_EQ(coupling_space(three_chain(w1, d1, w2, d2 + 1, 0), {0, 1, 2}).dimension, 8) << trial;
    EXPECT_EQ(coupling_space(three_chain(w1, d1, w2, d2, 1), {0, 1, 2}).dimension, 8) << trial;
  }
}

TEST(Coupling, BennettFixtureSatisfiesTheChainCondition) {
  auto inv = dh_invariants(bennett());
  for (int r = 0; r < 4; ++r) EXPECT_TRUE(chain_bennett_condition(inv, r));
  auto g = dh_invariants(random_6r(3));
  for (int r = 0; r < 6; ++r) EXPECT_FALSE(chain_bennett_condition(g, r));
}

TEST(Coupling, InvariantsFromAxesMatchDH) {
  Linkage b = bennett();
  auto a = dh_invariants_from_dh(b);
  auto x = dh_invariants_from_axes(global_axes<Rational>(b, rational_configuration(b, 0, Rational(1, 2))));
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(a.c[k], x.c[k]);
    ASSERT_TRUE(a.b[k] && x.b[k] && a.s[k] && x.s[k]);
    EXPECT_EQ(*a.b[k], *x.b[k]);
    EXPECT_EQ(*a.s[k], *x.s[k]);
  }
}

TEST(Coupling, InvariantsOfAnOpenChainMatchOnInnerJoints) {
  std::mt19937_64 rng(9);
  Linkage l = random_dh_linkage(6, rng);
  std::vector<ProjectiveParam<Rational>> t;
  for (int k = 0; k < 6; ++k) t.push_back(ProjectiveParam<Rational>::finite(random_rational(rng)));
  auto a = dh_invariants_from_dh(l);
  auto x = dh_invariants_from_axes(global_axes<Rational>(l, t));
  // The closing link of an open chain is not a DH link; joints 1..4 only see DH links.
  for (int k = 1; k < 5; ++k) {
    EXPECT_EQ(a.c[k], x.c[k]) << k;
    EXPECT_EQ(*a.b[k], *x.b[k]) << k;
    EXPECT_EQ(*a.s[k], *x.s[k]) << k;
  }
}

TEST(Coupling, AxisRelations) {
  std::mt19937_64 rng(4);
  auto h = random_line(rng);
  EXPECT_TRUE(axes_coincide(h, h));
  EXPECT_TRUE(axes_parallel(h, h));
  auto o1 = random_line_through_origin(rng), o2 = random_line_through_origin(rng), o3 = random_line_through_origin(rng);
  EXPECT_TRUE(axes_concurrent(o1, o2, o3));
  EXPECT_FALSE(axes_concurrent(h, random_line(rng), random_line(rng)));
}

namespace {

Linkage prrrr(const std::vector<DQ<Rational>>& r) {
  std::vector<Joint> js{Joint::prismatic(Quaternion<Rational>::pure(1, 0, 0))};
  for (const auto& h : r) js.push_back(Joint::revolute_axis(h));
  return Linkage::cycle(js);
}

}  // namespace

TEST(Coupling, PrrrrWithCoincidentAxes) {
  std::mt19937_64 rng(13);
  auto h = random_line(rng);
  auto rep = prrrr_conditions(prrrr({h, h, random_line(rng), random_line(rng)}));
  EXPECT_TRUE(rep.two_axes_coincide);
  EXPECT_EQ(rep.some_condition, std::optional<bool>(true));
}

TEST(Coupling, PrrrrWithParallelPairs) {
  Vec3<Rational> z{0, 0, 1}, y{0, 1, 0};
  auto rep = prrrr_conditions(prrrr({line_axis<Rational>(z, {1, 0, 0}), line_axis<Rational>(z, {0, 2, 0}),
                                     line_axis<Rational>(y, {3, 0, 1}), line_axis<Rational>(y, {0, 0, 5})}));
  EXPECT_TRUE(rep.pairs_parallel);
  EXPECT_FALSE(rep.two_axes_coincide);
  EXPECT_EQ(rep.some_condition, std::optional<bool>(true));
}

TEST(Coupling, PrrrrGenericDependsOnFrozenJoints) {
  std::mt19937_64 rng(14);
  Linkage l = prrrr({random_line(rng), random_line(rng), random_line(rng), random_line(rng)});
  EXPECT_FALSE(prrrr_conditions(l).some_condition.has_value());
  EXPECT_EQ(prrrr_conditions(l, std::vector<int>{}).some_condition, std::optional<bool>(false));
  EXPECT_EQ(prrrr_conditions(l, std::vector<int>{0}).some_condition, std::optional<bool>(true));
  EXPECT_THROW(prrrr_conditions(random_6r(2)), InputError);
}
