#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace bondforge;
using namespace fixtures;

TEST(Families, BennettPartnerDistance) {
  EXPECT_EQ(bennett_partner_distance(Rational(1), Rational(2), Rational(4)), Rational(16, 5));
  Linkage l = bennett();
  EXPECT_EQ(l.joints[1].dh->d, Rational(16, 5));
  EXPECT_EQ(l.joints[3].dh->w.value(), Rational(2));
}

TEST(Families, RandomBennettLinkagesAreMobile) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    Rational w1 = random_nonzero_rational(rng), w2 = random_nonzero_rational(rng);
    if (w1 == w2 || w1 * w2 == -1) continue;
    Linkage l = make_bennett(w1, w2, random_nonzero_rational(rng));
    auto cc = configuration_curve(l, 1);
    ASSERT_EQ(cc.size(), 1) << trial;
    auto t = rational_configuration(l, 0, Rational(2, 3));
    EXPECT_TRUE(proportional(loop_product<Rational>(l, l.loops[0], t), DQ<Rational>::one())) << trial;
  }
}

TEST(Families, GoldbergIsAMobileFiveBar) {
  Linkage l = goldberg();
  EXPECT_EQ(l.size(), 5);
  EXPECT_TRUE(l.all_revolute());
  std::vector<ProjectiveParam<Rational>> inf(5, ProjectiveParam<Rational>::infinity());
  EXPECT_TRUE(proportional(loop_product<Rational>(l, l.loops[0], inf), DQ<Rational>::one()));
  auto cc = configuration_curve(l, 1);
  ASSERT_EQ(cc.size(), 1);
  EXPECT_TRUE(cc.parametrizations[0].has_value());
}

TEST(Families, GoldbergNeedsASharedLink) {
  EXPECT_THROW(make_goldberg({1, 2, 4}, {2, 3, 4}), InputError);
  EXPECT_THROW(make_goldberg({1, 2, 4}, {1, 3, 5}), InputError);
}

TEST(Families, DuplicatedAxesAreClosedAtInfinity) {
  Linkage l = dup_axes();
  EXPECT_EQ(l.size(), 6);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(l.joints[k].axis, l.joints[k + 3].axis);
  std::vector<ProjectiveParam<Rational>> inf(6, ProjectiveParam<Rational>::infinity());
  EXPECT_TRUE(proportional(loop_product<Rational>(l, l.loops[0], inf), DQ<Rational>::one()));
  auto h = dup_lines();
  EXPECT_THROW(make_duplicated_axes_6r(h[0], h[0], h[1]), InputError);
}

TEST(Families, GeneratedLinesAreLines) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    EXPECT_TRUE(is_line(random_line(rng)));
    EXPECT_TRUE(is_line(random_line_through_origin(rng)));
  }
  for (const auto& h : dup_lines()) EXPECT_TRUE(is_line(h));
}

TEST(Families, FrozenExtensionKeepsTheMotion) {
  Linkage l = axis_form_at(bennett(), rational_configuration(bennett(), 0, Rational(1, 2)));
  std::mt19937_64 rng(3);
  Linkage e = extend_with_frozen_joint(l, random_line(rng));
  EXPECT_EQ(e.size(), 5);
  // Any Bennett configuration with the new joint at infinity closes the extended loop.
  auto cc = configuration_curve(l, 1);
  const auto& rp = *cc.parametrizations[0];
  for (int a = 1; a < 5; ++a) {
    auto pt = rp.point<GaussRational>(ProjectiveParam<GaussRational>::finite(GaussRational(Rational(a, 3))));
    std::vector<ProjectiveParam<GaussRational>> t(pt.begin(), pt.end());
    t.push_back(ProjectiveParam<GaussRational>::infinity());
    EXPECT_TRUE(proportional(loop_product<GaussRational>(e, e.loops[0], t), DQ<GaussRational>::one()));
  }
}

TEST(Families, RandomDHLinkagesAreGeneric) {
  for (std::uint64_t seed : {1, 2}) {
    Linkage l = random_6r(seed);
    EXPECT_TRUE(l.all_dh());
    EXPECT_EQ(l.size(), 6);
  }
}
