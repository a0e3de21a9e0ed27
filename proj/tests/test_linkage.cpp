#include "bondforge/linkage.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bondforge;
using D = DQ<Rational>;
using PP = ProjectiveParam<Rational>;

namespace {

Linkage bennett_fixture() {
  return linkage_from_dh({DHParams::make(0, 1, 4), DHParams::make(0, 2, Rational(16, 5)), DHParams::make(0, 1, 4),
                          DHParams::make(0, 2, Rational(16, 5))});
}

std::vector<PP> bennett_point(const Rational& t) {
  return {PP::finite(t), PP::finite(-1 / (3 * t)), PP::finite(-t), PP::finite(1 / (3 * t))};
}

}  // namespace

TEST(DHTransfer, FrozenValues) {
  // (1 - k)(1 - 2εk) = 1 - k - 2ε - 2εk
  EXPECT_EQ(dh_transfer(DHParams::make(0, 1, 4)), D({1, 0, 0, -1, -2, 0, 0, -2}));
  EXPECT_EQ(dh_transfer(DHParams::make_parallel(0, 6)), D({1, 0, 0, 0, 0, 0, 0, -3}));
  // (1 - εi)(1 - k)(1 - 2εk)
  EXPECT_EQ(dh_transfer(DHParams::make(2, 1, 4)), D({1, 0, 0, -1, -2, -1, -1, -2}));
  auto n = norm(dh_transfer(DHParams::make(Rational(1, 3), 2, 5)));
  EXPECT_EQ(n.real, 5);
  EXPECT_EQ(n.eps, 0);
}

TEST(Linkage, BennettFixtureClosesOnItsCurve) {
  Linkage l = bennett_fixture();
  for (int a = 1; a <= 20; ++a) {
    Rational t(a - 10, 3 + a % 4);
    if (t == 0) continue;
    EXPECT_TRUE(proportional(loop_product<Rational>(l, l.loops[0], bennett_point(t)), D::one())) << t;
  }
  // The printed distance 5 does not close.
  Linkage bad = linkage_from_dh(
      {DHParams::make(0, 1, 4), DHParams::make(0, 2, 5), DHParams::make(0, 1, 4), DHParams::make(0, 2, 5)});
  EXPECT_FALSE(proportional(loop_product<Rational>(bad, bad.loops[0], bennett_point(Rational(1))), D::one()));
}

TEST(Linkage, FlipOrientationConjugatesTheLoop) {
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  Linkage l = linkage_from_dh({DHParams::make(1, 2, 3), DHParams::make(Rational(1, 2), -3, 1),
                               DHParams::make(-2, Rational(1, 3), 2), DHParams::make(0, 5, Rational(-3, 2)),
                               DHParams::make_parallel(1, 2)});
  for (int k = 0; k < l.size(); ++k) {
    Linkage f = flip_orientation(l, k);
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<PP> t, tf;
      for (int j = 0; j < l.size(); ++j) {
        Rational v(num(g), den(g));
        t.push_back(PP::finite(v));
        tf.push_back(PP::finite(j == k ? Rational(-v) : v));
      }
      // Flipping the first joint re-frames the base link by the half-turn k.
      D p = loop_product<Rational>(l, l.loops[0], t);
      if (k == 0) p = D::k().conj() * p * D::k();
      EXPECT_TRUE(proportional(p, loop_product<Rational>(f, f.loops[0], tf)));
    }
    EXPECT_TRUE(proportional(flip_orientation(f, k).joints[k].transfer, l.joints[k].transfer));
  }
}

TEST(Linkage, AxisFormMatchesDHFormUpToJointMobius) {
  Linkage l = bennett_fixture();
  auto c = bennett_point(Rational(2));
  Linkage a = axis_form_at(l, c);
  std::vector<PP> inf(4, PP::infinity());
  EXPECT_TRUE(proportional(loop_product<Rational>(a, a.loops[0], inf), D::one()));
  // t in the axis form corresponds to (t c - 1)/(t + c) in the DH form.
  for (int s = 1; s < 6; ++s) {
    Rational t1(s, 7);
    std::vector<PP> dh = bennett_point(t1), ax;
    for (int k = 0; k < 4; ++k) {
      Rational ck = c[k].value(), tk = dh[k].value();
      ax.push_back(PP::finite((ck * tk + 1) / (ck - tk)));
    }
    EXPECT_TRUE(proportional(loop_product<Rational>(a, a.loops[0], ax), D::one())) << s;
  }
}

TEST(Linkage, ValidationReportsFieldPaths) {
  try {
    linkage_from_axes({D::i(), D::scalar(2), D::j()});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(e.field(), "joints[1].axis");
  }
  Linkage l = bennett_fixture();
  l.loops = {{1, 2, 4}};
  EXPECT_THROW(l.validate(), InputError);
}
