#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace bondforge;
using namespace fixtures;
using PP = ProjectiveParam<Rational>;

namespace {

std::vector<Rational> affine(const std::vector<PP>& t) {
  std::vector<Rational> x;
  for (const auto& p : t) x.push_back(p.value());
  return x;
}

const ConfigurationCurve& dup_curve() {
  static const ConfigurationCurve cc = configuration_curve(dup_axes(), 1);
  return cc;
}

}  // namespace

TEST(Closure, BennettSystemVanishesOnItsParametrization) {
  auto sys = expand_loop(bennett());
  EXPECT_EQ(sys.equations.size(), 6u);
  for (int a = 1; a <= 100; ++a) {
    Rational t(a - 50, 1 + a % 7);
    if (t == 0) continue;
    auto x = affine(bennett_point(t));
    for (const auto& e : sys.equations) EXPECT_EQ(e.eval(x), 0) << t;
  }
}

TEST(Closure, BennettSystemHasTheKnownZeroSet) {
  // Off the curve the system does not vanish: perturb t2.
  auto sys = expand_loop(bennett());
  auto x = affine(bennett_point(Rational(2)));
  x[1] += Rational(1, 5);
  bool some = false;
  for (const auto& e : sys.equations) some = some || e.eval(x) != 0;
  EXPECT_TRUE(some);
}

TEST(Closure, CyclicRelabelingKeepsTheZeroSet) {
  Linkage l = bennett();
  std::vector<Joint> js(l.joints.begin() + 1, l.joints.end());
  js.push_back(l.joints[0]);
  auto sys = expand_loop(Linkage::cycle(js));
  for (int a = 1; a <= 20; ++a) {
    Rational t(a, 3);
    auto p = bennett_point(t);
    std::vector<Rational> x{p[1].value(), p[2].value(), p[3].value(), p[0].value()};
    for (const auto& e : sys.equations) EXPECT_EQ(e.eval(x), 0);
  }
}

TEST(Closure, IdenticalAxesWithInverseTransfersCancel) {
  // (t1 - h)(t2 - h) is real iff t2 = -t1 for the same axis.
  Linkage l = linkage_from_axes({DQ<Rational>::i(), DQ<Rational>::i()});
  auto sys = expand_loop(l);
  for (int a = -5; a <= 5; ++a) {
    std::vector<Rational> x{Rational(a, 2), Rational(-a, 2)};
    for (const auto& e : sys.equations) EXPECT_EQ(e.eval(x), 0);
  }
}

TEST(Closure, AcceptedSolutionsSatisfyAllEightCoordinates) {
  auto l = random_6r(11);
  numeric::SolveOptions o;
  o.seed = 2;
  auto res = numeric::solve_square(expand_loop(l), o);
  EXPECT_EQ(res.solutions.size(), 16u);
  for (const auto& s : res.solutions) EXPECT_LT(closure_residual(l, s.values), 1e-9);
}

TEST(Curve, BennettIsOneRationalComponent) {
  auto cc = configuration_curve(bennett(), 1);
  ASSERT_EQ(cc.size(), 1);
  EXPECT_EQ(cc.component(0).degrees, (std::vector<int>{1, 1, 1, 1}));
  ASSERT_TRUE(cc.parametrizations[0].has_value());
  const auto& rp = *cc.parametrizations[0];
  for (int a = 1; a < 10; ++a) {
    auto pt = rp.point<GaussRational>(ProjectiveParam<GaussRational>::finite(GaussRational(Rational(a, 4))));
    std::vector<PP> t;
    for (const auto& p : pt) {
      ASSERT_EQ(p.u.im(), 0);
      ASSERT_EQ(p.v.im(), 0);
      t.push_back({p.u.re(), p.v.re()});
    }
    EXPECT_TRUE(proportional(loop_product<Rational>(cc.linkage, cc.linkage.loops[0], t), DQ<Rational>::one()));
  }
}

TEST(Curve, TracedBennettBranchMatchesParametrization) {
  auto sys = expand_loop(bennett());
  SolutionPoint start = make_point({1.0, -1.0 / 3.0, -1.0, 1.0 / 3.0});
  auto br = trace_curve(sys, start);
  ASSERT_EQ(br.samples.size(), 50u);
  for (const auto& s : br.samples) {
    Complex t = s.values[0].value();
    EXPECT_LT(std::abs(t.imag()), 1e-9);
    EXPECT_LT(chordal_distance(s.values[1], ProjectiveParam<Complex>::finite(-1.0 / (3.0 * t))), 1e-9);
    EXPECT_LT(chordal_distance(s.values[2], ProjectiveParam<Complex>::finite(-t)), 1e-9);
    EXPECT_LT(chordal_distance(s.values[3], ProjectiveParam<Complex>::finite(1.0 / (3.0 * t))), 1e-9);
  }
}

TEST(Curve, SphericalFourBarIsMobile) {
  std::mt19937_64 rng(8);
  Linkage l = random_spherical_4r(rng);
  auto cc = configuration_curve(l, 1);
  ASSERT_GE(cc.size(), 1);
  // The axis form is closed at t = inf; the branch through it is real.
  SolutionPoint start{std::vector<ProjectiveParam<Complex>>(4, ProjectiveParam<Complex>::infinity()), 0.0};
  TraceOptions o;
  o.samples = 20;
  auto br = trace_curve(expand_loop(l), start, o);
  ASSERT_EQ(br.samples.size(), 20u);
  bool moved = false;
  for (const auto& s : br.samples)
    for (const auto& p : s.values) {
      if (p.is_infinite(1e-9)) continue;
      moved = true;
      EXPECT_LT(std::abs(p.value().imag()), 1e-9);
    }
  EXPECT_TRUE(moved);
}

TEST(Curve, DuplicatedAxesHaveFourComponents) {
  const auto& cc = dup_curve();
  ASSERT_EQ(cc.size(), 4);
  int lines = 0;
  for (int c = 0; c < cc.size(); ++c) {
    int constant = 0;
    for (int k = 0; k < 6; ++k) constant += cc.component(c).constant(k);
    if (constant == 4) ++lines;
  }
  EXPECT_EQ(lines, 3);
}

TEST(Curve, RotationLinesShareTheCoincidentConfiguration) {
  const auto& cc = dup_curve();
  // All joints at infinity: the initial configuration with the axes pairwise coinciding.
  std::vector<ProjectiveParam<Complex>> p(6, ProjectiveParam<Complex>::infinity());
  numeric::VecC x = numeric::to_homogeneous(p);
  std::mt19937_64 rng(2);
  int through = 0;
  for (int c = 0; c < cc.size(); ++c) {
    int constant = 0;
    for (int k = 0; k < 6; ++k) constant += cc.component(c).constant(k);
    if (constant != 4) continue;
    const auto* rp = cc.parametrizations[c] ? &*cc.parametrizations[c] : nullptr;
    if (distance_to_component(cc.ctx, cc.decomposition, cc.component(c), rp, x, rng) < 1e-9) ++through;
  }
  EXPECT_EQ(through, 3);
}

TEST(Curve, RotationLineKeepsFourJointsFixed) {
  auto sys = expand_loop(dup_axes());
  // t3 = -t6 with every other joint at infinity.
  std::vector<ProjectiveParam<Complex>> p(6, ProjectiveParam<Complex>::infinity());
  p[2] = ProjectiveParam<Complex>::finite(0.7);
  p[5] = ProjectiveParam<Complex>::finite(-0.7);
  SolutionPoint start{p, 0.0};
  TraceOptions o;
  o.samples = 10;
  auto br = trace_curve(sys, start, o);
  ASSERT_GE(br.samples.size(), 2u);
  for (const auto& s : br.samples) {
    int inf = 0;
    for (int k = 0; k < 6; ++k) inf += s.values[k].is_infinite(1e-9);
    EXPECT_EQ(inf, 4);
    EXPECT_LT(std::abs(s.values[2].value() + s.values[5].value()), 1e-9);
  }
}
