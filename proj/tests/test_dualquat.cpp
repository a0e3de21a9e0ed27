#include "bondforge/dualquat.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bondforge;
using D = DQ<Rational>;

namespace {

// Coordinate-level product written out independently of the library.
std::array<Rational, 8> oracle_mul(const std::array<Rational, 8>& a, const std::array<Rational, 8>& b) {
  auto qm = [](const Rational* x, const Rational* y, Rational* out) {
    out[0] = x[0] * y[0] - x[1] * y[1] - x[2] * y[2] - x[3] * y[3];
    out[1] = x[0] * y[1] + x[1] * y[0] + x[2] * y[3] - x[3] * y[2];
    out[2] = x[0] * y[2] - x[1] * y[3] + x[2] * y[0] + x[3] * y[1];
    out[3] = x[0] * y[3] + x[1] * y[2] - x[2] * y[1] + x[3] * y[0];
  };
  std::array<Rational, 8> r;
  Rational t1[4], t2[4];
  qm(a.data(), b.data(), r.data());
  qm(a.data(), b.data() + 4, t1);
  qm(a.data() + 4, b.data(), t2);
  for (int k = 0; k < 4; ++k) r[4 + k] = t1[k] + t2[k];
  return r;
}

Rational rnd(std::mt19937_64& g) {
  std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
  return Rational(num(g), den(g));
}

D random_dq(std::mt19937_64& g) {
  std::array<Rational, 8> c;
  for (auto& v : c) v = rnd(g);
  return D(c);
}

// Random element of the Study quadric: product of random rotations about random lines.
D random_study(std::mt19937_64& g) {
  auto unit = [&]() {
    Rational a = rnd(g), b = rnd(g), n = 1 + a * a + b * b;
    return Vec3<Rational>{2 * a / n, 2 * b / n, (1 - a * a - b * b) / n};
  };
  D prod = D::one();
  for (int k = 0; k < 3; ++k) {
    D h = line_axis(unit(), Vec3<Rational>{rnd(g), rnd(g), rnd(g)});
    prod = prod * rotation_element(h, ProjectiveParam<Rational>::finite(rnd(g))).rep;
  }
  return prod;
}

}  // namespace

TEST(DualQuaternion, BasisTable) {
  EXPECT_EQ(D::i() * D::j(), D::k());
  EXPECT_EQ(D::j() * D::k(), D::i());
  EXPECT_EQ(D::k() * D::i(), D::j());
  EXPECT_EQ(D::j() * D::i(), -D::k());
  EXPECT_EQ(D::i() * D::i(), -D::one());
  EXPECT_EQ(D::eps() * D::eps(), D());
  EXPECT_EQ(D::eps() * D::i(), D::i() * D::eps());
  EXPECT_EQ(D::eps() * D::i(), D::basis(5));
}

TEST(DualQuaternion, ProductMatchesOracle) {
  std::mt19937_64 g(7);
  for (int n = 0; n < 300; ++n) {
    D a = random_dq(g), b = random_dq(g);
    EXPECT_EQ((a * b).coords(), oracle_mul(a.coords(), b.coords()));
  }
}

TEST(DualQuaternion, NormIsMultiplicative) {
  std::mt19937_64 g(11);
  for (int n = 0; n < 300; ++n) {
    D a = random_dq(g), b = random_dq(g);
    auto na = norm(a), nb = norm(b), nab = norm(a * b);
    EXPECT_EQ(nab.real, na.real * nb.real);
    EXPECT_EQ(nab.eps, na.real * nb.eps + na.eps * nb.real);
  }
}

TEST(DualQuaternion, ConjugationReversesProducts) {
  std::mt19937_64 g(12);
  for (int n = 0; n < 200; ++n) {
    D a = random_dq(g), b = random_dq(g);
    EXPECT_EQ((a * b).conj(), b.conj() * a.conj());
    D hh = a * a.conj();
    for (int c : {1, 2, 3, 5, 6, 7}) EXPECT_EQ(hh[c], 0);
  }
}

TEST(DualQuaternion, StudyQuadricClosedUnderProducts) {
  std::mt19937_64 g(13);
  for (int n = 0; n < 50; ++n) {
    D a = random_study(g), b = random_study(g);
    ASSERT_TRUE(is_on_study_quadric(a));
    EXPECT_TRUE(is_on_study_quadric(a * b));
    EXPECT_FALSE(is_on_null_cone(a * b));
  }
}

TEST(DualQuaternion, NullConeOfComplexElementsUsesSquares) {
  DQ<Complex> h = DQ<Complex>::scalar({0, 1}) - DQ<Complex>::i();
  EXPECT_TRUE(is_on_null_cone(h));
  DQ<GaussRational> e = DQ<GaussRational>::scalar(GaussRational::i()) - DQ<GaussRational>::i();
  EXPECT_TRUE(is_on_null_cone(e));
  EXPECT_FALSE(is_on_null_cone(DQ<GaussRational>::one()));
}

TEST(PoseClass, ScalingInvariance) {
  std::mt19937_64 g(3);
  D a = random_study(g);
  PoseClass<Rational> x{a}, y{Rational(-7, 3) * a};
  EXPECT_TRUE(x == y);
  EXPECT_FALSE(x == PoseClass<Rational>{a + D::eps()});
  DQ<Complex> c = convert<Complex>(a);
  EXPECT_TRUE(proportional(c, Complex(0.3, -2.0) * c));
}

TEST(PoseClass, RotationAndTranslationActions) {
  using V = Vec3<Rational>;
  auto half = rotation_element(D::i(), ProjectiveParam<Rational>::finite(0));
  EXPECT_EQ(act_on_point(half, V{0, 1, 0}), (V{0, -1, 0}));
  auto quarter = rotation_element(D::i(), ProjectiveParam<Rational>::finite(1));
  EXPECT_EQ(act_on_point(quarter, V{0, 1, 0}), (V{0, 0, -1}));
  auto ident = rotation_element(D::i(), ProjectiveParam<Rational>::infinity());
  EXPECT_EQ(act_on_point(ident, V{3, 4, 5}), (V{3, 4, 5}));
  auto tr = translation_element(Quaternion<Rational>::pure(1, 0, 0), Rational(1));
  EXPECT_EQ(act_on_point(tr, V{5, 5, 5}), (V{7, 5, 5}));
  EXPECT_THROW(rotation_element(D::scalar(2), ProjectiveParam<Rational>::finite(1)), std::invalid_argument);
  EXPECT_THROW(act_on_point(PoseClass<Rational>{D::eps() * D::i()}, V{0, 0, 0}), std::domain_error);
}

TEST(PoseClass, RotationFixesAxisAndPreservesDistances) {
  std::mt19937_64 g(21);
  using V = Vec3<Rational>;
  for (int n = 0; n < 40; ++n) {
    Rational a = rnd(g), b = rnd(g), nn = 1 + a * a + b * b;
    V dir{2 * a / nn, 2 * b / nn, (1 - a * a - b * b) / nn};
    V pt{rnd(g), rnd(g), rnd(g)};
    D h = line_axis(dir, pt);
    auto rot = rotation_element(h, ProjectiveParam<Rational>::finite(rnd(g)));
    V on{pt[0] + 2 * dir[0], pt[1] + 2 * dir[1], pt[2] + 2 * dir[2]};
    EXPECT_EQ(act_on_point(rot, on), on);
    V x{rnd(g), rnd(g), rnd(g)}, y{rnd(g), rnd(g), rnd(g)};
    V fx = act_on_point(rot, x), fy = act_on_point(rot, y);
    auto d2 = [](const V& p, const V& q) {
      return (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]) + (p[2] - q[2]) * (p[2] - q[2]);
    };
    EXPECT_EQ(d2(fx, fy), d2(x, y));
  }
}

TEST(PoseClass, ActionIsHomomorphism) {
  std::mt19937_64 g(22);
  using V = Vec3<Rational>;
  for (int n = 0; n < 20; ++n) {
    D a = random_study(g), b = random_study(g);
    V x{rnd(g), rnd(g), rnd(g)};
    EXPECT_EQ(act_on_point(PoseClass<Rational>{a * b}, x),
              act_on_point(PoseClass<Rational>{a}, act_on_point(PoseClass<Rational>{b}, x)));
  }
}

TEST(Scalars, ParseRational) {
  EXPECT_EQ(parse_rational("16/5"), Rational(16, 5));
  EXPECT_EQ(parse_rational("-1.25"), Rational(-5, 4));
  EXPECT_EQ(parse_rational("3e-2"), Rational(3, 100));
  EXPECT_EQ(parse_rational(" 7 "), Rational(7));
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_EQ(*rationalize(-1.0 / 3.0), Rational(-1, 3));
  EXPECT_EQ(exact_rational(0.375), Rational(3, 8));
}
