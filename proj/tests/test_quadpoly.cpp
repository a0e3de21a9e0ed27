#include "fixtures.hpp"

#include "bondforge/bonds.hpp"
#include "bondforge/quadpoly.hpp"

#include <gtest/gtest.h>

using namespace bondforge;
using namespace fixtures;

namespace {

Linkage rotate(const Linkage& l, int by) {
  std::vector<Joint> js;
  for (int k = 0; k < l.size(); ++k) js.push_back(l.joints[(k + by) % l.size()]);
  return Linkage::cycle(js);
}

}  // namespace

TEST(QuadPoly, CbParams) {
  auto p = cb_params(Rational(2), Rational(4));
  EXPECT_EQ(p.c, Rational(3, 5));
  EXPECT_EQ(p.b, std::optional<Rational>(Rational(5)));
  auto q = cb_params(Rational(1), Rational(7, 2));
  EXPECT_EQ(q.c, Rational(0));
  EXPECT_EQ(q.b, std::optional<Rational>(Rational(7, 2)));
  EXPECT_EQ(cb_params(ProjectiveParam<Rational>::infinity(), Rational(1)).b, std::nullopt);
}

TEST(QuadPoly, PolynomialsAreMonicQuadratics) {
  auto inv = dh_invariants(random_6r(3));
  for (int i = 0; i < 6; ++i)
    for (int s : {1, -1}) {
      auto q = quad_polynomial(inv, i, s);
      EXPECT_EQ(q.coeffs[2], GaussRational(1));
      EXPECT_EQ(q.poly().degree(), 2);
    }
}

TEST(QuadPoly, PlusFollowsCyclicRelabeling) {
  Linkage l = random_6r(8);
  for (int by = 1; by < 6; ++by) {
    Linkage r = rotate(l, by);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(quad_polynomial(r, i, 1).coeffs, quad_polynomial(l, (i + by) % 6, 1).coeffs);
  }
}

TEST(QuadPoly, MinusFollowsEvenRelabeling) {
  Linkage l = random_6r(8);
  for (int by : {2, 4}) {
    Linkage r = rotate(l, by);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(quad_polynomial(r, i, -1).coeffs, quad_polynomial(l, (i + by) % 6, -1).coeffs);
  }
}

TEST(QuadPoly, GcdDegree) {
  using P = UPoly<GaussRational>;
  P a({GaussRational(2), GaussRational(-3), GaussRational(1)});  // (x-1)(x-2)
  P b({GaussRational(3), GaussRational(-4), GaussRational(1)});  // (x-1)(x-3)
  P c({GaussRational(12), GaussRational(-7), GaussRational(1)});  // (x-3)(x-4)
  EXPECT_EQ(gcd_degree(a, a), 2);
  EXPECT_EQ(gcd_degree(a, b), 1);
  EXPECT_EQ(gcd_degree(a, c), 0);
  EXPECT_EQ(gcd_degree_float(to_complex_poly(a), to_complex_poly(b)), 1);
  EXPECT_EQ(gcd_degree_float(to_complex_poly(a), to_complex_poly(c)), 0);
}

TEST(QuadPoly, GenericLoopHasZeroBounds) {
  for (std::uint64_t seed : {1, 2, 3}) {
    for (const auto& cb : connection_bound(random_6r(seed))) EXPECT_EQ(cb.bound(), 0) << seed;
  }
}

TEST(QuadPoly, DuplicatedAxesShareThePlusPolynomials) {
  Linkage l = dup_axes();
  for (int i = 0; i < 3; ++i) EXPECT_EQ(quad_polynomial(l, i, 1).coeffs, quad_polynomial(l, i + 3, 1).coeffs);
  for (const auto& cb : connection_bound(l)) {
    EXPECT_EQ(cb.plus, 2);
    EXPECT_EQ(cb.minus, 1);
  }
}

TEST(QuadPoly, BoundsOnBennettWithTwoFrozenAxes) {
  // Extra axes at (2, 5), (1, 4), (3, 6) in that order; the other two opposite pairs carry one bond pair each.
  const std::vector<std::vector<int>> expected{{1, 0, 1}, {0, 1, 1}, {1, 1, 0}};
  for (int perm = 0; perm < 3; ++perm) {
    Linkage l = bennett_plus_two(perm);
    auto bounds = connection_bound(l);
    auto con = bond_connections(find_bonds(configuration_curve(l, 1)));
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(bounds[i].plus, 0) << perm;
      EXPECT_EQ(bounds[i].bound(), expected[perm][i]) << perm << " " << i;
      EXPECT_LE(con.pair_count(i, i + 3), bounds[i].bound()) << perm << " " << i;
      EXPECT_EQ(con.pair_count(i, i + 3), expected[perm][i]) << perm << " " << i;
    }
  }
}

TEST(QuadPoly, BoundHoldsOnDuplicatedAxes) {
  Linkage l = dup_axes();
  auto con = bond_connections(find_bonds(configuration_curve(l, 1)));
  for (const auto& cb : connection_bound(l)) EXPECT_LE(con.pair_count(cb.joints.first, cb.joints.second), cb.bound());
}

TEST(QuadPoly, RejectsNonHexagonalLoops) { EXPECT_THROW(connection_bound(bennett()), InputError); }
