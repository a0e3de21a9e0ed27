#include "bondforge/numeric/system.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bondforge;
using namespace bondforge::numeric;
using P = Polynomial<Rational>;

namespace {

PolySystem<Rational> small_system(std::vector<P> eqs, int nvars) {
  PolySystem<Rational> s;
  for (int k = 0; k < nvars; ++k) {
    s.variables.push_back("x" + std::to_string(k));
    s.kinds.push_back(JointKind::Revolute);
  }
  s.equations = std::move(eqs);
  return s;
}

Linkage random_dh_loop(int n, std::mt19937_64& g) {
  std::uniform_int_distribution<int> num(-30, 30), den(1, 7);
  auto r = [&]() { return Rational(num(g), den(g)); };
  std::vector<DHParams> p;
  for (int k = 0; k < n; ++k) {
    Rational w = r();
    if (w == 0) w = 1;
    p.push_back(DHParams::make(r(), w, r()));
  }
  return linkage_from_dh(p);
}

}  // namespace

TEST(Homotopy, NullConeRootsAreExcluded) {
  P t = P::variable(0);
  auto res = solve_square(small_system({t * t + P(1)}, 1));
  EXPECT_EQ(res.paths, 2);
  EXPECT_EQ(res.solutions.size(), 0u);
  EXPECT_EQ(res.excluded, 2);
}

TEST(Homotopy, SmallSquareSystem) {
  P x = P::variable(0), y = P::variable(1);
  auto res = solve_square(small_system({x * x - P(2), y - x - P(1)}, 2));
  ASSERT_EQ(res.solutions.size(), 2u);
  EXPECT_NEAR(res.solutions[0].value(0).real(), -std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(res.solutions[1].value(1).real(), 1 + std::sqrt(2.0), 1e-12);
}

TEST(Homotopy, SolutionAtInfinityIsKept) {
  // x y = 1 has no finite root on y = 0, but (x : 1) = (1 : 0) with y = 0 solves the bihomogeneous form.
  P x = P::variable(0), y = P::variable(1);
  auto res = solve_square(small_system({x * y - P(1), y}, 2));
  ASSERT_EQ(res.solutions.size(), 1u);
  EXPECT_TRUE(res.solutions[0].at_infinity(0));
}

TEST(Homotopy, GenericFourBarHasNoConfiguration) {
  std::mt19937_64 g(4);
  auto sys = expand_loop(random_dh_loop(4, g));
  auto res = solve_square(sys);
  EXPECT_EQ(res.solutions.size(), 0u);
}

TEST(Homotopy, MobileLinkageIsRejectedWithDirection) {
  Linkage l = linkage_from_dh({DHParams::make(0, 1, 4), DHParams::make(0, 2, Rational(16, 5)),
                               DHParams::make(0, 1, 4), DHParams::make(0, 2, Rational(16, 5))});
  EXPECT_THROW(solve_square(expand_loop(l)), PositiveDimensionalError);
}

TEST(Homotopy, GenericSixRHasSixteenConfigurations) {
  std::mt19937_64 g(6);
  auto sys = expand_loop(random_dh_loop(6, g));
  SolveOptions o;
  o.seed = 3;
  auto res = solve_square(sys, o);
  EXPECT_EQ(res.solutions.size(), 16u);
  for (const auto& s : res.solutions) EXPECT_LT(s.residual, 1e-10);
}
