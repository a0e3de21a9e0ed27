#include "fixtures.hpp"

#include "bondforge/bonds.hpp"

#include <gtest/gtest.h>

using namespace bondforge;
using namespace fixtures;

namespace {

GaussRational g(int re, int im, int den = 1) { return {Rational(re, den), Rational(im, den)}; }

LocalParametrization exact_place(std::vector<GPoly> u, std::vector<GPoly> v) {
  LocalParametrization lp;
  lp.exact = true;
  lp.exact_u = std::move(u);
  lp.exact_v = std::move(v);
  return lp;
}

/// u = (τ - i, (i - τ)/3, i - τ, (τ - i)/3), v = 1.
LocalParametrization listed_place() {
  GPoly one({g(1, 0)});
  return exact_place({GPoly({g(0, -1), g(1, 0)}), GPoly({g(0, 1, 3), g(-1, 0, 3)}), GPoly({g(0, 1), g(-1, 0)}),
                      GPoly({g(0, -1, 3), g(1, 0, 3)})},
                     {one, one, one, one});
}

/// θ = i + τ on (θ, -1/(3θ), -θ, 1/(3θ)).
LocalParametrization branch_place() {
  GPoly one({g(1, 0)}), three({g(0, 3), g(3, 0)});
  return exact_place({GPoly({g(0, 1), g(1, 0)}), GPoly({g(-1, 0)}), GPoly({g(0, -1), g(-1, 0)}), GPoly({g(1, 0)})},
                     {one, three, one, three});
}

// Frozen from a symbolic expansion of the chain product of the first two joints.
const std::vector<GaussRational> kListedNorm{g(0, 0), g(0, -160, 9), g(40, 0, 9), g(0, -40, 9), g(10, 0, 9)};
const std::vector<GaussRational> kBranchNorm{g(0, 0), g(0, -160), g(-440, 0), g(0, 360), g(90, 0)};

double rel_error(const std::vector<Complex>& a, const std::vector<GaussRational>& b) {
  double m = 0, e = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    Complex x = k < a.size() ? a[k] : Complex(0);
    m = std::max(m, std::abs(to_complex(b[k])));
    e = std::max(e, std::abs(x - to_complex(b[k])));
  }
  for (std::size_t k = b.size(); k < a.size(); ++k) e = std::max(e, std::abs(a[k]));
  return e / m;
}

}  // namespace

TEST(LocalDistance, ListedPlaceNormSeries) {
  for (const auto& l : {bennett(), bennett_flipped()}) {
    auto cs = exact_chain_series(l, listed_place(), {0, 1});
    EXPECT_EQ(cs.norm, kListedNorm);
    EXPECT_EQ(cs.order_f, 0);
    EXPECT_EQ(cs.twice_distance, 1);
  }
}

TEST(LocalDistance, BranchPlaceNormSeries) {
  auto cs = exact_chain_series(bennett(), branch_place(), {0, 1});
  EXPECT_EQ(cs.norm, kBranchNorm);
  EXPECT_EQ(cs.twice_distance, 1);
}

TEST(LocalDistance, FloatRouteAgreesWithExactRoute) {
  auto a = numeric_chain_series(bennett(), listed_place(), {0, 1});
  EXPECT_LT(rel_error(a.norm, kListedNorm), 1e-8);
  auto b = numeric_chain_series(bennett(), branch_place(), {0, 1});
  EXPECT_LT(rel_error(b.norm, kBranchNorm), 1e-8);
  EXPECT_EQ(b.twice_distance, 1);
}

TEST(LocalDistance, HalfBetweenLinksFourAndTwo) {
  // Links 4 and 2 (1-based) are joined by the first two joints.
  Linkage l = bennett();
  EXPECT_EQ(l.chain_between_links(3, 1), (std::vector<int>{0, 1}));
  EXPECT_EQ(twice_local_distance(l, branch_place(), 3, 1), 1);
  EXPECT_EQ(twice_local_distance(l, branch_place(), 1, 1), 0);
}

TEST(LocalDistance, NumericPlaceFromParametrization) {
  auto cc = configuration_curve(bennett(), 1);
  ASSERT_TRUE(cc.parametrizations[0].has_value());
  const auto& rp = *cc.parametrizations[0];
  auto ex = place_at(rp, ProjectiveParam<GaussRational>::finite(g(0, 1)));
  auto fl = place_at(rp, ProjectiveParam<Complex>::finite(Complex(0, 1)));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(twice_local_distance(cc.linkage, ex, i, j), twice_local_distance(cc.linkage, fl, i, j));
}

TEST(LocalDistance, RegularPlaceHasZeroDistances) {
  auto cc = configuration_curve(bennett(), 1);
  auto lp = place_at(*cc.parametrizations[0], ProjectiveParam<GaussRational>::finite(g(2, 0)));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(twice_local_distance(cc.linkage, lp, i, j), 0);
}
