#include "fixtures.hpp"

#include "bondforge/bonds.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace bondforge;
using namespace fixtures;

namespace {

using Coords = std::vector<GaussRational>;

GaussRational im(int n, int d = 1) { return {Rational(0), Rational(n, d)}; }

std::string key(const Coords& c) {
  std::string s;
  for (const auto& x : c) s += to_string(x.re()) + "+" + to_string(x.im()) + "i;";
  return s;
}

std::set<std::pair<std::string, std::vector<int>>> affine_bonds(const BondSet& bs) {
  std::set<std::pair<std::string, std::vector<int>>> out;
  for (const auto& b : bs.bonds) {
    if (!b.exact) {
      out.insert({"numeric", b.attached});
      continue;
    }
    Coords c;
    for (const auto& t : *b.exact) c.push_back(t.u / t.v);
    out.insert({key(c), b.attached});
  }
  return out;
}

const BondSet& bennett_bonds() {
  static const BondSet bs = find_bonds(configuration_curve(bennett(), 1));
  return bs;
}

}  // namespace

TEST(Bonds, BennettHasFourExactBonds) {
  const auto& bs = bennett_bonds();
  EXPECT_TRUE(bs.complete);
  ASSERT_EQ(bs.bonds.size(), 4u);
  std::set<std::pair<std::string, std::vector<int>>> expected{
      {key({im(-1), im(-1, 3), im(1), im(1, 3)}), {0, 2}},
      {key({im(1), im(1, 3), im(-1), im(-1, 3)}), {0, 2}},
      {key({im(-1, 3), im(-1), im(1, 3), im(1)}), {1, 3}},
      {key({im(1, 3), im(1), im(-1, 3), im(-1)}), {1, 3}},
  };
  EXPECT_EQ(affine_bonds(bs), expected);
  for (const auto& b : bs.bonds) {
    EXPECT_TRUE(b.certified);
    EXPECT_EQ(b.multiplicity, (std::vector<int>{1, 1}));
  }
}

TEST(Bonds, FlippedBennettMatchesTheListedBonds) {
  auto bs = find_bonds(configuration_curve(bennett_flipped(), 1));
  ASSERT_EQ(bs.bonds.size(), 4u);
  std::set<std::pair<std::string, std::vector<int>>> expected{
      {key({im(1), im(-1, 3), im(-1), im(1, 3)}), {0, 2}},
      {key({im(-1), im(1, 3), im(1), im(-1, 3)}), {0, 2}},
      {key({im(1, 3), im(-1), im(-1, 3), im(1)}), {1, 3}},
      {key({im(-1, 3), im(1), im(1, 3), im(-1)}), {1, 3}},
  };
  EXPECT_EQ(affine_bonds(bs), expected);
}

TEST(Bonds, ConjugateBondsArePaired) {
  const auto& bs = bennett_bonds();
  std::set<int> pairs;
  for (std::size_t i = 0; i < bs.bonds.size(); ++i) {
    const auto& b = bs.bonds[i];
    ASSERT_GE(b.conjugate, 0);
    EXPECT_EQ(bs.bonds[b.conjugate].conjugate, static_cast<int>(i));
    EXPECT_EQ(bs.bonds[b.conjugate].pair, b.pair);
    for (std::size_t k = 0; k < 4; ++k) {
      auto t = (*b.exact)[k], s = (*bs.bonds[b.conjugate].exact)[k];
      EXPECT_EQ(t.u / t.v, (s.u / s.v).conj());
    }
    pairs.insert(b.pair);
  }
  EXPECT_EQ(pairs.size(), 2u);
}

TEST(Bonds, PartitionSplitsTheLoopInTwo) {
  for (const auto& b : bennett_bonds().bonds) {
    ASSERT_EQ(b.partition.size(), 2u);
    EXPECT_EQ(b.partition[0].size() + b.partition[1].size(), 4u);
  }
}

TEST(Bonds, ChainProductsVanishBetweenAttachedJoints) {
  Linkage l = bennett();
  const auto& bs = bennett_bonds();
  for (int i = 0; i < 4; ++i) {
    const auto& b = bs.bonds[i];
    int a = b.attached[0], c = b.attached[1];
    // The forward chain from one attached joint to the other.
    std::vector<int> chain;
    for (int k = a; k <= c; ++k) chain.push_back(k);
    auto bc = check_bond_condition(l, chain, bs, i);
    EXPECT_TRUE(bc.zero);
    EXPECT_TRUE(bc.end_norms_zero);
    EXPECT_TRUE(bc.applicable);
    // A single attached joint does not annihilate the product.
    EXPECT_FALSE(check_bond_condition(l, {a}, bs, i).zero);
  }
}

TEST(Bonds, BondConditionRejectsBrokenChains) {
  EXPECT_THROW(check_bond_condition(bennett(), {0, 2}, bennett_bonds(), 0), InputError);
  EXPECT_THROW(check_bond_condition(bennett(), {}, bennett_bonds(), 0), InputError);
}

TEST(Bonds, NoFrozenJointsOnBennett) { EXPECT_TRUE(frozen_joints(bennett(), bennett_bonds()).empty()); }

TEST(Bonds, ExtraAxesAreFrozen) {
  const std::vector<std::vector<int>> frozen{{1, 4}, {0, 3}, {2, 5}};
  const std::vector<std::vector<std::pair<int, int>>> joined{{{0, 3}, {2, 5}}, {{1, 4}, {2, 5}}, {{0, 3}, {1, 4}}};
  for (int perm = 0; perm < 3; ++perm) {
    Linkage l = bennett_plus_two(perm);
    auto bs = find_bonds(configuration_curve(l, 1));
    EXPECT_EQ(bs.bonds.size(), 4u) << perm;
    EXPECT_EQ(frozen_joints(l, bs), frozen[perm]) << perm;
    auto con = bond_connections(bs);
    EXPECT_TRUE(con.irregular.empty());
    std::vector<std::pair<int, int>> keys;
    for (const auto& [k, n] : con.pairs) {
      keys.push_back(k);
      EXPECT_EQ(n, 1);
    }
    EXPECT_EQ(keys, joined[perm]) << perm;
  }
}

TEST(Bonds, ConnectionsCountPairsOnce) {
  auto con = bond_connections(bennett_bonds());
  EXPECT_EQ(con.bond_count(0, 2), 2);
  EXPECT_EQ(con.pair_count(2, 0), 1);
  EXPECT_EQ(con.pair_count(1, 3), 1);
  EXPECT_EQ(con.pair_count(0, 1), 0);
}
