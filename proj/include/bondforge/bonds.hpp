#pragma once

#include "bondforge/local.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bondforge {

/// A bond: a place of the configuration curve over the null cone of some joint.
struct Bond {
  int component = 0;
  LocalParametrization place;
  std::vector<ProjectiveParam<Complex>> coordinates;
  std::optional<std::vector<ProjectiveParam<GaussRational>>> exact;
  /// Joints with N(m_k(t_k)) = 0, in increasing order.
  std::vector<int> attached;
  /// Links grouped by connectivity after removing the attached joints.
  std::vector<std::vector<int>> partition;
  /// Vanishing order of N(m_k) along the place, per attached joint.
  std::vector<int> multiplicity;
  /// Index of the conjugate bond and the conjugate-pair id.
  int conjugate = -1;
  int pair = -1;
  bool certified = false;
};

struct BondSet {
  std::vector<Bond> bonds;
  /// False if some fiber point or joint could not be followed to the null cone.
  bool complete = true;
  std::vector<std::string> issues;
};

namespace detail {

/// Links of a single loop joined after removing `cut` joints (joint k joins links ends[k]).
inline std::vector<std::vector<int>> link_partition(const Linkage& l, const std::vector<int>& cut) {
  numeric::detail::UnionFind uf(l.num_links);
  for (int k = 0; k < l.size(); ++k)
    if (std::find(cut.begin(), cut.end(), k) == cut.end()) uf.unite(l.ends[k].first, l.ends[k].second);
  return numeric::detail::groups_of(uf, l.num_links);
}

inline bool null_exact(const Joint& j, const ProjectiveParam<GaussRational>& t) {
  if (j.revolute()) return (t.u * t.u + t.v * t.v).is_zero();
  return t.u.is_zero();
}

inline double null_numeric(const Joint& j, const ProjectiveParam<Complex>& t) {
  double n = std::norm(t.u) + std::norm(t.v);
  if (n == 0) return 0;
  if (j.revolute()) return std::abs(t.u * t.u + t.v * t.v) / n;
  return std::norm(t.u) / n;
}

/// Roots on P^1 of a polynomial of formal degree d: exact ones in Q(i) and the rest numerically.
inline void homogeneous_roots(const GPoly& p, int d, std::vector<ProjectiveParam<GaussRational>>& exact,
                              std::vector<ProjectiveParam<Complex>>& approx) {
  if (p.is_zero()) return;
  if (p.degree() < d) exact.push_back(ProjectiveParam<GaussRational>::infinity());
  GPoly rest = p;
  while (rest.degree() >= 1) {
    if (rest.degree() == 1) {
      exact.push_back({-rest.coeff(0) / rest.coeff(1), GaussRational(1)});
      break;
    }
    bool found = false;
    for (const Complex& z : roots(to_complex_poly(rest))) {
      auto q = rationalize(z);
      if (!q || !rest.eval(*q).is_zero()) continue;
      exact.push_back({*q, GaussRational(1)});
      rest = GPoly::divmod(rest, GPoly(std::vector<GaussRational>{-*q, GaussRational(1)})).first;
      found = true;
      break;
    }
    if (!found) {
      for (const Complex& z : roots(to_complex_poly(rest))) approx.push_back(ProjectiveParam<Complex>::finite(z));
      break;
    }
  }
}

inline void fill_bond(const Linkage& l, Bond& b) {
  b.coordinates = b.place.center();
  b.exact = b.place.exact_center();
  b.attached.clear();
  for (int k = 0; k < l.size(); ++k) {
    bool null = b.exact ? null_exact(l.joints[k], (*b.exact)[k]) : null_numeric(l.joints[k], b.coordinates[k]) < 1e-6;
    if (null) b.attached.push_back(k);
  }
  b.partition = link_partition(l, b.attached);
  b.multiplicity.clear();
  for (int k : b.attached) {
    int before = l.ends[k].first, after = l.ends[k].second;
    b.multiplicity.push_back(twice_local_distance(l, b.place, before, after));
  }
}

}  // namespace detail

/// All bonds of the configuration curve, per component: exact on rationally parametrized components
/// (roots of N(m_k) in the parameter), otherwise by circle endgames over t_k = ±i (R) or t_k = 0 (P).
inline BondSet find_bonds(const ConfigurationCurve& cc, const EndgameOptions& opt = {}) {
  const Linkage& l = cc.linkage;
  int n = l.size();
  BondSet out;
  if (!cc.decomposition.complete) {
    out.complete = false;
    out.issues.push_back("component decomposition is not certified");
  }
  for (int c = 0; c < cc.size(); ++c) {
    const auto& comp = cc.component(c);
    std::vector<LocalParametrization> places;
    if (cc.parametrizations[c]) {
      const auto& rp = *cc.parametrizations[c];
      std::vector<ProjectiveParam<GaussRational>> ex;
      std::vector<ProjectiveParam<Complex>> ap;
      for (int k = 0; k < n; ++k) {
        if (comp.degrees[k] == 0) continue;
        if (l.joints[k].revolute()) {
          detail::homogeneous_roots(rp.num[k] + GaussRational::i() * rp.den[k], rp.degrees[k], ex, ap);
          detail::homogeneous_roots(rp.num[k] - GaussRational::i() * rp.den[k], rp.degrees[k], ex, ap);
        } else {
          detail::homogeneous_roots(rp.num[k], rp.degrees[k], ex, ap);
        }
      }
      std::vector<ProjectiveParam<GaussRational>> uniq;
      for (const auto& t : ex) {
        bool dup = false;
        for (const auto& s : uniq) dup = dup || same_point(s, t);
        if (!dup) uniq.push_back(t);
      }
      for (const auto& t : uniq) places.push_back(place_at(rp, t));
      std::vector<ProjectiveParam<Complex>> auniq;
      for (const auto& t : ap) {
        bool dup = false;
        for (const auto& s : auniq) dup = dup || chordal_distance(s, t) < 1e-8;
        if (!dup) auniq.push_back(t);
      }
      for (const auto& t : auniq) places.push_back(place_at(rp, t, opt.order));
    } else {
      for (int k = 0; k < n; ++k) {
        if (comp.degrees[k] == 0) continue;
        std::vector<Complex> targets;
        if (l.joints[k].revolute())
          targets = {Complex(0, 1), Complex(0, -1)};
        else
          targets = {Complex(0)};
        for (const Complex& target : targets) {
          int lost = 0;
          auto found = circle_places(cc.ctx, cc.decomposition, comp, k, target, cc.rng, lost, opt);
          if (lost > 0) {
            out.complete = false;
            out.issues.push_back("component " + std::to_string(c) + ", joint " + std::to_string(k + 1) + ": " +
                                 std::to_string(lost) + " fiber point(s) not followed to the null cone");
          }
          for (auto& p : found) {
            bool dup = false;
            for (const auto& q : places) dup = dup || same_place(p, q);
            if (!dup) places.push_back(std::move(p));
          }
        }
      }
    }
    for (auto& p : places) {
      Bond b;
      b.component = c;
      b.place = std::move(p);
      detail::fill_bond(l, b);
      b.certified = b.place.exact || (b.place.sample_residual < 1e-9 && b.place.fit_residual < 1e-7);
      if (b.attached.empty()) continue;
      out.bonds.push_back(std::move(b));
    }
  }
  // Conjugate pairs.
  auto conj_of = [&](const Bond& a, const Bond& b) {
    if (a.exact && b.exact) {
      for (int k = 0; k < n; ++k) {
        const auto& x = (*a.exact)[k];
        const auto& y = (*b.exact)[k];
        if (!same_point(ProjectiveParam<GaussRational>{x.u.conj(), x.v.conj()}, y)) return false;
      }
      return true;
    }
    for (int k = 0; k < n; ++k) {
      ProjectiveParam<Complex> x{std::conj(a.coordinates[k].u), std::conj(a.coordinates[k].v)};
      if (chordal_distance(x, b.coordinates[k]) > 1e-6) return false;
    }
    return true;
  };
  int pairs = 0;
  for (std::size_t i = 0; i < out.bonds.size(); ++i) {
    if (out.bonds[i].conjugate >= 0) continue;
    for (std::size_t j = i + 1; j < out.bonds.size(); ++j) {
      if (out.bonds[j].conjugate >= 0 || !conj_of(out.bonds[i], out.bonds[j])) continue;
      out.bonds[i].conjugate = static_cast<int>(j);
      out.bonds[j].conjugate = static_cast<int>(i);
      out.bonds[i].pair = out.bonds[j].pair = pairs++;
      break;
    }
    if (out.bonds[i].conjugate < 0) out.bonds[i].pair = pairs++;
  }
  return out;
}

/// Joints attached to no bond.
inline std::vector<int> frozen_joints(const Linkage& l, const BondSet& bs) {
  std::vector<bool> att(l.size(), false);
  for (const auto& b : bs.bonds)
    for (int k : b.attached) att[k] = true;
  std::vector<int> out;
  for (int k = 0; k < l.size(); ++k)
    if (!att[k]) out.push_back(k);
  return out;
}

/// Evaluation of a chain product at a bond.
struct BondCondition {
  std::vector<int> chain;
  int bond = -1;
  std::optional<DQ<GaussRational>> exact_product;
  DQ<Complex> product;
  bool zero = false;
  bool end_norms_zero = false;
  /// The chain contains an attached joint and its end links lie in one partition class.
  bool applicable = false;
};

inline BondCondition check_bond_condition(const Linkage& l, const std::vector<int>& chain, const BondSet& bs, int bond) {
  const Bond& b = bs.bonds.at(bond);
  if (chain.empty()) throw InputError("chain", "empty chain");
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (chain[i] < 0 || chain[i] >= l.size()) throw InputError("chain", "joint index out of range");
    if (i > 0 && l.ends[chain[i - 1]].second != l.ends[chain[i]].first)
      throw InputError("chain", "joints do not form a forward path in the link graph");
  }
  BondCondition bc;
  bc.chain = chain;
  bc.bond = bond;
  int first = l.ends[chain.front()].first, last = l.ends[chain.back()].second;
  bool has_attached = false;
  for (int k : chain) has_attached = has_attached || std::count(b.attached.begin(), b.attached.end(), k);
  bool same_class = false;
  for (const auto& cls : b.partition)
    if (std::count(cls.begin(), cls.end(), first) && std::count(cls.begin(), cls.end(), last)) same_class = true;
  bc.applicable = has_attached && same_class;
  if (b.exact) {
    DQ<GaussRational> p = chain_product<GaussRational>(l, chain, *b.exact);
    bc.exact_product = p;
    bc.product = convert<Complex>(p);
    bc.zero = p.is_zero_dq(0);
    bc.end_norms_zero = detail::null_exact(l.joints[chain.front()], (*b.exact)[chain.front()]) &&
                        detail::null_exact(l.joints[chain.back()], (*b.exact)[chain.back()]);
  } else {
    bc.product = chain_product<Complex>(l, chain, b.coordinates);
    double scale = 1.0;
    for (int k : chain) scale *= std::sqrt(std::norm(b.coordinates[k].u) + std::norm(b.coordinates[k].v));
    double m = 0;
    for (int c = 0; c < 8; ++c) m = std::max(m, std::abs(bc.product[c]));
    bc.zero = m <= 1e-7 * scale;
    bc.end_norms_zero = detail::null_numeric(l.joints[chain.front()], b.coordinates[chain.front()]) < 1e-6 &&
                        detail::null_numeric(l.joints[chain.back()], b.coordinates[chain.back()]) < 1e-6;
  }
  return bc;
}

/// Bond counts between pairs of joints: individual bonds and conjugate pairs. Bonds not attached to
/// exactly two joints are listed separately.
struct BondConnections {
  std::map<std::pair<int, int>, int> bonds;
  std::map<std::pair<int, int>, int> pairs;
  std::vector<int> irregular;

  int pair_count(int i, int j) const {
    auto it = pairs.find({std::min(i, j), std::max(i, j)});
    return it == pairs.end() ? 0 : it->second;
  }
  int bond_count(int i, int j) const {
    auto it = bonds.find({std::min(i, j), std::max(i, j)});
    return it == bonds.end() ? 0 : it->second;
  }
};

inline BondConnections bond_connections(const BondSet& bs) {
  BondConnections bc;
  for (std::size_t i = 0; i < bs.bonds.size(); ++i) {
    const Bond& b = bs.bonds[i];
    if (b.attached.size() != 2) {
      bc.irregular.push_back(static_cast<int>(i));
      continue;
    }
    std::pair<int, int> key{b.attached[0], b.attached[1]};
    ++bc.bonds[key];
    if (b.conjugate < 0 || b.conjugate > static_cast<int>(i)) ++bc.pairs[key];
  }
  return bc;
}

}  // namespace bondforge
