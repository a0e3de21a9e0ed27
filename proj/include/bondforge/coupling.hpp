#pragma once

#include "bondforge/linkage.hpp"
#include "bondforge/polynomial.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace bondforge {

/// Linear span of all products m_{i1}(t_{i1}) ... m_{ik}(t_{ik}) of a chain of joints.
struct CouplingSpace {
  std::vector<int> chain;
  /// Coefficients of the multilinear expansion; bit b of the index selects the t-free term of joint b.
  std::vector<DQ<Rational>> generators;
  int dimension = 0;
};

inline std::vector<DQ<Rational>> coupling_generators(const Linkage& l, const std::vector<int>& chain) {
  if (chain.empty()) throw InputError("chain", "empty chain");
  std::vector<DQ<Rational>> gens{DQ<Rational>::one()};
  for (int k : chain) {
    if (k < 0 || k >= l.size()) throw InputError("chain", "joint index out of range");
    const Joint& j = l.joints[k];
    DQ<Rational> a = j.transfer, b = -(j.axis * j.transfer);
    std::vector<DQ<Rational>> next;
    next.reserve(gens.size() * 2);
    for (const auto& g : gens) {
      next.push_back(g * a);
      next.push_back(g * b);
    }
    gens = std::move(next);
  }
  return gens;
}

inline int exact_dimension(const std::vector<DQ<Rational>>& gens) {
  std::vector<std::vector<Rational>> rows;
  for (const auto& g : gens) rows.emplace_back(g.coords().begin(), g.coords().end());
  return exact_rank(rows);
}

/// Exact coupling space over the rationals.
inline CouplingSpace coupling_space(const Linkage& l, const std::vector<int>& chain) {
  CouplingSpace cs;
  cs.chain = chain;
  cs.generators = coupling_generators(l, chain);
  cs.dimension = exact_dimension(cs.generators);
  return cs;
}

/// Dimension from singular values in double precision: values below rel_tol times the largest are zero.
inline int coupling_dimension_float(const Linkage& l, const std::vector<int>& chain, double rel_tol = 1e-9) {
  auto gens = coupling_generators(l, chain);
  Eigen::MatrixXd m(gens.size(), 8);
  for (std::size_t r = 0; r < gens.size(); ++r)
    for (int c = 0; c < 8; ++c) m(r, c) = gens[r][c].template convert_to<double>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

inline bool check_parity(const CouplingSpace& cs) { return cs.dimension % 2 == 0; }

/// Bennett condition of a 3R chain with distances d1, d2, twists w1, w2 (projective) and middle
/// offset s2: s2 = 0 and d1 (w1^2+1)/w1 = d2 (w2^2+1)/w2, cross-multiplied so that w = 0 or inf is allowed.
inline bool bennett_condition(const Rational& d1, const ProjectiveParam<Rational>& w1, const Rational& d2,
                              const ProjectiveParam<Rational>& w2, const Rational& s2) {
  if (s2 != 0) return false;
  Rational lhs = d1 * (w1.u * w1.u + w1.v * w1.v) * w2.u * w2.v;
  Rational rhs = d2 * (w2.u * w2.u + w2.v * w2.v) * w1.u * w1.v;
  return lhs == rhs;
}

inline bool bennett_condition(const Rational& d1, const Rational& w1, const Rational& d2, const Rational& w2,
                              const Rational& s2) {
  return bennett_condition(d1, ProjectiveParam<Rational>::finite(w1), d2, ProjectiveParam<Rational>::finite(w2), s2);
}

/// Float form with an absolute tolerance on both equations (w finite).
inline bool bennett_condition_float(double d1, double w1, double d2, double w2, double s2, double tol = 1e-9) {
  if (std::abs(s2) > tol) return false;
  return std::abs(d1 * (w1 * w1 + 1) * w2 - d2 * (w2 * w2 + 1) * w1) <= tol * std::max({1.0, std::abs(d1), std::abs(d2)});
}

/// Direction and moment of a line h = p + ε m.
struct Line {
  Vec3<Rational> p, m;

  static Line of(const DQ<Rational>& h) { return {{h[1], h[2], h[3]}, {h[5], h[6], h[7]}}; }
  /// The point of the line closest to the origin (|p| = 1).
  Vec3<Rational> point() const {
    return {m[1] * p[2] - m[2] * p[1], m[2] * p[0] - m[0] * p[2], m[0] * p[1] - m[1] * p[0]};
  }
};

namespace detail {

inline Rational dot(const Vec3<Rational>& a, const Vec3<Rational>& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3<Rational> cross(const Vec3<Rational>& a, const Vec3<Rational>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3<Rational> sub(const Vec3<Rational>& a, const Vec3<Rational>& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace detail

inline bool axes_parallel(const DQ<Rational>& h1, const DQ<Rational>& h2) {
  auto c = detail::cross(Line::of(h1).p, Line::of(h2).p);
  return c[0] == 0 && c[1] == 0 && c[2] == 0;
}

inline bool axes_coincide(const DQ<Rational>& h1, const DQ<Rational>& h2) { return same_line(h1, h2); }

/// True if all lines pass through one finite point: p_k x x = m_k is solvable.
inline bool axes_concurrent(const std::vector<DQ<Rational>>& hs) {
  std::vector<std::vector<Rational>> a, ab;
  for (const auto& h : hs) {
    Line ln = Line::of(h);
    const auto& p = ln.p;
    std::vector<std::vector<Rational>> rows = {{Rational(0), -p[2], p[1]}, {p[2], Rational(0), -p[0]}, {-p[1], p[0], Rational(0)}};
    for (int r = 0; r < 3; ++r) {
      a.push_back(rows[r]);
      auto ext = rows[r];
      ext.push_back(ln.m[r]);
      ab.push_back(ext);
    }
  }
  return exact_rank(a) == exact_rank(ab);
}

inline bool axes_concurrent(const DQ<Rational>& h1, const DQ<Rational>& h2, const DQ<Rational>& h3) {
  return axes_concurrent(std::vector<DQ<Rational>>{h1, h2, h3});
}

/// Rational Denavit-Hartenberg invariants of consecutive axes r, r+1: c = cos of the twist,
/// b = distance / sin of the twist, and the offset s_r along axis r between the common normals.
/// b and s are absent for parallel neighbours.
struct DHInvariants {
  std::vector<Rational> c;
  std::vector<std::optional<Rational>> b, s;
};

/// From the DH data of a DH-defined single loop.
/// c = (w^2-1)/(w^2+1) and b = d (w^2+1)/(2w) of one DH link; b is absent when w is 0 or inf and d != 0.
inline std::pair<Rational, std::optional<Rational>> link_cb(const ProjectiveParam<Rational>& w, const Rational& d) {
  Rational n = w.u * w.u + w.v * w.v;
  Rational c = (w.u * w.u - w.v * w.v) / n;
  if (w.u == 0 || w.v == 0) return {c, d == 0 ? std::optional<Rational>(Rational(0)) : std::nullopt};
  return {c, d * n / (2 * w.u * w.v)};
}

inline DHInvariants dh_invariants_from_dh(const Linkage& l) {
  if (!l.is_single_loop() || !l.all_dh()) throw InputError("joints", "DH invariants need a DH-defined single loop");
  DHInvariants inv;
  for (const auto& j : l.joints) {
    auto [c, b] = link_cb(j.dh->w, j.dh->d);
    inv.c.push_back(c);
    inv.b.push_back(b);
    inv.s.push_back(j.dh->s);
  }
  return inv;
}

/// From revolute axes in one common frame (a closed configuration of the loop).
inline DHInvariants dh_invariants_from_axes(const std::vector<DQ<Rational>>& axes) {
  int n = static_cast<int>(axes.size());
  DHInvariants inv;
  std::vector<std::optional<std::pair<Rational, Rational>>> feet(n);
  for (int r = 0; r < n; ++r) {
    Line a = Line::of(axes[r]), b = Line::of(axes[(r + 1) % n]);
    Rational c = detail::dot(a.p, b.p);
    inv.c.push_back(c);
    Rational sin2 = 1 - c * c;
    auto pa = a.point(), pb = b.point();
    auto e = detail::sub(pb, pa);
    if (sin2 == 0) {
      Vec3<Rational> mixed = detail::cross(e, a.p);
      bool same = detail::dot(mixed, mixed) == 0;
      inv.b.push_back(same ? std::optional<Rational>(Rational(0)) : std::nullopt);
      continue;
    }
    inv.b.push_back(-detail::dot(e, detail::cross(a.p, b.p)) / sin2);
    Rational e1 = detail::dot(e, a.p), e2 = detail::dot(e, b.p);
    // Feet of the common normal: pa + x a.p and pb + y b.p.
    Rational x = (e1 - c * e2) / sin2, y = (c * e1 - e2) / sin2;
    feet[r] = std::make_pair(x, y);
  }
  for (int r = 0; r < n; ++r) {
    int q = (r - 1 + n) % n;
    if (!feet[r] || !feet[q]) {
      inv.s.push_back(std::nullopt);
      continue;
    }
    inv.s.push_back(feet[r]->first - feet[q]->second);
  }
  return inv;
}

/// DH invariants of a revolute single loop: from DH data, or from the axes of an axis-form loop.
inline DHInvariants dh_invariants(const Linkage& l) {
  if (!l.is_single_loop() || !l.all_revolute()) throw InputError("joints", "DH invariants need a revolute single loop");
  if (l.all_dh()) return dh_invariants_from_dh(l);
  std::vector<DQ<Rational>> axes;
  for (const auto& j : l.joints) {
    if (j.transfer != DQ<Rational>::one())
      throw InputError("joints", "mixed DH and axis joints are not supported for DH invariants");
    axes.push_back(j.axis);
  }
  return dh_invariants_from_axes(axes);
}

/// Bennett condition of the 3-chain of consecutive joints (r, r+1, r+2) of a revolute loop.
inline bool chain_bennett_condition(const DHInvariants& inv, int r) {
  int n = static_cast<int>(inv.c.size());
  int r1 = (r + 1) % n;
  if (!inv.b[r] || !inv.b[r1] || !inv.s[r1]) return false;
  return *inv.s[r1] == 0 && *inv.b[r] == *inv.b[r1];
}

/// Conditions of the PRRRR classification for a 5-loop with joint types P, R, R, R, R.
struct PrrrrReport {
  std::optional<bool> p_frozen;
  bool two_axes_coincide = false;
  /// Three rotation axes parallel and the remaining one frozen (frozen status needs the curve).
  bool three_axes_parallel = false;
  std::optional<bool> three_parallel_and_fourth_frozen;
  bool pairs_parallel = false;
  /// True if at least one condition holds; empty if that depends on unknown frozen status.
  std::optional<bool> some_condition;
};

/// `frozen` lists frozen joints if known (from bonds or the configuration curve).
inline PrrrrReport prrrr_conditions(const Linkage& l, const std::optional<std::vector<int>>& frozen = std::nullopt) {
  if (!l.is_single_loop() || l.size() != 5 || l.joints[0].revolute())
    throw InputError("joints", "PRRRR conditions need a 5-loop with joint types P, R, R, R, R");
  for (int k = 1; k < 5; ++k)
    if (!l.joints[k].revolute()) throw InputError("joints", "PRRRR conditions need a 5-loop with joint types P, R, R, R, R");
  // Axes of the R joints in the frame of link 0 at the all-inf configuration of the open chain.
  std::vector<ProjectiveParam<Rational>> inf(5, ProjectiveParam<Rational>::infinity());
  auto axes = global_axes<Rational>(l, inf);
  PrrrrReport rep;
  auto is_frozen = [&](int k) -> std::optional<bool> {
    if (!frozen) return std::nullopt;
    return std::find(frozen->begin(), frozen->end(), k) != frozen->end();
  };
  rep.p_frozen = is_frozen(0);
  for (int a = 1; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) rep.two_axes_coincide = rep.two_axes_coincide || axes_coincide(axes[a], axes[b]);
  bool third_true = false, third_unknown = false;
  for (int skip = 1; skip < 5; ++skip) {
    std::vector<int> rest;
    for (int k = 1; k < 5; ++k)
      if (k != skip) rest.push_back(k);
    if (!axes_parallel(axes[rest[0]], axes[rest[1]]) || !axes_parallel(axes[rest[1]], axes[rest[2]])) continue;
    rep.three_axes_parallel = true;
    auto f = is_frozen(skip);
    if (!f)
      third_unknown = true;
    else if (*f)
      third_true = true;
  }
  std::optional<bool> third = third_true ? std::optional<bool>(true) : third_unknown ? std::nullopt : std::optional<bool>(false);
  rep.three_parallel_and_fourth_frozen = third;
  rep.pairs_parallel = axes_parallel(axes[1], axes[2]) && axes_parallel(axes[3], axes[4]);
  bool known_true = rep.two_axes_coincide || rep.pairs_parallel || (rep.p_frozen && *rep.p_frozen) || (third && *third);
  bool unknown = !rep.p_frozen || !third;
  if (known_true)
    rep.some_condition = true;
  else if (!unknown)
    rep.some_condition = false;
  return rep;
}

}  // namespace bondforge
