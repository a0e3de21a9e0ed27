#pragma once

#include "bondforge/curve.hpp"

#include <random>

namespace bondforge {

/// Bennett data: twists w1 (links 1, 3) and w2 (links 2, 4) and the normal distance d1 of links 1, 3.
struct BennettData {
  Rational w1, w2, d1;
};

/// Distance d2 with d1 (w1^2+1)/w1 = d2 (w2^2+1)/w2.
inline Rational bennett_partner_distance(const Rational& w1, const Rational& w2, const Rational& d1) {
  if (w1 == 0 || w2 == 0) throw InputError("w", "Bennett twists must be finite and nonzero");
  return d1 * (w1 * w1 + 1) / w1 * w2 / (w2 * w2 + 1);
}

inline Linkage make_bennett(const Rational& w1, const Rational& w2, const Rational& d1) {
  Rational d2 = bennett_partner_distance(w1, w2, d1);
  return linkage_from_dh({DHParams::make(0, w1, d1), DHParams::make(0, w2, d2), DHParams::make(0, w1, d1),
                          DHParams::make(0, w2, d2)});
}

inline Linkage make_bennett(const BennettData& b) { return make_bennett(b.w1, b.w2, b.d1); }

/// Exact configuration of a mobile single-loop linkage with t_k = x, from the rational parametrization
/// of its configuration curve. The fiber over t_k must be a single point.
inline std::vector<ProjectiveParam<Rational>> rational_configuration(const Linkage& l, int k, const Rational& x,
                                                                   std::uint64_t seed = 1) {
  auto cc = configuration_curve(l, seed);
  for (int c = 0; c < cc.size(); ++c) {
    const auto& rp = cc.parametrizations[c];
    if (!rp || rp->degrees[k] != 1) continue;
    // t_k = num(θ)/den(θ) is a Möbius map; solve num(θ) - x den(θ) = 0.
    GPoly lin = rp->num[k] - GaussRational(x) * rp->den[k];
    ProjectiveParam<GaussRational> theta =
        lin.coeff(1).is_zero() ? ProjectiveParam<GaussRational>::infinity()
                               : ProjectiveParam<GaussRational>::finite(-lin.coeff(0) / lin.coeff(1));
    auto pt = rp->point<GaussRational>(theta);
    std::vector<ProjectiveParam<Rational>> out;
    for (const auto& t : pt) {
      GaussRational u = t.u, v = t.v;
      if (!v.is_zero()) {
        u = u / v;
        v = GaussRational(1);
      } else {
        u = GaussRational(1);
      }
      if (u.im() != 0 || v.im() != 0) break;
      out.push_back({u.re(), v.re()});
    }
    if (static_cast<int>(out.size()) != l.size()) continue;
    return out;
  }
  throw AnalysisError("no rationally parametrized component is a graph over the requested joint");
}

/// Goldberg 5R from two Bennett linkages sharing the link (w1, d1) between their first two joints.
/// Both are placed at the configuration with first joint parameter `theta`; the shared link is removed
/// and the second joints, whose axes coincide, are fused. Joint order: fused, β', γ', γ, β.
inline Linkage make_goldberg(const BennettData& a, const BennettData& b, const Rational& theta = Rational(1, 2)) {
  if (a.w1 != b.w1 || a.d1 != b.d1) throw InputError("gluing", "the two Bennett linkages must share the link (w1, d1)");
  Linkage la = make_bennett(a), lb = make_bennett(b);
  auto ta = rational_configuration(la, 0, theta);
  auto tb = rational_configuration(lb, 0, theta);
  auto ha = global_axes<Rational>(la, ta);
  auto hb = global_axes<Rational>(lb, tb);
  if (!same_line(ha[0], hb[0]) || !same_line(ha[1], hb[1]))
    throw AnalysisError("glued Bennett linkages do not share their first two axes");
  std::vector<DQ<Rational>> axes{ha[1], hb[2], hb[3], ha[3], ha[2]};
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      if (same_line(axes[i], axes[j])) throw InputError("gluing", "the glued linkage has coinciding axes");
  return linkage_from_axes(axes);
}

/// 6R with h4 = h1, h5 = h2, h6 = h3.
inline Linkage make_duplicated_axes_6r(const DQ<Rational>& h1, const DQ<Rational>& h2, const DQ<Rational>& h3) {
  const DQ<Rational>* hs[3] = {&h1, &h2, &h3};
  for (int i = 0; i < 3; ++i) {
    if (!is_line(*hs[i])) throw InputError("axes[" + std::to_string(i) + "]", "axis must satisfy h^2 = -1");
    for (int j = i + 1; j < 3; ++j)
      if (same_line(*hs[i], *hs[j])) throw InputError("axes", "input axes must be pairwise distinct lines");
  }
  return linkage_from_axes({h1, h2, h3, h1, h2, h3});
}

/// Appends an extra revolute joint with axis h after the last joint of an axis-form loop whose
/// all-inf configuration is closed; the new joint is frozen at t = inf on the original motion.
inline Linkage extend_with_frozen_joint(const Linkage& l, const DQ<Rational>& h) {
  std::vector<DQ<Rational>> axes;
  for (const auto& j : l.joints) {
    if (!j.revolute() || j.transfer != DQ<Rational>::one())
      throw InputError("joints", "frozen extension needs an axis-form revolute loop");
    axes.push_back(j.axis);
  }
  if (!is_line(h)) throw InputError("axis", "axis must satisfy h^2 = -1");
  axes.push_back(h);
  return linkage_from_axes(axes);
}

/// Line with unit direction from the stereographic image of (a, b) through `point`.
inline DQ<Rational> rational_line(const Rational& a, const Rational& b, const Vec3<Rational>& point) {
  Rational n = 1 + a * a + b * b;
  Vec3<Rational> dir{(1 - a * a - b * b) / n, 2 * a / n, 2 * b / n};
  return line_axis(dir, point);
}

inline Rational random_rational(std::mt19937_64& rng, int num_range = 9, int den_max = 7) {
  std::uniform_int_distribution<int> num(-num_range, num_range), den(1, den_max);
  return Rational(num(rng), den(rng));
}

inline Rational random_nonzero_rational(std::mt19937_64& rng, int num_range = 9, int den_max = 7) {
  for (;;) {
    Rational r = random_rational(rng, num_range, den_max);
    if (r != 0) return r;
  }
}

inline DQ<Rational> random_line(std::mt19937_64& rng) {
  return rational_line(random_rational(rng), random_rational(rng),
                       {random_rational(rng), random_rational(rng), random_rational(rng)});
}

inline DQ<Rational> random_line_through_origin(std::mt19937_64& rng) {
  return rational_line(random_rational(rng), random_rational(rng), {0, 0, 0});
}

inline Linkage random_dh_linkage(int n, std::mt19937_64& rng) {
  std::vector<DHParams> p;
  for (int k = 0; k < n; ++k)
    p.push_back(DHParams::make(random_rational(rng), random_nonzero_rational(rng), random_rational(rng)));
  return linkage_from_dh(p);
}

inline Linkage random_spherical_4r(std::mt19937_64& rng) {
  std::vector<DQ<Rational>> axes;
  while (axes.size() < 4) {
    DQ<Rational> h = random_line_through_origin(rng);
    bool dup = false;
    for (const auto& g : axes) dup = dup || same_line(g, h);
    if (!dup) axes.push_back(h);
  }
  return linkage_from_axes(axes);
}

}  // namespace bondforge
