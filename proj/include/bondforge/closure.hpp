#pragma once

#include "bondforge/linkage.hpp"
#include "bondforge/polynomial.hpp"

#include <string>
#include <vector>

namespace bondforge {

/// Coordinates of the loop product that must vanish (all but the scalar and ε-scalar parts).
inline constexpr int kClosureCoords[6] = {1, 2, 3, 5, 6, 7};

/// One factor u g - v hg of a loop product in the homogeneous parameter (u : v) of `var`;
/// var < 0 marks the constant factor g.
struct LoopFactor {
  int var = 0;
  DQ<Rational> g, hg;
};

template <class S>
struct PolySystem {
  std::vector<std::string> variables;
  std::vector<JointKind> kinds;
  std::vector<Polynomial<S>> equations;
  /// Null-cone factor per variable: t^2 + 1 for revolute, t for prismatic joints.
  std::vector<Polynomial<S>> excluded;
  /// Full loop products, one per loop, used for residuals and the scalar-part check.
  std::vector<DQ<Polynomial<S>>> products;
  /// Factored loop products when the equations are exactly their closure coordinates, loop by loop.
  /// Anyone who changes `equations` must clear this.
  std::vector<std::vector<LoopFactor>> loops;

  int num_vars() const { return static_cast<int>(variables.size()); }

  /// Per-variable degree bound over all equations.
  std::vector<int> degrees() const {
    std::vector<int> d(num_vars(), 0);
    for (const auto& e : equations)
      for (int k = 0; k < num_vars(); ++k) d[k] = std::max(d[k], e.degree_in(k));
    return d;
  }
};

/// Motion of joint k as a dual quaternion with polynomial coordinates in variable k.
inline DQ<Polynomial<Rational>> symbolic_motion(const Joint& j, int var) {
  using P = Polynomial<Rational>;
  DQ<Rational> g = j.transfer;
  DQ<Rational> hg = j.axis * g;
  DQ<P> m;
  P t = P::variable(var);
  for (int a = 0; a < 8; ++a) m[a] = g[a] * t - P::constant(hg[a]);
  return m;
}

inline PolySystem<Rational> closure_system(const Linkage& l, const std::vector<std::size_t>& loops) {
  using P = Polynomial<Rational>;
  PolySystem<Rational> sys;
  for (int k = 0; k < l.size(); ++k) {
    sys.variables.push_back("t" + std::to_string(k + 1));
    sys.kinds.push_back(l.joints[k].kind);
    P t = P::variable(k);
    sys.excluded.push_back(l.joints[k].revolute() ? t * t + P(1) : t);
  }
  for (std::size_t li : loops) {
    DQ<P> prod = DQ<P>::one();
    std::vector<LoopFactor> factors;
    for (int ref : l.loops.at(li)) {
      int k = std::abs(ref) - 1;
      DQ<P> m = symbolic_motion(l.joints[k], k);
      prod = prod * (ref > 0 ? m : m.conj());
      DQ<Rational> g = l.joints[k].transfer, hg = l.joints[k].axis * g;
      factors.push_back(ref > 0 ? LoopFactor{k, g, hg} : LoopFactor{k, g.conj(), hg.conj()});
    }
    sys.loops.push_back(std::move(factors));
    for (int c : kClosureCoords) sys.equations.push_back(prod[c]);
    sys.products.push_back(prod);
  }
  return sys;
}

/// Closure system of one loop: six polynomial equations in the joint parameters.
inline PolySystem<Rational> expand_loop(const Linkage& l, std::size_t loop = 0) {
  return closure_system(l, {loop});
}

/// Closure system of all loops of the linkage.
inline PolySystem<Rational> closure_system(const Linkage& l) {
  std::vector<std::size_t> all(l.loops.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  return closure_system(l, all);
}

/// The closure system with variable k fixed to t; the variable is removed and later ones move down.
inline PolySystem<Rational> fix_variable(const PolySystem<Rational>& sys, int k, const ProjectiveParam<Rational>& t) {
  PolySystem<Rational> r;
  for (int j = 0; j < sys.num_vars(); ++j) {
    if (j == k) continue;
    r.variables.push_back(sys.variables[j]);
    r.kinds.push_back(sys.kinds[j]);
    r.excluded.push_back(sys.excluded[j].substitute(k, t.u, t.v));
  }
  if (sys.products.empty()) {
    for (const auto& e : sys.equations) {
      auto f = e.substitute(k, t.u, t.v);
      if (!f.is_zero()) r.equations.push_back(f);
    }
    return r;
  }
  for (const auto& prod : sys.products) {
    int d = 0;
    for (int c = 0; c < 8; ++c) d = std::max(d, prod[c].degree_in(k));
    DQ<Polynomial<Rational>> p;
    for (int c = 0; c < 8; ++c) {
      // Homogenize every coordinate with the common degree of the product.
      auto q = prod[c];
      if (q.degree_in(k) < d) {
        Rational scale = 1;
        for (int e = q.degree_in(k); e < d; ++e) scale *= t.v;
        q = q.substitute(k, t.u, t.v);
        p[c] = scale * q;
      } else {
        p[c] = q.substitute(k, t.u, t.v);
      }
    }
    r.products.push_back(p);
    for (int c : kClosureCoords) r.equations.push_back(p[c]);
  }
  for (const auto& loop : sys.loops) {
    std::vector<LoopFactor> f;
    for (const auto& lf : loop) {
      if (lf.var == k) {
        f.push_back({-1, t.u * lf.g - t.v * lf.hg, DQ<Rational>()});
      } else {
        f.push_back({lf.var > k ? lf.var - 1 : lf.var, lf.g, lf.hg});
      }
    }
    r.loops.push_back(std::move(f));
  }
  return r;
}

/// max over the closure coordinates of |P_c| divided by max |P_c|.
inline double relative_residual(const DQ<Complex>& p) {
  double num = 0, den = 0;
  for (int c = 0; c < 8; ++c) den = std::max(den, std::abs(p[c]));
  for (int c : kClosureCoords) num = std::max(num, std::abs(p[c]));
  return den > 0 ? num / den : 1.0;
}

/// A configuration: one point of P^1 per joint parameter.
struct SolutionPoint {
  std::vector<ProjectiveParam<Complex>> values;
  double residual = 0;

  bool at_infinity(int k, double tol = 1e-8) const { return values[k].is_infinite(tol); }
  Complex value(int k) const { return values[k].value(); }
};

inline SolutionPoint make_point(const std::vector<Complex>& t) {
  SolutionPoint p;
  for (const auto& v : t) p.values.push_back(ProjectiveParam<Complex>::finite(v));
  return p;
}

/// Relative closure residual of a configuration over all loops.
inline double closure_residual(const Linkage& l, const std::vector<ProjectiveParam<Complex>>& t) {
  double r = 0;
  for (const auto& loop : l.loops) r = std::max(r, relative_residual(loop_product<Complex>(l, loop, t)));
  return r;
}

}  // namespace bondforge
