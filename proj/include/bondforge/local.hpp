#pragma once

#include "bondforge/curve.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace bondforge {

/// A place of the configuration curve: t_k = u_k(τ) : v_k(τ) near τ = 0.
/// Exact places carry complete polynomials over Q(i); numeric places carry truncated series in the
/// normalized parameter σ = τ / radius.
struct LocalParametrization {
  bool exact = false;
  std::vector<GPoly> exact_u, exact_v;
  std::vector<std::vector<Complex>> u, v;
  /// Ramification index of the joint coordinate used for the circle endgame (numeric places).
  int cycle = 1;
  double radius = 1.0;
  /// Largest deviation of the truncated series from the circle samples (numeric places).
  double fit_residual = 0;
  /// Largest closure residual of the circle samples (numeric places).
  double sample_residual = 0;

  int size() const { return static_cast<int>(exact ? exact_u.size() : u.size()); }

  ProjectiveParam<Complex> center(int k) const {
    if (exact) return {to_complex(exact_u[k].coeff(0)), to_complex(exact_v[k].coeff(0))};
    return {u[k][0], v[k][0]};
  }
  std::vector<ProjectiveParam<Complex>> center() const {
    std::vector<ProjectiveParam<Complex>> out;
    for (int k = 0; k < size(); ++k) out.push_back(center(k));
    return out;
  }
  std::optional<std::vector<ProjectiveParam<GaussRational>>> exact_center() const {
    if (!exact) return std::nullopt;
    std::vector<ProjectiveParam<GaussRational>> out;
    for (int k = 0; k < size(); ++k) out.push_back({exact_u[k].coeff(0), exact_v[k].coeff(0)});
    return out;
  }
};

/// Exact place of a rationally parametrized component at θ = theta (finite: θ = theta + τ; infinite: θ = 1/τ).
inline LocalParametrization place_at(const RationalParametrization& rp, const ProjectiveParam<GaussRational>& theta) {
  LocalParametrization lp;
  lp.exact = true;
  bool inf = theta.v.is_zero();
  GaussRational t0 = inf ? GaussRational(0) : theta.u / theta.v;
  auto local = [&](const GPoly& p, int d) {
    if (!inf) return p.taylor_shift(t0);
    std::vector<GaussRational> c(d + 1, GaussRational(0));
    for (int i = 0; i <= d; ++i) c[d - i] = p.coeff(i);
    return GPoly(c);
  };
  for (int k = 0; k < rp.size(); ++k) {
    lp.exact_u.push_back(local(rp.num[k], rp.degrees[k]));
    lp.exact_v.push_back(local(rp.den[k], rp.degrees[k]));
  }
  return lp;
}

/// Numeric place of a rationally parametrized component at a complex parameter value.
inline LocalParametrization place_at(const RationalParametrization& rp, const ProjectiveParam<Complex>& theta, int order = 16) {
  LocalParametrization lp;
  bool inf = std::abs(theta.v) <= 1e-14 * std::abs(theta.u);
  Complex t0 = inf ? Complex(0) : theta.u / theta.v;
  auto local = [&](const GPoly& p, int d) {
    UPoly<Complex> c = to_complex_poly(p);
    std::vector<Complex> out(order, Complex(0));
    if (!inf) {
      UPoly<Complex> s = c.taylor_shift(t0);
      for (int i = 0; i <= s.degree() && i < order; ++i) out[i] = s.coeff(i);
    } else {
      for (int i = 0; i <= d; ++i)
        if (d - i < order) out[d - i] = c.coeff(i);
    }
    return out;
  };
  for (int k = 0; k < rp.size(); ++k) {
    lp.u.push_back(local(rp.num[k], rp.degrees[k]));
    lp.v.push_back(local(rp.den[k], rp.degrees[k]));
  }
  return lp;
}

namespace series {

/// Product of truncated series (length `order`), or exact product when order < 0.
template <class S>
std::vector<S> mul(const std::vector<S>& a, const std::vector<S>& b, int order) {
  if (a.empty() || b.empty()) return {};
  std::size_t len = a.size() + b.size() - 1;
  if (order >= 0) len = std::min<std::size_t>(len, order);
  std::vector<S> c(len, S(0));
  for (std::size_t i = 0; i < a.size() && i < len; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) c[i + j] = c[i + j] + a[i] * b[j];
  return c;
}

template <class S>
std::vector<S> add(const std::vector<S>& a, const std::vector<S>& b) {
  std::vector<S> c(std::max(a.size(), b.size()), S(0));
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = c[i] + a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] = c[i] + b[i];
  return c;
}

template <class S>
std::vector<S> scale(const S& s, const std::vector<S>& a) {
  std::vector<S> c = a;
  for (auto& x : c) x = s * x;
  return c;
}

/// Index of the first nonzero coefficient: exact for exact scalars, else the first coefficient above
/// `rel` times the largest one. Returns -1 for a zero series.
template <class S>
int order(const std::vector<S>& a, double ref = 0, double rel = 1e-7) {
  if constexpr (is_exact_v<S>) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!is_zero(a[i], 0.0)) return static_cast<int>(i);
    return -1;
  } else {
    double m = ref;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    if (m == 0) return -1;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i]) > rel * m) return static_cast<int>(i);
    return -1;
  }
}

}  // namespace series

/// Series of a chain product f = m_{j1} ... m_{jr} and of its norm along a place.
template <class S>
struct ChainSeries {
  std::array<std::vector<S>, 8> f;
  /// Primal norm of f (not normalized).
  std::vector<S> norm;
  int order_f = 0;
  int order_norm = 0;
  /// Twice the local distance: order of N(f / τ^order_f).
  int twice_distance = 0;
};

namespace detail {

template <class S>
ChainSeries<S> chain_series(const Linkage& l, const std::vector<int>& chain, const std::vector<std::vector<S>>& u,
                            const std::vector<std::vector<S>>& v, int order) {
  ChainSeries<S> cs;
  for (int c = 0; c < 8; ++c) cs.f[c] = {c == 0 ? S(1) : S(0)};
  for (int k : chain) {
    const Joint& j = l.joints[k];
    DQ<Rational> g = j.transfer, hg = j.axis * j.transfer;
    std::array<std::vector<S>, 8> m;
    for (int c = 0; c < 8; ++c)
      m[c] = series::add(series::scale(from_rational<S>(g[c]), u[k]), series::scale(-from_rational<S>(hg[c]), v[k]));
    // Dual quaternion product with series coordinates.
    std::array<std::vector<S>, 8> r;
    for (auto& x : r) x = {};
    static const int table[4][4][2] = {{{0, 1}, {1, 1}, {2, 1}, {3, 1}},
                                       {{1, 1}, {0, -1}, {3, 1}, {2, -1}},
                                       {{2, 1}, {3, -1}, {0, -1}, {1, 1}},
                                       {{3, 1}, {2, 1}, {1, -1}, {0, -1}}};
    auto qmul = [&](int ao, int bo, int ro) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          int idx = table[a][b][0] + ro;
          auto prod = series::mul(cs.f[a + ao], m[b + bo], order);
          if (table[a][b][1] < 0) prod = series::scale(S(-1), prod);
          r[idx] = series::add(r[idx], prod);
        }
    };
    qmul(0, 0, 0);
    qmul(0, 4, 4);
    qmul(4, 0, 4);
    cs.f = r;
  }
  double ref = 0;
  if constexpr (!is_exact_v<S>) {
    for (const auto& x : cs.f)
      for (const auto& y : x) ref = std::max(ref, std::abs(y));
  }
  int of = -1;
  for (const auto& x : cs.f) {
    int o = series::order(x, ref);
    if (o >= 0 && (of < 0 || o < of)) of = o;
  }
  cs.order_f = of;
  cs.norm = {};
  for (int a = 0; a < 4; ++a) cs.norm = series::add(cs.norm, series::mul(cs.f[a], cs.f[a], order));
  std::array<std::vector<S>, 4> p;
  for (int a = 0; a < 4; ++a) {
    p[a] = cs.f[a];
    if (of > 0) p[a].erase(p[a].begin(), p[a].begin() + std::min<std::size_t>(of, p[a].size()));
  }
  std::vector<S> nn;
  int tail = order < 0 ? -1 : std::max(0, order - of);
  for (int a = 0; a < 4; ++a) nn = series::add(nn, series::mul(p[a], p[a], tail));
  double nref = 0;
  if constexpr (!is_exact_v<S>) {
    for (const auto& y : nn) nref = std::max(nref, std::abs(y));
    // Relative to the size of the normalized factors, not just of the norm itself.
    double pr = 0;
    for (int a = 0; a < 4; ++a)
      for (const auto& y : p[a]) pr = std::max(pr, std::abs(y));
    nref = std::max(nref, pr * pr);
  }
  cs.order_norm = series::order(cs.norm, ref * ref);
  cs.twice_distance = series::order(nn, nref);
  return cs;
}

}  // namespace detail

/// Chain product and norm series along a place (exact for exact places).
inline ChainSeries<GaussRational> exact_chain_series(const Linkage& l, const LocalParametrization& lp,
                                                     const std::vector<int>& chain) {
  std::vector<std::vector<GaussRational>> u, v;
  for (int k = 0; k < lp.size(); ++k) {
    u.push_back(lp.exact_u[k].coeffs());
    v.push_back(lp.exact_v[k].coeffs());
    if (u.back().empty()) u.back() = {GaussRational(0)};
    if (v.back().empty()) v.back() = {GaussRational(0)};
  }
  return detail::chain_series<GaussRational>(l, chain, u, v, -1);
}

inline ChainSeries<Complex> numeric_chain_series(const Linkage& l, const LocalParametrization& lp,
                                                 const std::vector<int>& chain) {
  if (lp.exact) {
    std::vector<std::vector<Complex>> u, v;
    for (int k = 0; k < lp.size(); ++k) {
      std::vector<Complex> a, b;
      for (const auto& c : lp.exact_u[k].coeffs()) a.push_back(to_complex(c));
      for (const auto& c : lp.exact_v[k].coeffs()) b.push_back(to_complex(c));
      if (a.empty()) a = {0.0};
      if (b.empty()) b = {0.0};
      u.push_back(a);
      v.push_back(b);
    }
    return detail::chain_series<Complex>(l, chain, u, v, -1);
  }
  return detail::chain_series<Complex>(l, chain, lp.u, lp.v, static_cast<int>(lp.u[0].size()));
}

/// Twice the local distance d(i, j) between links i and j at a place.
inline int twice_local_distance(const Linkage& l, const LocalParametrization& lp, int i, int j) {
  if (i == j) return 0;
  auto chain = l.chain_between_links(i, j);
  if (lp.exact) return exact_chain_series(l, lp, chain).twice_distance;
  return numeric_chain_series(l, lp, chain).twice_distance;
}

struct EndgameOptions {
  double radius = 0.02;
  int samples = 64;
  int max_cycle = 8;
  int order = 16;
};

/// Numeric places of a component over t_k = target, by moving the fiber to the circle
/// |t_k - target| = radius, following it around and taking discrete Cauchy integrals per cycle.
/// `lost` counts fiber points that could not be followed.
inline std::vector<LocalParametrization> circle_places(const numeric::CurveContext& ctx,
                                                       const numeric::CurveDecomposition& dec,
                                                       const numeric::CurveComponent& comp, int k, Complex target,
                                                       std::mt19937_64& rng, int& lost, const EndgameOptions& opt = {}) {
  using namespace numeric;
  int n = ctx.n();
  std::vector<LocalParametrization> out;
  lost = 0;
  if (comp.degrees[k] == 0) return out;
  Complex start = target + opt.radius;
  auto moved = move_fiber(ctx, k, ProjectiveParam<Complex>::finite(dec.fiber_values[k]),
                          ProjectiveParam<Complex>::finite(start), comp.fibers[k], rng);
  std::vector<VecC> q;
  for (const auto& m : moved) {
    if (m)
      q.push_back(*m);
    else
      ++lost;
  }
  int d = static_cast<int>(q.size());
  TrackOptions topt = ctx.track;
  topt.stop = nullptr;
  int M = opt.samples;
  std::vector<std::vector<VecC>> rev(d);
  std::vector<int> perm(d, -1);
  std::vector<double> res(d, 0);
  parallel_for(d, thread_count(ctx.threads), [&](int j) {
    VecC x = q[j];
    rev[j].push_back(x);
    for (int s = 0; s < M; ++s) {
      double p0 = 2 * M_PI * s / M, p1 = 2 * M_PI * (s + 1) / M;
      auto pin = std::make_shared<PinRow>(n, k, ComplexPath::arc(target, opt.radius, p0, p1));
      PathResult pr = numeric::track(ctx.homotopy(pin), x, 0.0, 1.0, topt);
      if (pr.status != PathStatus::Success || !pr.x.allFinite()) return;
      x = pr.x;
      res[j] = std::max(res[j], ctx.sys->residual(x));
      if (s + 1 < M) rev[j].push_back(x);
    }
    perm[j] = find_point(q, x);
  });
  std::vector<bool> seen(d, false);
  for (int j0 = 0; j0 < d; ++j0) {
    if (seen[j0]) continue;
    std::vector<int> cyc;
    int j = j0;
    bool ok = true;
    while (!seen[j]) {
      seen[j] = true;
      cyc.push_back(j);
      if (perm[j] < 0 || static_cast<int>(rev[j].size()) != M) {
        ok = false;
        break;
      }
      j = perm[j];
    }
    if (!ok || j != j0 || static_cast<int>(cyc.size()) > opt.max_cycle) {
      lost += static_cast<int>(cyc.size());
      continue;
    }
    int m = static_cast<int>(cyc.size());
    int L = m * M;
    std::vector<VecC> xs;
    double sres = 0;
    for (int c : cyc) {
      for (const auto& x : rev[c]) xs.push_back(x);
      sres = std::max(sres, res[c]);
    }
    int N = std::min(opt.order, L / 2);
    std::vector<VecC> coef(N, VecC::Zero(2 * n));
    for (int s = 0; s < L; ++s)
      for (int i = 0; i < N; ++i) coef[i] += xs[s] * std::polar(1.0 / L, -2 * M_PI * double(s) * i / L);
    double fit = 0, scale = 0;
    for (int s = 0; s < L; ++s) {
      VecC y = VecC::Zero(2 * n);
      for (int i = 0; i < N; ++i) y += coef[i] * std::polar(1.0, 2 * M_PI * double(s) * i / L);
      fit = std::max(fit, (y - xs[s]).norm());
      scale = std::max(scale, xs[s].norm());
    }
    LocalParametrization lp;
    lp.cycle = m;
    lp.radius = std::pow(opt.radius, 1.0 / m);
    lp.fit_residual = fit / scale;
    lp.sample_residual = sres;
    lp.u.assign(n, std::vector<Complex>(N));
    lp.v.assign(n, std::vector<Complex>(N));
    for (int i = 0; i < N; ++i)
      for (int j2 = 0; j2 < n; ++j2) {
        lp.u[j2][i] = coef[i](2 * j2);
        lp.v[j2][i] = coef[i](2 * j2 + 1);
      }
    out.push_back(std::move(lp));
  }
  return out;
}

/// Chordal distance between the centers of two places (largest over coordinates).
inline double center_distance(const LocalParametrization& a, const LocalParametrization& b) {
  double d = 0;
  for (int k = 0; k < a.size(); ++k) d = std::max(d, chordal_distance(a.center(k), b.center(k)));
  return d;
}

/// True if two numeric places have the same center and tangent direction.
inline bool same_place(const LocalParametrization& a, const LocalParametrization& b, double tol = 1e-5) {
  if (center_distance(a, b) > tol) return false;
  auto lead = [](const LocalParametrization& p) {
    int n = p.size();
    int N = static_cast<int>(p.exact ? 0 : p.u[0].size());
    Eigen::VectorXcd c0(2 * n);
    for (int k = 0; k < n; ++k) {
      c0(2 * k) = p.center(k).u;
      c0(2 * k + 1) = p.center(k).v;
    }
    double m = 0;
    std::vector<Eigen::VectorXcd> cs;
    for (int i = 1; i < N; ++i) {
      Eigen::VectorXcd c(2 * n);
      for (int k = 0; k < n; ++k) {
        c(2 * k) = p.u[k][i];
        c(2 * k + 1) = p.v[k][i];
      }
      // Remove the component along the center (chart rescaling).
      c -= c0 * (c0.dot(c) / c0.squaredNorm());
      m = std::max(m, c.norm());
      cs.push_back(c);
    }
    for (const auto& c : cs)
      if (c.norm() > 1e-6 * m) return Eigen::VectorXcd(c / c.norm());
    return Eigen::VectorXcd(Eigen::VectorXcd::Zero(2 * n));
  };
  if (a.exact || b.exact) return true;
  auto la = lead(a), lb = lead(b);
  return std::abs(la.dot(lb)) > 1 - 1e-4;
}

}  // namespace bondforge
