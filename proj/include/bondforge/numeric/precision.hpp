#pragma once

#include "bondforge/closure.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <optional>
#include <vector>

namespace bondforge::numeric {

using Float50 = boost::multiprecision::cpp_bin_float_50;
using Complex50 = boost::multiprecision::cpp_complex_50;

inline Complex50 to_mp(const Rational& r) {
  return Complex50(Float50(numerator(r)) / Float50(denominator(r)));
}
inline Complex50 to_mp(const Complex& z) { return Complex50(Float50(z.real()), Float50(z.imag())); }

inline DQ<Complex50> to_mp(const DQ<Rational>& h) {
  DQ<Complex50> r;
  for (int a = 0; a < 8; ++a) r[a] = to_mp(h[a]);
  return r;
}

namespace detail {

/// Solves A x = b by Gaussian elimination with partial pivoting (small dense systems).
template <class S, class Abs>
std::optional<std::vector<S>> solve_dense(std::vector<std::vector<S>> a, std::vector<S> b, Abs absval) {
  int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (absval(a[r][c]) > absval(a[piv][c])) piv = r;
    if (absval(a[piv][c]) == 0) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (int r = c + 1; r < n; ++r) {
      S f = a[r][c] / a[c][c];
      if (absval(f) == 0) continue;
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<S> x(n);
  for (int r = n - 1; r >= 0; --r) {
    S s = b[r];
    for (int k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace detail

/// A configuration held in per-variable affine charts: chart 0 means t = y, chart 1 means t = 1/y.
struct ChartedPoint {
  std::vector<int> chart;
  std::vector<Complex50> y;

  ProjectiveParam<Complex50> param(int k) const {
    return chart[k] == 0 ? ProjectiveParam<Complex50>{y[k], Complex50(1)} : ProjectiveParam<Complex50>{Complex50(1), y[k]};
  }
};

inline ChartedPoint charted(const std::vector<ProjectiveParam<Complex>>& t) {
  ChartedPoint p;
  for (const auto& v : t) {
    bool inv = std::abs(v.u) > std::abs(v.v);
    p.chart.push_back(inv ? 1 : 0);
    p.y.push_back(inv ? to_mp(v.v / v.u) : to_mp(v.u / v.v));
  }
  return p;
}

/// Gauss-Newton in 50-digit arithmetic on the closure coordinates of all loops of `sys`, with the
/// variables in `fixed` held constant. Returns the final correction size.
inline Float50 refine_mp(const PolySystem<Rational>& sys, ChartedPoint& p, const std::vector<bool>& fixed, int iters = 10) {
  if (sys.loops.empty()) throw std::invalid_argument("refine_mp needs factored loop products");
  int n = sys.num_vars();
  std::vector<int> unk(n, -1);
  int m = 0;
  for (int k = 0; k < n; ++k)
    if (!fixed[k]) unk[k] = m++;
  struct F {
    int var;
    DQ<Complex50> g, hg;
  };
  std::vector<std::vector<F>> loops;
  for (const auto& loop : sys.loops) {
    std::vector<F> f;
    for (const auto& lf : loop) f.push_back({lf.var, to_mp(lf.g), to_mp(lf.hg)});
    loops.push_back(std::move(f));
  }
  auto factor = [&](const F& f) -> DQ<Complex50> {
    if (f.var < 0) return f.g;
    auto t = p.param(f.var);
    return t.u * f.g - t.v * f.hg;
  };
  auto dfactor = [&](const F& f) -> DQ<Complex50> {
    // derivative of u g - v hg with respect to the chart coordinate
    return p.chart[f.var] == 0 ? f.g : Complex50(-1) * f.hg;
  };
  Float50 last = 0;
  for (int it = 0; it < iters; ++it) {
    std::vector<Complex50> r;
    std::vector<std::vector<Complex50>> j;
    for (const auto& loop : loops) {
      int len = static_cast<int>(loop.size());
      std::vector<DQ<Complex50>> pre(len + 1, DQ<Complex50>::one()), suf(len + 1, DQ<Complex50>::one());
      for (int k = 0; k < len; ++k) pre[k + 1] = pre[k] * factor(loop[k]);
      for (int k = len - 1; k >= 0; --k) suf[k] = factor(loop[k]) * suf[k + 1];
      // Normalize by the scalar coordinate so the equations are scale free.
      Complex50 s = pre[len][0];
      if (abs(s) == 0) s = Complex50(1);
      for (int c : kClosureCoords) {
        r.push_back(pre[len][c] / s);
        j.emplace_back(m, Complex50(0));
      }
      for (int k = 0; k < len; ++k) {
        if (loop[k].var < 0 || unk[loop[k].var] < 0) continue;
        DQ<Complex50> d = pre[k] * dfactor(loop[k]) * suf[k + 1];
        std::size_t base = j.size() - 6;
        for (int a = 0; a < 6; ++a) j[base + a][unk[loop[k].var]] += d[kClosureCoords[a]] / s;
      }
    }
    // Normal equations J^H J d = -J^H r.
    std::vector<std::vector<Complex50>> a(m, std::vector<Complex50>(m, Complex50(0)));
    std::vector<Complex50> b(m, Complex50(0));
    for (std::size_t row = 0; row < r.size(); ++row)
      for (int c1 = 0; c1 < m; ++c1) {
        Complex50 cj = conj(j[row][c1]);
        b[c1] -= cj * r[row];
        for (int c2 = 0; c2 < m; ++c2) a[c1][c2] += cj * j[row][c2];
      }
    auto d = detail::solve_dense(a, b, [](const Complex50& z) { return abs(z); });
    if (!d) return Float50(1);
    last = 0;
    for (int k = 0; k < n; ++k) {
      if (unk[k] < 0) continue;
      p.y[k] += (*d)[unk[k]];
      last = std::max(last, Float50(abs((*d)[unk[k]])));
    }
    if (last < Float50("1e-45")) break;
  }
  return last;
}

/// Nearest Gaussian rational with bounded denominators, if both parts are within `tol`.
inline std::optional<GaussRational> rationalize_mp(const Complex50& z, const Integer& max_den = Integer("100000000000000000000"),
                                                   const Float50& tol = Float50("1e-30")) {
  Float50 scale = std::max(Float50(1), Float50(abs(z)));
  auto re = rationalize<Float50>(z.real(), max_den, tol * scale);
  auto im = rationalize<Float50>(z.imag(), max_den, tol * scale);
  if (!re || !im) return std::nullopt;
  return GaussRational(*re, *im);
}

inline std::optional<ProjectiveParam<GaussRational>> rationalize_param(const ChartedPoint& p, int k) {
  auto y = rationalize_mp(p.y[k]);
  if (!y) return std::nullopt;
  if (p.chart[k] == 0) return ProjectiveParam<GaussRational>{*y, GaussRational(1)};
  return ProjectiveParam<GaussRational>{GaussRational(1), *y};
}

/// Loop products of a factored closure system at an exact point.
template <class S>
std::vector<DQ<S>> exact_products(const PolySystem<Rational>& sys, const std::vector<ProjectiveParam<S>>& t) {
  std::vector<DQ<S>> out;
  for (const auto& loop : sys.loops) {
    DQ<S> p = DQ<S>::one();
    for (const auto& lf : loop) {
      DQ<S> g = convert<S>(lf.g), hg = convert<S>(lf.hg);
      p = p * (lf.var < 0 ? g : t[lf.var].u * g - t[lf.var].v * hg);
    }
    out.push_back(p);
  }
  return out;
}

/// True if every loop product at t is a nonzero multiple of 1.
template <class S>
bool closes_exactly(const PolySystem<Rational>& sys, const std::vector<ProjectiveParam<S>>& t) {
  for (const auto& p : exact_products<S>(sys, t))
    if (p.is_zero_dq() || !proportional(p, DQ<S>::one())) return false;
  return true;
}

/// Refines a float configuration in 50 digits with `fixed` variables held, rationalizes it and
/// verifies closure exactly.
inline std::optional<std::vector<ProjectiveParam<GaussRational>>> exact_configuration(
    const PolySystem<Rational>& sys, const std::vector<ProjectiveParam<Complex>>& approx, const std::vector<bool>& fixed,
    const std::vector<ProjectiveParam<GaussRational>>& fixed_values = {}) {
  ChartedPoint p = charted(approx);
  for (int k = 0; k < sys.num_vars(); ++k) {
    if (!fixed[k]) continue;
    const auto& fv = fixed_values.at(k);
    bool inv = fv.v.is_zero() || (fv.u.abs2() > fv.v.abs2());
    p.chart[k] = inv ? 1 : 0;
    GaussRational y = inv ? fv.v / fv.u : fv.u / fv.v;
    p.y[k] = Complex50(to_mp(y.re()).real(), to_mp(y.im()).real());
  }
  if (refine_mp(sys, p, fixed) > Float50("1e-25")) return std::nullopt;
  std::vector<ProjectiveParam<GaussRational>> t;
  for (int k = 0; k < sys.num_vars(); ++k) {
    if (fixed[k]) {
      t.push_back(fixed_values[k]);
      continue;
    }
    auto v = rationalize_param(p, k);
    if (!v) return std::nullopt;
    t.push_back(*v);
  }
  if (!closes_exactly<GaussRational>(sys, t)) return std::nullopt;
  return t;
}

}  // namespace bondforge::numeric
