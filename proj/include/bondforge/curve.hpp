#pragma once

#include "bondforge/numeric/precision.hpp"
#include "bondforge/numeric/witness.hpp"

#include <optional>
#include <random>
#include <vector>

namespace bondforge {

using GPoly = UPoly<GaussRational>;

/// Value of a polynomial of formal degree d, homogenized, at (x : y).
template <class T, class S, class Conv>
T eval_homogeneous(const UPoly<S>& p, int d, const T& x, const T& y, Conv conv) {
  T r(0);
  std::vector<T> yp(d + 1, T(1));
  for (int i = 1; i <= d; ++i) yp[i] = yp[i - 1] * y;
  T xp(1);
  for (int i = 0; i <= d; ++i) {
    r = r + conv(p.coeff(i)) * xp * yp[d - i];
    xp = xp * x;
  }
  return r;
}

inline GaussRational eval_homogeneous(const GPoly& p, int d, const GaussRational& x, const GaussRational& y) {
  return eval_homogeneous<GaussRational>(p, d, x, y, [](const GaussRational& c) { return c; });
}
inline Complex eval_homogeneous(const GPoly& p, int d, const Complex& x, const Complex& y) {
  return eval_homogeneous<Complex>(p, d, x, y, [](const GaussRational& c) { return to_complex(c); });
}

/// A rational curve component: t_k = num_k(θ) : den_k(θ), both homogeneous of degree degrees[k],
/// with θ the parameter of joint `parameter`.
struct RationalParametrization {
  int parameter = 0;
  std::vector<int> degrees;
  std::vector<GPoly> num, den;

  int size() const { return static_cast<int>(degrees.size()); }

  ProjectiveParam<GaussRational> at(int k, const ProjectiveParam<GaussRational>& theta) const {
    return {eval_homogeneous(num[k], degrees[k], theta.u, theta.v), eval_homogeneous(den[k], degrees[k], theta.u, theta.v)};
  }
  ProjectiveParam<Complex> at(int k, const ProjectiveParam<Complex>& theta) const {
    return {eval_homogeneous(num[k], degrees[k], theta.u, theta.v), eval_homogeneous(den[k], degrees[k], theta.u, theta.v)};
  }
  template <class S>
  std::vector<ProjectiveParam<S>> point(const ProjectiveParam<S>& theta) const {
    std::vector<ProjectiveParam<S>> out;
    for (int k = 0; k < size(); ++k) out.push_back(at(k, theta));
    return out;
  }

  /// Loop products after substituting the parametrization (polynomials in θ).
  std::vector<DQ<GPoly>> products(const PolySystem<Rational>& sys) const {
    std::vector<DQ<GPoly>> out;
    for (const auto& loop : sys.loops) {
      DQ<GPoly> p = DQ<GPoly>::one();
      for (const auto& lf : loop) {
        DQ<GPoly> f;
        for (int c = 0; c < 8; ++c) {
          if (lf.var < 0) {
            f[c] = GPoly::constant(GaussRational(lf.g[c]));
          } else {
            f[c] = GaussRational(lf.g[c]) * num[lf.var] - GaussRational(lf.hg[c]) * den[lf.var];
          }
        }
        p = p * f;
      }
      out.push_back(p);
    }
    return out;
  }

  /// Exact check that every loop product is a nonzero multiple of 1 identically in θ.
  bool verify(const PolySystem<Rational>& sys) const {
    for (const auto& p : products(sys)) {
      if (p[0].is_zero()) return false;
      for (int c = 1; c < 8; ++c)
        if (!p[c].is_zero()) return false;
    }
    return true;
  }

  /// Parameter value of a point of the component (from the parameter joint).
  ProjectiveParam<Complex> parameter_of(const std::vector<ProjectiveParam<Complex>>& t) const { return t[parameter]; }
};

namespace detail {

/// Simple rationals 0, 1, -1, 2, -2, 1/2, -1/2, 3, ... used as sample parameters.
inline std::vector<Rational> sample_rationals(int count) {
  std::vector<Rational> out{Rational(0)};
  for (int h = 1; static_cast<int>(out.size()) < count; ++h)
    for (int q = 1; q <= h && static_cast<int>(out.size()) < count + 2; ++q) {
      int p = h - q + 1;
      if (boost::integer::gcd(p, q) != 1) continue;
      out.push_back(Rational(p, q));
      out.push_back(Rational(-p, q));
    }
  out.resize(count);
  return out;
}

}  // namespace detail

/// Exact configurations of a component at rational values of joint `param`, obtained by moving the
/// component's fiber, refining in 50 digits and rationalizing. Failed samples are skipped.
inline std::vector<std::pair<Rational, std::vector<ProjectiveParam<GaussRational>>>> exact_samples(
    const PolySystem<Rational>& sys, const numeric::CurveContext& ctx, const numeric::CurveDecomposition& dec,
    const numeric::CurveComponent& comp, int param, int count, std::mt19937_64& rng) {
  std::vector<std::pair<Rational, std::vector<ProjectiveParam<GaussRational>>>> out;
  if (comp.fibers[param].size() != 1) return out;
  auto from = ProjectiveParam<Complex>::finite(dec.fiber_values[param]);
  std::vector<bool> fixed(ctx.n(), false);
  fixed[param] = true;
  for (const Rational& th : detail::sample_rationals(count + 4)) {
    if (static_cast<int>(out.size()) >= count) break;
    auto to = ProjectiveParam<Complex>::finite(to_complex(th));
    auto moved = numeric::move_fiber(ctx, param, from, to, comp.fibers[param], rng);
    if (!moved[0]) continue;
    std::vector<ProjectiveParam<GaussRational>> fv(ctx.n());
    fv[param] = {GaussRational(th), GaussRational(1)};
    auto e = numeric::exact_configuration(sys, numeric::params_of(*moved[0]), fixed, fv);
    if (e) out.emplace_back(th, std::move(*e));
  }
  return out;
}

/// Exact rational parametrization of a component whose projection to joint `param` has degree 1,
/// reconstructed by interpolation from exact samples and verified by substitution.
inline std::optional<RationalParametrization> reconstruct_parametrization(const PolySystem<Rational>& sys,
                                                                          const numeric::CurveContext& ctx,
                                                                          const numeric::CurveDecomposition& dec,
                                                                          const numeric::CurveComponent& comp, int param,
                                                                          std::mt19937_64& rng) {
  int n = ctx.n();
  if (comp.degrees[param] != 1) return std::nullopt;
  int maxdeg = *std::max_element(comp.degrees.begin(), comp.degrees.end());
  auto samples = exact_samples(sys, ctx, dec, comp, param, 2 * maxdeg + 3, rng);
  if (static_cast<int>(samples.size()) < 2 * maxdeg + 3) return std::nullopt;
  RationalParametrization rp;
  rp.parameter = param;
  rp.degrees = comp.degrees;
  rp.num.resize(n);
  rp.den.resize(n);
  for (int k = 0; k < n; ++k) {
    int d = comp.degrees[k];
    // a(θ) v - b(θ) u = 0 at every sample, unknowns (a_0..a_d, b_0..b_d).
    std::vector<std::vector<GaussRational>> rows;
    for (const auto& [th, t] : samples) {
      std::vector<GaussRational> row(2 * (d + 1));
      GaussRational p(1);
      for (int i = 0; i <= d; ++i) {
        row[i] = p * t[k].v;
        row[d + 1 + i] = -(p * t[k].u);
        p = p * GaussRational(th);
      }
      rows.push_back(std::move(row));
    }
    auto ns = exact_nullspace(rows, 2 * (d + 1));
    if (ns.size() != 1) return std::nullopt;
    auto& v = ns[0];
    GaussRational lead(0);
    for (const auto& c : v)
      if (!c.is_zero()) {
        lead = c;
        break;
      }
    for (auto& c : v) c = c / lead;
    rp.num[k] = GPoly(std::vector<GaussRational>(v.begin(), v.begin() + d + 1));
    rp.den[k] = GPoly(std::vector<GaussRational>(v.begin() + d + 1, v.end()));
  }
  if (!rp.verify(sys)) return std::nullopt;
  return rp;
}

/// Points sampled along one branch of a solution curve.
struct CurveBranch {
  std::vector<SolutionPoint> samples;
  /// Indices of samples reached through a complex detour of the pinned parameter.
  std::vector<int> detours;
  /// True if the step size underflowed before all samples were taken.
  bool underflow = false;
  std::optional<RationalParametrization> parametrization;
};

struct TraceOptions {
  int samples = 50;
  double step = 0.1;
  double min_step = 1e-8;
  std::uint64_t seed = 1;
};

namespace detail {

/// Affine chart coordinate of t_k: t if |t| <= 1, else 1/t; `inverse` reports which.
inline Complex chart_coordinate(const numeric::VecC& x, int k, bool& inverse) {
  Complex u = x(2 * k), v = x(2 * k + 1);
  inverse = std::abs(u) > std::abs(v);
  return inverse ? v / u : u / v;
}

/// Unit tangent of the curve at x (kernel of the Jacobian of the equations and charts through x),
/// with the second smallest singular value relative to the largest.
inline numeric::VecC curve_tangent(const numeric::CurveContext& ctx, const numeric::VecC& x, double& gap) {
  numeric::Homotopy h;
  h.nvars = ctx.n();
  h.add(ctx.sys->equations_block());
  h.add(numeric::Charts::through(x).rows());
  numeric::VecC val;
  numeric::MatC j;
  h.evaluate(x, 1.0, val, &j, nullptr);
  for (int r = 0; r < j.rows(); ++r) {
    double nr = j.row(r).norm();
    if (nr > 0) j.row(r) /= nr;
  }
  Eigen::JacobiSVD<numeric::MatC> svd(j, Eigen::ComputeFullV);
  auto sv = svd.singularValues();
  int cols = static_cast<int>(j.cols());
  gap = sv.size() >= cols - 1 ? sv(cols - 2) / sv(0) : 0.0;
  return svd.matrixV().col(cols - 1);
}

}  // namespace detail

/// Traces the branch of a one-dimensional solution set through `start`, pinning at every step the
/// joint parameter that moves fastest and advancing it by a fixed step in its affine chart.
inline CurveBranch trace_curve(const PolySystem<Rational>& sys, const SolutionPoint& start, const TraceOptions& opt = {}) {
  using namespace numeric;
  auto ns = std::make_shared<NumericSystem>(NumericSystem::from(sys));
  std::mt19937_64 rng(opt.seed);
  CurveContext ctx = CurveContext::make(ns, rng);
  int n = ctx.n();
  VecC x = to_homogeneous(start.values);
  ctx.charts.apply(x);
  if (ns->residual(x) > 1e-8) throw InputError("start", "start point does not satisfy the closure equations");
  double gap = 0;
  VecC tan = bondforge::detail::curve_tangent(ctx, x, gap);
  if (gap < 1e-7) throw AnalysisError("Jacobian corank at the start point is not 1");

  CurveBranch br;
  br.samples.push_back(SolutionPoint{params_of(x), ns->residual(x)});
  // Direction of motion in each chart coordinate, from the tangent for the first step.
  std::vector<Complex> dz(n);
  for (int k = 0; k < n; ++k) {
    bool inv;
    bondforge::detail::chart_coordinate(x, k, inv);
    Complex u = x(2 * k), v = x(2 * k + 1), du = tan(2 * k), dv = tan(2 * k + 1);
    dz[k] = inv ? (dv * u - v * du) / (u * u) : (du * v - u * dv) / (v * v);
  }
  double h = opt.step;
  while (static_cast<int>(br.samples.size()) < opt.samples) {
    int k = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(dz[j]) > std::abs(dz[k])) k = j;
    bool inv;
    Complex z0 = bondforge::detail::chart_coordinate(x, k, inv);
    Complex dir = dz[k] / std::abs(dz[k]);
    if (std::abs(z0.imag()) < 1e-12 && std::abs(dir.imag()) > 0) dir = dir.real() >= 0 ? 1.0 : -1.0;
    Complex z1 = z0 + h * dir;
    auto proj = [&](Complex z) { return inv ? ProjectiveParam<Complex>{1.0, z} : ProjectiveParam<Complex>{z, 1.0}; };
    auto end = ProjectivePinRow::between(n, k, proj(z1), proj(z1), 1.0);
    bool ok = false, detour = false;
    VecC y;
    for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
      Complex gamma = attempt == 0 ? Complex(1.0) : random_unit_complex(rng);
      auto moving = ProjectivePinRow::between(n, k, proj(z0), proj(z1), gamma);
      PathResult pr = numeric::track(ctx.homotopy(moving), x, 0.0, 1.0, ctx.options());
      ok = ctx.accept(pr, end, y) && chordal(y, x) < 10 * h;
      detour = attempt == 1;
    }
    if (!ok) {
      h *= 0.5;
      if (h < opt.min_step) {
        br.underflow = true;
        break;
      }
      continue;
    }
    std::vector<Complex> nz(n);
    for (int j = 0; j < n; ++j) {
      bool i0, i1;
      Complex a = bondforge::detail::chart_coordinate(x, j, i0);
      Complex b = bondforge::detail::chart_coordinate(y, j, i1);
      if (i0 != i1) b = std::abs(b) > 0 ? 1.0 / b : Complex(1e300);
      nz[j] = std::isfinite(std::abs(b - a)) ? (b - a) : Complex(0);
    }
    dz = nz;
    x = y;
    if (detour) br.detours.push_back(static_cast<int>(br.samples.size()));
    br.samples.push_back(SolutionPoint{params_of(x), ns->residual(x)});
    h = std::min(opt.step, 2 * h);
  }
  return br;
}

/// Intersection points of two components, found by pinning a coordinate that is constant on one of
/// them and testing membership of the resulting fiber points of the other.
struct ComponentIntersection {
  int first = 0, second = 0;
  std::vector<std::vector<ProjectiveParam<Complex>>> points;
  /// False when no coordinate allowed the reduction to a finite fiber.
  bool determined = false;
};

/// Distance from x to the nearest point of a component with the same value of a non-constant joint k.
inline double distance_to_component(const numeric::CurveContext& ctx, const numeric::CurveDecomposition& dec,
                                    const numeric::CurveComponent& comp, const RationalParametrization* rp,
                                    const numeric::VecC& x, std::mt19937_64& rng) {
  using namespace numeric;
  int n = ctx.n();
  double worst_const = 0;
  for (int k = 0; k < n; ++k)
    if (comp.constants[k]) worst_const = std::max(worst_const, chordal_distance(*comp.constants[k], param_of(x, k)));
  if (rp) {
    auto pt = rp->point<Complex>(param_of(x, rp->parameter));
    double d = 0;
    for (int k = 0; k < n; ++k) d = std::max(d, chordal_distance(pt[k], param_of(x, k)));
    return d;
  }
  int k = 0;
  while (k < n && comp.degrees[k] == 0) ++k;
  if (k == n) return worst_const;
  auto moved = move_fiber(ctx, k, ProjectiveParam<Complex>::finite(dec.fiber_values[k]), param_of(x, k), comp.fibers[k], rng);
  double best = 1.0;
  for (const auto& m : moved) {
    if (!m) continue;
    double d = 0;
    for (int j = 0; j < n; ++j) d = std::max(d, chordal_distance(param_of(*m, j), param_of(x, j)));
    best = std::min(best, d);
  }
  return std::max(best, worst_const);
}

/// Intersection of components a and b of a decomposition. `params` holds exact parametrizations where known.
inline ComponentIntersection intersect_components(const numeric::CurveContext& ctx, const numeric::CurveDecomposition& dec,
                                                  const std::vector<std::optional<RationalParametrization>>& params, int a,
                                                  int b, std::mt19937_64& rng, double tol = 1e-7) {
  using namespace numeric;
  int n = ctx.n();
  ComponentIntersection out;
  out.first = a;
  out.second = b;
  const auto& A = dec.components[a];
  const auto& B = dec.components[b];
  for (int k = 0; k < n; ++k)
    if (A.constants[k] && B.constants[k] && chordal_distance(*A.constants[k], *B.constants[k]) > 1e-6) {
      out.determined = true;
      return out;
    }
  // Pin a coordinate constant on one component and take the fiber of the other.
  for (int pass = 0; pass < 2; ++pass) {
    int ia = pass == 0 ? a : b, ib = pass == 0 ? b : a;
    const auto& C = dec.components[ia];
    const auto& D = dec.components[ib];
    for (int k = 0; k < n; ++k) {
      if (!C.constants[k] || D.degrees[k] == 0) continue;
      ProjectiveParam<Complex> c = *C.constants[k];
      std::vector<std::vector<ProjectiveParam<Complex>>> cand;
      if (params[ib] && params[ib]->parameter == k) {
        cand.push_back(params[ib]->point<Complex>(c));
      } else {
        auto moved = move_fiber(ctx, k, ProjectiveParam<Complex>::finite(dec.fiber_values[k]), c, D.fibers[k], rng);
        for (const auto& m : moved)
          if (m) cand.push_back(params_of(*m));
      }
      const RationalParametrization* rp = params[ia] ? &*params[ia] : nullptr;
      for (const auto& pt : cand) {
        if (distance_to_component(ctx, dec, C, rp, to_homogeneous(pt), rng) > tol) continue;
        bool dup = false;
        for (const auto& q : out.points) {
          double d = 0;
          for (int j = 0; j < n; ++j) d = std::max(d, chordal_distance(q[j], pt[j]));
          if (d < 1e-6) dup = true;
        }
        if (!dup) out.points.push_back(pt);
      }
      out.determined = true;
      return out;
    }
  }
  return out;
}

/// The configuration curve of a mobile linkage: closure system, numerical decomposition into
/// irreducible components and exact parametrizations of the components where they exist.
struct ConfigurationCurve {
  Linkage linkage;
  PolySystem<Rational> system;
  std::shared_ptr<const numeric::NumericSystem> numeric;
  numeric::CurveContext ctx;
  numeric::CurveDecomposition decomposition;
  std::vector<std::optional<RationalParametrization>> parametrizations;
  std::uint64_t seed = 1;
  mutable std::mt19937_64 rng;

  int size() const { return static_cast<int>(decomposition.components.size()); }
  const numeric::CurveComponent& component(int c) const { return decomposition.components[c]; }
};

inline ConfigurationCurve configuration_curve(const Linkage& l, std::uint64_t seed = 1, int threads = 0) {
  ConfigurationCurve cc;
  cc.linkage = l;
  cc.system = closure_system(l);
  cc.seed = seed;
  cc.rng.seed(seed);
  cc.numeric = std::make_shared<numeric::NumericSystem>(numeric::NumericSystem::from(cc.system));
  if (static_cast<int>(cc.numeric->active().size()) != l.size())
    throw AnalysisError("some joint parameter does not occur in the closure equations");
  cc.ctx = numeric::CurveContext::make(cc.numeric, cc.rng);
  cc.ctx.threads = threads;
  cc.decomposition = numeric::decompose_curve(cc.ctx, cc.rng);
  if (cc.decomposition.components.empty()) throw AnalysisError("the linkage is not mobile: the closure curve is empty");
  for (const auto& comp : cc.decomposition.components) {
    std::optional<RationalParametrization> rp;
    for (int k = 0; k < l.size() && !rp; ++k)
      if (comp.degrees[k] == 1) rp = reconstruct_parametrization(cc.system, cc.ctx, cc.decomposition, comp, k, cc.rng);
    cc.parametrizations.push_back(std::move(rp));
  }
  return cc;
}

}  // namespace bondforge
