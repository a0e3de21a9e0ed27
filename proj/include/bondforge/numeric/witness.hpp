#pragma once

#include "bondforge/numeric/system.hpp"

#include <numeric>
#include <optional>

namespace bondforge::numeric {

/// Shared data for computations on a solution curve: the equations squared up to n - 1 rows,
/// fixed random affine charts, and tracking options.
struct CurveContext {
  std::shared_ptr<const NumericSystem> sys;
  NumericSystem::Target reduced;
  Charts charts;
  TrackOptions track;
  int threads = 0;
  double tol = 1e-9;

  static CurveContext make(std::shared_ptr<const NumericSystem> sys, std::mt19937_64& rng) {
    int n = sys->nvars;
    if (static_cast<int>(sys->active().size()) != n)
      throw InputError("variables", "every variable must occur in the system");
    if (static_cast<int>(sys->equations.size()) < n - 1) throw InputError("equations", "too few equations for a curve");
    CurveContext c;
    c.sys = std::move(sys);
    c.reduced = c.sys->square_target(n - 1, rng);
    c.charts = Charts::random(n, rng);
    return c;
  }

  int n() const { return sys->nvars; }

  /// Reduced equations, one moving row, and the charts.
  Homotopy homotopy(RowPtr moving) const {
    Homotopy h;
    h.nvars = n();
    h.add(reduced.block);
    h.add(std::move(moving));
    h.add(charts.rows());
    return h;
  }

  TrackOptions options() const {
    TrackOptions o = track;
    if (!o.stop) o.stop = null_cone_stop(*sys);
    return o;
  }

  std::vector<PathResult> track_all(RowPtr moving, const std::vector<VecC>& starts, double s0 = 0.0,
                                    double s1 = 1.0) const {
    Homotopy h = homotopy(std::move(moving));
    TrackOptions o = options();
    std::vector<PathResult> out(starts.size());
    parallel_for(static_cast<int>(starts.size()), thread_count(threads),
                 [&](int i) { out[i] = numeric::track(h, starts[i], s0, s1, o); });
    return out;
  }

  /// Gauss-Newton on all equations, the row `slice` at parameter s and charts through x.
  void refine(VecC& x, const RowPtr& slice, double s = 1.0) const {
    Charts ch = Charts::through(x);
    ch.apply(x);
    Homotopy h;
    h.nvars = n();
    h.add(sys->equations_block());
    h.add(slice);
    h.add(ch.rows());
    VecC y = x;
    newton(h, y, s, 6, 1e-15);
    if (y.allFinite() && sys->residual(y) <= sys->residual(x)) x = y;
    charts.apply(x);
  }

  /// Refines an endpoint and accepts it if it is a curve point off the null cone.
  bool accept(const PathResult& pr, const RowPtr& slice, VecC& x, double s = 1.0) const {
    x = pr.x;
    if (!x.allFinite() || pr.status == PathStatus::Diverged || pr.status == PathStatus::Stopped) return false;
    if (pr.status != PathStatus::Success && std::abs(pr.s - s) > 1e-5) return false;
    if (sys->min_null_factor(x) < 1e-8) return false;
    refine(x, slice, s);
    return sys->min_null_factor(x) >= 1e-6 && sys->residual(x) <= tol;
  }

  /// Smallest singular value of the row-scaled Jacobian of all equations, `slice` and charts, relative to the largest.
  double conditioning(const VecC& x, const RowPtr& slice, double s = 1.0) const {
    Homotopy h;
    h.nvars = n();
    h.add(sys->equations_block());
    h.add(slice);
    h.add(Charts::through(x).rows());
    VecC val;
    MatC j;
    h.evaluate(x, s, val, &j, nullptr);
    for (int r = 0; r < j.rows(); ++r) {
      double nr = j.row(r).norm();
      if (nr > 0) j.row(r) /= nr;
    }
    Eigen::JacobiSVD<MatC> svd(j);
    auto sv = svd.singularValues();
    return sv(sv.size() - 1) / sv(0);
  }
};

/// Index of a point in `pts` within chordal distance `tol`, or -1.
inline int find_point(const std::vector<VecC>& pts, const VecC& x, double tol = 1e-6) {
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (chordal(pts[k], x) < tol) return static_cast<int>(k);
  return -1;
}

/// Points of the curve on a hypersurface section of multidegree (1, ..., 1).
struct WitnessSet {
  HomPoly slice;
  std::vector<VecC> points;
  int paths = 0;
  int excluded = 0;
  int failed = 0;
  int singular = 0;
};

inline RowPtr slice_row(const HomPoly& p) { return std::make_shared<PolyRow>(p); }

inline WitnessSet curve_witness(const CurveContext& ctx, const HomPoly& slice, std::mt19937_64& rng) {
  int n = ctx.n();
  NumericSystem::Target target;
  target.block = std::make_shared<ConcatBlock>(
      std::vector<BlockPtr>{ctx.reduced.block, std::make_shared<RowsBlock>(std::vector<RowPtr>{slice_row(slice)})});
  target.degrees = ctx.reduced.degrees;
  target.degrees.push_back(slice.deg);
  auto paths = run_linear_product(n, target, ctx.charts, rng, ctx.options(), ctx.threads);
  WitnessSet w;
  w.slice = slice;
  w.paths = static_cast<int>(paths.size());
  RowPtr row = slice_row(slice);
  for (const auto& pr : paths) {
    VecC x;
    if (pr.status == PathStatus::Stopped || (pr.x.allFinite() && ctx.sys->min_null_factor(pr.x) < 1e-8)) {
      ++w.excluded;
      continue;
    }
    if (!ctx.accept(pr, row, x)) {
      if (x.allFinite() && ctx.sys->min_null_factor(x) < 1e-6)
        ++w.excluded;
      else
        ++w.failed;
      continue;
    }
    if (find_point(w.points, x) >= 0) continue;
    if (ctx.conditioning(x, row) < 1e-8) {
      ++w.singular;
      continue;
    }
    w.points.push_back(x);
  }
  return w;
}

/// Moves witness points along a family of slices; entry k is the index-preserving endpoint or nullopt.
inline std::vector<std::optional<VecC>> move_points(const CurveContext& ctx, const RowPtr& moving, const RowPtr& end,
                                                    const std::vector<VecC>& pts) {
  auto res = ctx.track_all(moving, pts);
  std::vector<std::optional<VecC>> out(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    VecC x;
    if (ctx.accept(res[k], end, x)) out[k] = x;
  }
  return out;
}

/// Moves fiber points over t_k = from to t_k = to along a generic path in P^1.
inline std::vector<std::optional<VecC>> move_fiber(const CurveContext& ctx, int k, const ProjectiveParam<Complex>& from,
                                                   const ProjectiveParam<Complex>& to, const std::vector<VecC>& pts,
                                                   std::mt19937_64& rng) {
  auto moving = ProjectivePinRow::between(ctx.n(), k, from, to, random_unit_complex(rng));
  auto end = ProjectivePinRow::between(ctx.n(), k, to, to, 1.0);
  return move_points(ctx, moving, end, pts);
}

struct CurveComponent {
  /// Points on the decomposition slice.
  std::vector<VecC> witness;
  /// Degree of the projection to each joint parameter.
  std::vector<int> degrees;
  /// Fiber over t_k = fiber_values[k] for every variable of positive degree.
  std::vector<std::vector<VecC>> fibers;
  /// Value of every constant coordinate.
  std::vector<std::optional<ProjectiveParam<Complex>>> constants;
  /// Whether the trace test certified the witness set as complete.
  bool certified = false;

  int degree() const { return std::accumulate(degrees.begin(), degrees.end(), 0); }
  bool constant(int k) const { return constants[k].has_value(); }
};

struct CurveDecomposition {
  std::vector<CurveComponent> components;
  std::vector<Complex> fiber_values;
  WitnessSet witness;
  int loops = 0;
  bool complete = false;
  /// Witness points whose fiber moves failed.
  int lost = 0;
};

struct DecomposeOptions {
  int max_loops = 24;
  int stall_loops = 6;
  double trace_tol = 1e-6;
};

namespace detail {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

inline std::vector<std::vector<int>> groups_of(UnionFind& uf, int n) {
  std::map<int, std::vector<int>> g;
  for (int k = 0; k < n; ++k) g[uf.find(k)].push_back(k);
  std::vector<std::vector<int>> out;
  for (auto& [r, v] : g) out.push_back(v);
  return out;
}

}  // namespace detail

/// Splits the curve into irreducible components by monodromy loops and the linear trace test,
/// then computes projection degrees, fibers over random values and constant coordinates.
inline CurveDecomposition decompose_curve(const CurveContext& ctx, std::mt19937_64& rng,
                                          const DecomposeOptions& opt = {}) {
  int n = ctx.n();
  CurveDecomposition dec;
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  HomPoly l = HomPoly::random_multilinear(n, all, rng);
  HomPoly lam = HomPoly::random_multilinear(n, all, rng);
  HomPoly rfun = HomPoly::random_multilinear(n, all, rng);
  dec.witness = curve_witness(ctx, l, rng);
  const auto& w = dec.witness.points;
  int m = static_cast<int>(w.size());
  RowPtr lrow = slice_row(l);
  auto family = [&](Complex a, Complex b) {
    return std::make_shared<SliceFamilyRow>(l, lam, ComplexPath::segment(a, b));
  };
  auto at = [&](Complex c) { return std::make_shared<SliceFamilyRow>(l, lam, ComplexPath::segment(c, c)); };
  auto tau = [&](const VecC& x) { return rfun.eval(x, nullptr) / lam.eval(x, nullptr); };

  // Per-point traces at c = 0, c1, c2.
  Complex c1 = random_gaussian_complex(rng), c2 = random_gaussian_complex(rng);
  auto p1 = move_points(ctx, family(0.0, c1), at(c1), w);
  auto p2 = move_points(ctx, family(0.0, c2), at(c2), w);
  std::vector<Complex> d1(m), d2(m);
  std::vector<bool> traced(m, true);
  for (int k = 0; k < m; ++k) {
    if (!p1[k] || !p2[k]) {
      traced[k] = false;
      continue;
    }
    Complex t0 = tau(w[k]);
    d1[k] = tau(*p1[k]) - t0;
    d2[k] = tau(*p2[k]) - t0;
  }
  auto passes = [&](const std::vector<int>& g) {
    Complex a = 0, b = 0;
    double scale = 1.0;
    for (int k : g) {
      if (!traced[k]) return false;
      a += d1[k];
      b += d2[k] * (c1 / c2);
      scale += std::abs(d1[k]) + std::abs(d2[k] * (c1 / c2));
    }
    return std::abs(a - b) <= opt.trace_tol * scale;
  };

  detail::UnionFind uf(m);
  int stall = 0;
  auto all_pass = [&]() {
    for (const auto& g : detail::groups_of(uf, m))
      if (!passes(g)) return false;
    return true;
  };
  while (m > 0 && !all_pass() && dec.loops < opt.max_loops && stall < opt.stall_loops) {
    ++dec.loops;
    // Loop L -> L' -> L through a fresh random slice with two different gamma constants.
    HomPoly lp = HomPoly::random_multilinear(n, all, rng);
    RowPtr lprow = slice_row(lp);
    auto q1 = ctx.track_all(std::make_shared<BlendRow>(lrow, lprow, random_unit_complex(rng)), w);
    std::vector<VecC> mid(m);
    std::vector<bool> ok(m, true);
    for (int k = 0; k < m; ++k) {
      ok[k] = q1[k].status == PathStatus::Success;
      mid[k] = q1[k].x;
    }
    auto q3 = move_points(ctx, std::make_shared<BlendRow>(lprow, lrow, random_unit_complex(rng)), lrow, mid);
    bool changed = false;
    for (int k = 0; k < m; ++k) {
      if (!ok[k] || !q3[k]) continue;
      int j = find_point(w, *q3[k]);
      if (j >= 0 && uf.unite(k, j)) changed = true;
    }
    stall = changed ? 0 : stall + 1;
  }

  // Groups that fail on their own may still combine into complete components.
  auto groups = detail::groups_of(uf, m);
  std::vector<std::vector<int>> done, failing;
  for (auto& g : groups) (passes(g) ? done : failing).push_back(g);
  if (failing.size() > 1 && failing.size() <= 12) {
    int f = static_cast<int>(failing.size());
    std::vector<bool> used(f, false);
    for (int size = 2; size <= f; ++size) {
      for (int mask = 1; mask < (1 << f); ++mask) {
        if (__builtin_popcount(mask) != size) continue;
        bool free = true;
        std::vector<int> u;
        for (int b = 0; b < f; ++b)
          if (mask & (1 << b)) {
            if (used[b]) free = false;
            u.insert(u.end(), failing[b].begin(), failing[b].end());
          }
        if (!free || !passes(u)) continue;
        for (int b = 0; b < f; ++b)
          if (mask & (1 << b)) used[b] = true;
        std::sort(u.begin(), u.end());
        done.push_back(u);
      }
    }
    std::vector<std::vector<int>> rest;
    for (int b = 0; b < f; ++b)
      if (!used[b]) rest.push_back(failing[b]);
    failing = rest;
  }
  dec.complete = failing.empty();

  // Fibers: move every group to the product slice prod_k (u_k - c_k v_k).
  std::vector<LinForm> forms;
  for (int k = 0; k < n; ++k) {
    dec.fiber_values.push_back(random_gaussian_complex(rng));
    forms.push_back({k, 1.0, -dec.fiber_values[k]});
  }
  RowPtr prow = std::make_shared<ProductRow>(n, forms);
  std::vector<RowPtr> pins;
  for (int k = 0; k < n; ++k)
    pins.push_back(ProjectivePinRow::between(n, k, ProjectiveParam<Complex>::finite(dec.fiber_values[k]),
                                             ProjectiveParam<Complex>::finite(dec.fiber_values[k]), 1.0));
  auto blend = std::make_shared<BlendRow>(lrow, prow, random_unit_complex(rng));
  auto make_component = [&](const std::vector<int>& g, bool certified) {
    CurveComponent c;
    c.certified = certified;
    for (int k : g) c.witness.push_back(w[k]);
    c.degrees.assign(n, 0);
    c.fibers.assign(n, {});
    auto res = ctx.track_all(blend, c.witness);
    for (const auto& pr : res) {
      if (!pr.x.allFinite()) {
        ++dec.lost;
        continue;
      }
      int best = 0;
      double bv = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n; ++k) {
        double v = std::abs(pr.x(2 * k) - dec.fiber_values[k] * pr.x(2 * k + 1)) /
                   std::sqrt(std::norm(pr.x(2 * k)) + std::norm(pr.x(2 * k + 1)));
        if (v < bv) {
          bv = v;
          best = k;
        }
      }
      VecC x;
      if (!ctx.accept(pr, pins[best], x)) {
        ++dec.lost;
        continue;
      }
      ++c.degrees[best];
      c.fibers[best].push_back(x);
    }
    c.constants.assign(n, std::nullopt);
    for (int k = 0; k < n; ++k) {
      if (c.degrees[k] > 0) continue;
      c.constants[k] = param_of(c.witness[0], k);
    }
    return c;
  };
  for (const auto& g : done) dec.components.push_back(make_component(g, true));
  for (const auto& g : failing) dec.components.push_back(make_component(g, false));
  std::stable_sort(dec.components.begin(), dec.components.end(), [](const CurveComponent& a, const CurveComponent& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.degrees < b.degrees;
  });
  return dec;
}

}  // namespace bondforge::numeric
