#pragma once

#include "bondforge/errors.hpp"
#include "bondforge/numeric/homotopy.hpp"

#include <map>
#include <string>

namespace bondforge::numeric {

/// Float view of a closure (or general) polynomial system in multi-projective coordinates.
struct NumericSystem {
  int nvars = 0;
  std::vector<JointKind> kinds;
  std::vector<int> degrees;
  std::vector<Polynomial<Complex>> affine;
  std::vector<HomPoly> equations;
  std::vector<std::array<HomPoly, 8>> products;
  /// Factored loop products; when present the equations are their closure coordinates.
  std::vector<std::vector<LoopFactor>> loops;
  std::shared_ptr<const ClosureBlock> closure;

  template <class S>
  static NumericSystem from(const PolySystem<S>& sys) {
    NumericSystem ns;
    ns.nvars = sys.num_vars();
    ns.kinds = sys.kinds;
    if (ns.kinds.empty()) ns.kinds.assign(ns.nvars, JointKind::Revolute);
    ns.degrees = sys.degrees();
    for (const auto& prod : sys.products)
      for (int c = 0; c < 8; ++c)
        for (int k = 0; k < ns.nvars; ++k) ns.degrees[k] = std::max(ns.degrees[k], prod[c].degree_in(k));
    for (const auto& e : sys.equations) {
      auto pc = e.template map_coeffs<Complex>([](const S& c) { return to_complex(c); });
      std::vector<int> own(ns.nvars);
      for (int k = 0; k < ns.nvars; ++k) own[k] = e.degree_in(k);
      ns.affine.push_back(pc);
      ns.equations.push_back(HomPoly::from(pc, ns.nvars, own));
    }
    for (const auto& prod : sys.products) {
      std::array<HomPoly, 8> hp;
      for (int c = 0; c < 8; ++c) hp[c] = HomPoly::from(prod[c], ns.nvars, ns.degrees);
      ns.products.push_back(std::move(hp));
    }
    if (!sys.loops.empty() && 6 * sys.loops.size() == sys.equations.size()) {
      ns.loops = sys.loops;
      int w = static_cast<int>(6 * ns.loops.size());
      ns.closure = std::make_shared<ClosureBlock>(ns.nvars, ns.loops, MatC::Identity(w, w));
    }
    return ns;
  }

  std::vector<int> active() const {
    std::vector<int> a;
    for (int k = 0; k < nvars; ++k)
      if (degrees[k] > 0) a.push_back(k);
    return a;
  }

  /// Relative residual: closure coordinates over the largest coordinate, or scaled equation values.
  double residual(const VecC& x) const {
    double r = 0;
    if (closure) {
      for (const auto& p : closure->products(x)) r = std::max(r, relative_residual(p));
      return r;
    }
    if (!products.empty()) {
      for (const auto& hp : products) {
        DQ<Complex> p;
        for (int c = 0; c < 8; ++c) p[c] = hp[c].eval(x, nullptr);
        r = std::max(r, relative_residual(p));
      }
      return r;
    }
    for (const auto& e : equations) {
      double sc = e.scale(x);
      r = std::max(r, std::abs(e.eval(x, nullptr)) / (sc > 0 ? sc : 1.0));
    }
    return r;
  }

  /// |u^2 + v^2| / (|u|^2 + |v|^2) for revolute, |u|^2 / (|u|^2 + |v|^2) for prismatic variables.
  double null_factor(const VecC& x, int k) const {
    Complex u = x(2 * k), v = x(2 * k + 1);
    double n = std::norm(u) + std::norm(v);
    if (n == 0) return 0;
    if (kinds[k] == JointKind::Prismatic) return std::norm(u) / n;
    return std::abs(u * u + v * v) / n;
  }
  double min_null_factor(const VecC& x) const {
    double m = 1.0;
    for (int k : active()) m = std::min(m, null_factor(x, k));
    return m;
  }

  /// Rows of all equations, each scaled to unit coefficient norm.
  std::vector<RowPtr> equation_rows() const {
    std::vector<RowPtr> rows;
    for (const auto& e : equations) {
      HomPoly s = e;
      double n = 0;
      for (const auto& c : s.coef) n = std::max(n, std::abs(c));
      if (n > 0)
        for (auto& c : s.coef) c /= n;
      rows.push_back(std::make_shared<PolyRow>(s));
    }
    return rows;
  }

  /// All equations as one block (closure coordinates, or rows scaled to unit coefficient norm).
  BlockPtr equations_block() const {
    if (closure) return closure;
    return std::make_shared<RowsBlock>(equation_rows());
  }

  /// A square target: `count` equations with per-row degree bounds for a linear-product start.
  struct Target {
    BlockPtr block;
    std::vector<std::vector<int>> degrees;
  };
  Target square_target(int count, std::mt19937_64& rng) const {
    Target t;
    int e = static_cast<int>(equations.size());
    if (closure) {
      MatC combo = MatC::Identity(e, e);
      if (count != e) {
        combo.resize(count, e);
        for (int r = 0; r < count; ++r)
          for (int c = 0; c < e; ++c) combo(r, c) = random_gaussian_complex(rng);
      }
      for (int r = 0; r < count; ++r) {
        std::vector<int> d(nvars, 0);
        for (std::size_t l = 0; l < loops.size(); ++l) {
          if (combo.row(r).segment(6 * l, 6).squaredNorm() == 0) continue;
          for (const auto& f : loops[l])
            if (f.var >= 0) d[f.var] = 1;
        }
        t.degrees.push_back(std::move(d));
      }
      t.block = std::make_shared<ClosureBlock>(nvars, loops, combo);
      return t;
    }
    std::vector<RowPtr> rows;
    if (count == e) {
      for (const auto& eq : equations) {
        rows.push_back(std::make_shared<PolyRow>(eq));
        t.degrees.push_back(eq.deg);
      }
    } else {
      for (auto& hp : randomized(count, rng)) {
        t.degrees.push_back(hp.deg);
        rows.push_back(std::make_shared<PolyRow>(std::move(hp)));
      }
    }
    t.block = std::make_shared<RowsBlock>(std::move(rows));
    return t;
  }

  /// `count` random linear combinations of the equations.
  std::vector<HomPoly> randomized(int count, std::mt19937_64& rng) const {
    std::vector<HomPoly> out;
    double scale_all = 0;
    std::vector<double> sc;
    for (const auto& e : affine) {
      double n = 0;
      for (const auto& [ex, c] : e.terms()) n = std::max(n, std::abs(c));
      sc.push_back(n > 0 ? 1.0 / n : 1.0);
      scale_all = std::max(scale_all, n);
    }
    for (int r = 0; r < count; ++r) {
      Polynomial<Complex> comb;
      for (std::size_t j = 0; j < affine.size(); ++j) comb += (random_gaussian_complex(rng) * sc[j]) * affine[j];
      out.push_back(HomPoly::from(comb, nvars, degrees));
    }
    return out;
  }
};

/// Random affine chart a_k u_k + b_k v_k = 1 for every variable.
struct Charts {
  std::vector<Complex> a, b;

  static Charts random(int nvars, std::mt19937_64& rng) {
    Charts c;
    for (int k = 0; k < nvars; ++k) {
      c.a.push_back(random_gaussian_complex(rng));
      c.b.push_back(random_gaussian_complex(rng));
    }
    return c;
  }
  /// Chart through the current point: conj(u) u + conj(v) v = |x_k|^2 normalized to 1.
  static Charts through(const VecC& x) {
    Charts c;
    for (int k = 0; k < x.size() / 2; ++k) {
      Complex u = x(2 * k), v = x(2 * k + 1);
      double n = std::norm(u) + std::norm(v);
      c.a.push_back(std::conj(u) / n);
      c.b.push_back(std::conj(v) / n);
    }
    return c;
  }
  std::vector<RowPtr> rows() const {
    std::vector<RowPtr> r;
    int n = static_cast<int>(a.size());
    for (int k = 0; k < n; ++k) r.push_back(std::make_shared<ChartRow>(n, k, a[k], b[k]));
    return r;
  }
  /// Rescales x so that every chart equation holds.
  void apply(VecC& x) const {
    for (std::size_t k = 0; k < a.size(); ++k) {
      Complex s = a[k] * x(2 * k) + b[k] * x(2 * k + 1);
      if (std::abs(s) > 0) {
        x(2 * k) /= s;
        x(2 * k + 1) /= s;
      }
    }
  }
};

/// Gauss-Newton on all equations plus charts; returns the final update norm.
inline double sharpen(const NumericSystem& sys, VecC& x, int iters = 8) {
  Charts ch = Charts::through(x);
  ch.apply(x);
  Homotopy h;
  h.nvars = sys.nvars;
  h.add(sys.equations_block());
  h.add(ch.rows());
  double last = 0;
  VecC y = x;
  newton(h, y, 1.0, iters, 1e-15, &last);
  if (y.allFinite() && sys.residual(y) <= sys.residual(x)) x = y;
  return last;
}

/// Singular values of the full Jacobian (equations and a chart through x), rows scaled to unit norm.
inline Eigen::VectorXd full_jacobian_singular_values(const NumericSystem& sys, const VecC& x, MatC* v = nullptr) {
  Homotopy h;
  h.nvars = sys.nvars;
  h.add(sys.equations_block());
  h.add(Charts::through(x).rows());
  VecC val;
  MatC j;
  h.evaluate(x, 1.0, val, &j, nullptr);
  double top = 0;
  for (int r = 0; r < j.rows(); ++r) top = std::max(top, j.row(r).norm());
  for (int r = 0; r < j.rows(); ++r) {
    double n = j.row(r).norm();
    if (n > 1e-10 * top)
      j.row(r) /= n;
    else
      j.row(r).setZero();
  }
  Eigen::JacobiSVD<MatC> svd(j, v ? Eigen::ComputeFullV : 0);
  if (v) *v = svd.matrixV();
  return svd.singularValues();
}

inline double chordal(const VecC& x, const VecC& y) {
  double m = 0;
  for (int k = 0; k < x.size() / 2; ++k) m = std::max(m, chordal_distance(param_of(x, k), param_of(y, k)));
  return m;
}

class PositiveDimensionalError : public AnalysisError {
 public:
  PositiveDimensionalError(SolutionPoint p, std::vector<Complex> dir)
      : AnalysisError("solution set is positive-dimensional; use curve tracing"),
        point(std::move(p)),
        direction(std::move(dir)) {}
  SolutionPoint point;
  std::vector<Complex> direction;
};

struct SolveOptions {
  std::uint64_t seed = 1;
  double tol = 1e-10;
  int threads = 0;
  TrackOptions track;
};

struct SolveResult {
  std::vector<SolutionPoint> solutions;
  int paths = 0;
  int excluded = 0;
  int failed = 0;
  int duplicates = 0;
  int at_infinity = 0;
};

/// Endpoint classification shared by the square solver and witness computations.
enum class EndpointKind { Solution, Excluded, Failed };

inline EndpointKind classify_endpoint(const NumericSystem& sys, const PathResult& pr, VecC& x, double tol) {
  x = pr.x;
  if (!x.allFinite()) return EndpointKind::Failed;
  if (pr.status == PathStatus::Diverged) return EndpointKind::Failed;
  if (pr.status == PathStatus::Stopped) return EndpointKind::Excluded;
  if (pr.status != PathStatus::Success && pr.s < 1.0 - 1e-5) return EndpointKind::Failed;
  if (sys.min_null_factor(x) < 1e-8) return EndpointKind::Excluded;
  sharpen(sys, x);
  if (sys.min_null_factor(x) < 1e-6) return EndpointKind::Excluded;
  if (sys.residual(x) > tol) return EndpointKind::Failed;
  return EndpointKind::Solution;
}

/// Stops paths that run into the null cone near the end of the homotopy.
inline std::function<bool(const VecC&, double)> null_cone_stop(const NumericSystem& sys, double s_min = 0.9,
                                                               double thresh = 1e-7) {
  return [&sys, s_min, thresh](const VecC& x, double s) { return s > s_min && sys.min_null_factor(x) < thresh; };
}

/// Linear-product start rows with the given per-row, per-variable degrees.
inline std::vector<std::shared_ptr<const ProductRow>> linear_product_rows(const std::vector<std::vector<int>>& degrees,
                                                                         std::mt19937_64& rng) {
  std::vector<std::shared_ptr<const ProductRow>> rows;
  for (const auto& d : degrees) {
    std::vector<LinForm> f;
    int n = static_cast<int>(d.size());
    for (int k = 0; k < n; ++k) {
      for (int r = 0; r < d[k]; ++r) f.push_back({k, random_gaussian_complex(rng), random_gaussian_complex(rng)});
    }
    rows.push_back(std::make_shared<ProductRow>(n, f));
  }
  return rows;
}

/// Tracks from a linear-product start system to `target`. Returns raw path results.
inline std::vector<PathResult> run_linear_product(int nvars, const NumericSystem::Target& target,
                                                  const Charts& charts, std::mt19937_64& rng,
                                                  const TrackOptions& opt, int threads) {
  auto start = linear_product_rows(target.degrees, rng);
  std::vector<std::shared_ptr<const ChartRow>> chart_rows;
  for (std::size_t k = 0; k < charts.a.size(); ++k)
    chart_rows.push_back(std::make_shared<ChartRow>(nvars, static_cast<int>(k), charts.a[k], charts.b[k]));
  auto starts = product_start_solutions(nvars, start, chart_rows);
  Complex gamma = random_unit_complex(rng);
  Homotopy h;
  h.nvars = nvars;
  h.add(std::make_shared<BlendBlock>(std::vector<RowPtr>(start.begin(), start.end()), target.block, gamma));
  h.add(std::vector<RowPtr>(chart_rows.begin(), chart_rows.end()));
  std::vector<PathResult> out(starts.size());
  parallel_for(static_cast<int>(starts.size()), thread_count(threads),
               [&](int i) { out[i] = track(h, starts[i], 0.0, 1.0, opt); });
  return out;
}

inline SolutionPoint to_solution(const NumericSystem& sys, const VecC& x) {
  SolutionPoint p;
  p.values = params_of(x);
  p.residual = sys.residual(x);
  return p;
}

/// Isolated solutions of a polynomial system with finitely many solutions, via a
/// multi-projective linear-product homotopy. Overdetermined systems are randomized
/// to square and endpoints are filtered by the full system.
inline SolveResult solve_square(const NumericSystem& sys, const SolveOptions& opt = {}) {
  std::mt19937_64 rng(opt.seed);
  int n = static_cast<int>(sys.active().size());
  if (n != sys.nvars) throw InputError("variables", "every variable must occur in the system");
  int e = static_cast<int>(sys.equations.size());
  if (e < n) throw InputError("equations", "fewer equations than unknowns");
  auto target = sys.square_target(n, rng);
  Charts charts = Charts::random(n, rng);
  TrackOptions topt = opt.track;
  if (!topt.stop) topt.stop = null_cone_stop(sys);
  auto paths = run_linear_product(n, target, charts, rng, topt, opt.threads);
  SolveResult res;
  res.paths = static_cast<int>(paths.size());
  std::vector<VecC> sols;
  for (const auto& pr : paths) {
    VecC x;
    switch (classify_endpoint(sys, pr, x, std::max(opt.tol, 1e-12))) {
      case EndpointKind::Excluded:
        ++res.excluded;
        continue;
      case EndpointKind::Failed:
        ++res.failed;
        continue;
      case EndpointKind::Solution:
        break;
    }
    bool dup = false;
    for (const auto& y : sols)
      if (chordal(x, y) < 1e-6) dup = true;
    if (dup) {
      ++res.duplicates;
      continue;
    }
    MatC v;
    auto sv = full_jacobian_singular_values(sys, x, &v);
    if (sv(sv.size() - 1) < 1e-7 * sv(0) || sv.size() < 2 * n) {
      VecC dir = v.col(v.cols() - 1);
      throw PositiveDimensionalError(to_solution(sys, x), std::vector<Complex>(dir.data(), dir.data() + dir.size()));
    }
    sols.push_back(x);
  }
  for (const auto& x : sols) {
    SolutionPoint p = to_solution(sys, x);
    for (int k = 0; k < n; ++k)
      if (p.at_infinity(k)) {
        ++res.at_infinity;
        break;
      }
    res.solutions.push_back(p);
  }
  std::sort(res.solutions.begin(), res.solutions.end(), [](const SolutionPoint& a, const SolutionPoint& b) {
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      Complex x = a.values[k].is_infinite(1e-12) ? Complex(1e300) : a.values[k].value();
      Complex y = b.values[k].is_infinite(1e-12) ? Complex(1e300) : b.values[k].value();
      if (std::abs(x.real() - y.real()) > 1e-9) return x.real() < y.real();
      if (std::abs(x.imag() - y.imag()) > 1e-9) return x.imag() < y.imag();
    }
    return false;
  });
  return res;
}

template <class S>
SolveResult solve_square(const PolySystem<S>& sys, const SolveOptions& opt = {}) {
  return solve_square(NumericSystem::from(sys), opt);
}

}  // namespace bondforge::numeric
