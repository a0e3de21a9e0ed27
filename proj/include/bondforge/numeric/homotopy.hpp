#pragma once

#include "bondforge/closure.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <memory>
#include <random>
#include <thread>
#include <vector>

namespace bondforge::numeric {

using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;
using RowC = Eigen::RowVectorXcd;

/// Layout of unknowns: x(2k) = u_k, x(2k+1) = v_k with t_k = u_k / v_k.
inline ProjectiveParam<Complex> param_of(const VecC& x, int k) {
  Complex u = x(2 * k), v = x(2 * k + 1);
  double n = std::sqrt(std::norm(u) + std::norm(v));
  if (n == 0) return {u, v};
  // Fix the phase so that the larger coordinate is real and positive.
  Complex ph = std::abs(u) >= std::abs(v) ? std::conj(u) / std::abs(u) : std::conj(v) / std::abs(v);
  return {u * ph / n, v * ph / n};
}

inline std::vector<ProjectiveParam<Complex>> params_of(const VecC& x) {
  std::vector<ProjectiveParam<Complex>> out;
  for (int k = 0; k < x.size() / 2; ++k) out.push_back(param_of(x, k));
  return out;
}

inline VecC to_homogeneous(const std::vector<ProjectiveParam<Complex>>& t) {
  VecC x(2 * t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    x(2 * k) = t[k].u;
    x(2 * k + 1) = t[k].v;
  }
  return x;
}

/// Polynomial homogenized separately in each variable (u_k, v_k).
struct HomPoly {
  int nvars = 0;
  std::vector<int> deg;
  std::vector<Complex> coef;
  std::vector<std::vector<std::uint8_t>> expo;

  template <class S>
  static HomPoly from(const Polynomial<S>& p, int nvars, const std::vector<int>& degs) {
    HomPoly h;
    h.nvars = nvars;
    h.deg = degs;
    for (const auto& [e, c] : p.terms()) {
      std::vector<std::uint8_t> a(nvars, 0);
      for (std::size_t k = 0; k < e.size(); ++k) a[k] = e[k];
      for (int k = 0; k < nvars; ++k)
        if (a[k] > h.deg[k]) throw std::invalid_argument("HomPoly: degree bound too small");
      h.coef.push_back(to_complex(c));
      h.expo.push_back(std::move(a));
    }
    return h;
  }

  /// Random polynomial of multidegree (1, ..., 1) on the given variables.
  template <class Rng>
  static HomPoly random_multilinear(int nvars, const std::vector<int>& active, Rng& rng) {
    HomPoly h;
    h.nvars = nvars;
    h.deg.assign(nvars, 0);
    for (int k : active) h.deg[k] = 1;
    std::normal_distribution<double> nd;
    int m = static_cast<int>(active.size());
    for (int mask = 0; mask < (1 << m); ++mask) {
      std::vector<std::uint8_t> a(nvars, 0);
      for (int b = 0; b < m; ++b)
        if (mask & (1 << b)) a[active[b]] = 1;
      h.coef.emplace_back(nd(rng), nd(rng));
      h.expo.push_back(std::move(a));
    }
    return h;
  }

  /// Value and gradient with respect to x.
  Complex eval(const VecC& x, RowC* grad) const {
    constexpr int kMaxVars = 24, kMaxDeg = 8;
    if (nvars > kMaxVars) throw std::invalid_argument("HomPoly: too many variables");
    int maxd = 0;
    for (int d : deg) maxd = std::max(maxd, d);
    if (maxd >= kMaxDeg) throw std::invalid_argument("HomPoly: degree too large");
    Complex pu[kMaxVars][kMaxDeg], pv[kMaxVars][kMaxDeg];
    for (int k = 0; k < nvars; ++k) {
      pu[k][0] = pv[k][0] = 1.0;
      for (int a = 1; a <= deg[k]; ++a) {
        pu[k][a] = pu[k][a - 1] * x(2 * k);
        pv[k][a] = pv[k][a - 1] * x(2 * k + 1);
      }
    }
    Complex val = 0;
    if (grad) grad->setZero(2 * nvars);
    Complex f[kMaxVars], pre[kMaxVars + 1], suf[kMaxVars + 1];
    for (std::size_t t = 0; t < coef.size(); ++t) {
      const auto& a = expo[t];
      pre[0] = 1.0;
      for (int k = 0; k < nvars; ++k) {
        f[k] = pu[k][a[k]] * pv[k][deg[k] - a[k]];
        pre[k + 1] = pre[k] * f[k];
      }
      val += coef[t] * pre[nvars];
      if (!grad) continue;
      suf[nvars] = 1.0;
      for (int k = nvars - 1; k >= 0; --k) suf[k] = suf[k + 1] * f[k];
      for (int k = 0; k < nvars; ++k) {
        if (deg[k] == 0) continue;
        Complex others = coef[t] * pre[k] * suf[k + 1];
        int au = a[k], av = deg[k] - a[k];
        if (au > 0) (*grad)(2 * k) += others * double(au) * pu[k][au - 1] * pv[k][av];
        if (av > 0) (*grad)(2 * k + 1) += others * double(av) * pu[k][au] * pv[k][av - 1];
      }
    }
    return val;
  }

  /// Sum of |coef| times the product of norms, a scale for relative residuals.
  double scale(const VecC& x) const {
    double s = 0;
    for (const auto& c : coef) s += std::abs(c);
    for (int k = 0; k < nvars; ++k) {
      double n = std::sqrt(std::norm(x(2 * k)) + std::norm(x(2 * k + 1)));
      s *= std::pow(n, deg[k]);
    }
    return s;
  }
};

/// Linear form a u_var + b v_var.
struct LinForm {
  int var = 0;
  Complex a, b;
};

/// One equation of a homotopy: value, x-gradient and s-derivative at (x, s).
class Row {
 public:
  virtual ~Row() = default;
  virtual Complex eval(const VecC& x, double s, RowC* grad, Complex* ds) const = 0;
};
using RowPtr = std::shared_ptr<const Row>;

class PolyRow : public Row {
 public:
  explicit PolyRow(HomPoly p) : p_(std::move(p)) {}
  Complex eval(const VecC& x, double, RowC* grad, Complex* ds) const override {
    if (ds) *ds = 0;
    return p_.eval(x, grad);
  }
  const HomPoly& poly() const { return p_; }

 private:
  HomPoly p_;
};

class ProductRow : public Row {
 public:
  ProductRow(int nvars, std::vector<LinForm> f) : nvars_(nvars), f_(std::move(f)) {}
  Complex eval(const VecC& x, double, RowC* grad, Complex* ds) const override {
    if (ds) *ds = 0;
    int m = static_cast<int>(f_.size());
    std::vector<Complex> v(m), pre(m + 1), suf(m + 1);
    for (int k = 0; k < m; ++k) v[k] = f_[k].a * x(2 * f_[k].var) + f_[k].b * x(2 * f_[k].var + 1);
    pre[0] = 1;
    for (int k = 0; k < m; ++k) pre[k + 1] = pre[k] * v[k];
    if (grad) {
      grad->setZero(2 * nvars_);
      suf[m] = 1;
      for (int k = m - 1; k >= 0; --k) suf[k] = suf[k + 1] * v[k];
      for (int k = 0; k < m; ++k) {
        Complex o = pre[k] * suf[k + 1];
        (*grad)(2 * f_[k].var) += o * f_[k].a;
        (*grad)(2 * f_[k].var + 1) += o * f_[k].b;
      }
    }
    return pre[m];
  }
  const std::vector<LinForm>& factors() const { return f_; }

 private:
  int nvars_;
  std::vector<LinForm> f_;
};

/// a u_k + b v_k - 1.
class ChartRow : public Row {
 public:
  ChartRow(int nvars, int k, Complex a, Complex b) : nvars_(nvars), k_(k), a_(a), b_(b) {}
  Complex eval(const VecC& x, double, RowC* grad, Complex* ds) const override {
    if (ds) *ds = 0;
    if (grad) {
      grad->setZero(2 * nvars_);
      (*grad)(2 * k_) = a_;
      (*grad)(2 * k_ + 1) = b_;
    }
    return a_ * x(2 * k_) + b_ * x(2 * k_ + 1) - 1.0;
  }
  int var() const { return k_; }
  Complex a() const { return a_; }
  Complex b() const { return b_; }

 private:
  int nvars_, k_;
  Complex a_, b_;
};

/// gamma (1 - s) start + s target.
class BlendRow : public Row {
 public:
  BlendRow(RowPtr start, RowPtr target, Complex gamma) : s_(std::move(start)), t_(std::move(target)), g_(gamma) {}
  Complex eval(const VecC& x, double s, RowC* grad, Complex* ds) const override {
    thread_local RowC gs, gt;
    Complex vs = s_->eval(x, s, grad ? &gs : nullptr, nullptr);
    Complex vt = t_->eval(x, s, grad ? &gt : nullptr, nullptr);
    if (grad) *grad = g_ * (1.0 - s) * gs + s * gt;
    if (ds) *ds = -g_ * vs + vt;
    return g_ * (1.0 - s) * vs + s * vt;
  }

 private:
  RowPtr s_, t_;
  Complex g_;
};

/// Piecewise path in the complex plane, parametrized by s in [0, 1].
struct ComplexPath {
  std::function<Complex(double)> at;
  std::function<Complex(double)> derivative;

  static ComplexPath segment(Complex a, Complex b) {
    return {[a, b](double s) { return a + s * (b - a); }, [a, b](double) { return b - a; }};
  }
  /// Segment bent by a small transverse bulge, which avoids isolated singular parameters.
  static ComplexPath bent(Complex a, Complex b, Complex bulge) {
    return {[a, b, bulge](double s) { return a + s * (b - a) + bulge * (s * (1 - s)); },
            [a, b, bulge](double s) { return (b - a) + bulge * (1 - 2 * s); }};
  }
  /// Arc of the circle center + r e^{i phi}, phi from phi0 to phi1.
  static ComplexPath arc(Complex center, double r, double phi0, double phi1) {
    return {[=](double s) { return center + std::polar(r, phi0 + s * (phi1 - phi0)); },
            [=](double s) { return Complex(0, phi1 - phi0) * std::polar(r, phi0 + s * (phi1 - phi0)); }};
  }
};

/// u_k - c(s) v_k, pinning t_k to a moving value.
class PinRow : public Row {
 public:
  PinRow(int nvars, int k, ComplexPath path) : nvars_(nvars), k_(k), path_(std::move(path)) {}
  Complex eval(const VecC& x, double s, RowC* grad, Complex* ds) const override {
    Complex c = path_.at(s);
    if (grad) {
      grad->setZero(2 * nvars_);
      (*grad)(2 * k_) = 1.0;
      (*grad)(2 * k_ + 1) = -c;
    }
    if (ds) *ds = -path_.derivative(s) * x(2 * k_ + 1);
    return x(2 * k_) - c * x(2 * k_ + 1);
  }

 private:
  int nvars_, k_;
  ComplexPath path_;
};

/// v_k - c(s) u_k, pinning 1/t_k; used near t_k = inf.
class PinInverseRow : public Row {
 public:
  PinInverseRow(int nvars, int k, ComplexPath path) : nvars_(nvars), k_(k), path_(std::move(path)) {}
  Complex eval(const VecC& x, double s, RowC* grad, Complex* ds) const override {
    Complex c = path_.at(s);
    if (grad) {
      grad->setZero(2 * nvars_);
      (*grad)(2 * k_ + 1) = 1.0;
      (*grad)(2 * k_) = -c;
    }
    if (ds) *ds = -path_.derivative(s) * x(2 * k_);
    return x(2 * k_ + 1) - c * x(2 * k_);
  }

 private:
  int nvars_, k_;
  ComplexPath path_;
};

/// a(s) u_k + b(s) v_k with (a, b) = gamma (1 - s) (a0, b0) + s (a1, b1): moves the pinned value
/// t_k = -b/a from one point of P^1 to another along a generic path.
class ProjectivePinRow : public Row {
 public:
  ProjectivePinRow(int nvars, int k, Complex a0, Complex b0, Complex a1, Complex b1, Complex gamma)
      : nvars_(nvars), k_(k), a0_(gamma * a0), b0_(gamma * b0), a1_(a1), b1_(b1) {}
  /// Pin from value `from` to value `to`, both points of P^1.
  static std::shared_ptr<ProjectivePinRow> between(int nvars, int k, const ProjectiveParam<Complex>& from,
                                                   const ProjectiveParam<Complex>& to, Complex gamma) {
    return std::make_shared<ProjectivePinRow>(nvars, k, from.v, -from.u, to.v, -to.u, gamma);
  }
  Complex eval(const VecC& x, double s, RowC* grad, Complex* ds) const override {
    Complex a = (1.0 - s) * a0_ + s * a1_, b = (1.0 - s) * b0_ + s * b1_;
    if (grad) {
      grad->setZero(2 * nvars_);
      (*grad)(2 * k_) = a;
      (*grad)(2 * k_ + 1) = b;
    }
    if (ds) *ds = (a1_ - a0_) * x(2 * k_) + (b1_ - b0_) * x(2 * k_ + 1);
    return a * x(2 * k_) + b * x(2 * k_ + 1);
  }

 private:
  int nvars_, k_;
  Complex a0_, b0_, a1_, b1_;
};

/// L(x) - c(s) M(x) for a family of parallel slices.
class SliceFamilyRow : public Row {
 public:
  SliceFamilyRow(HomPoly l, HomPoly m, ComplexPath c) : l_(std::move(l)), m_(std::move(m)), c_(std::move(c)) {}
  Complex eval(const VecC& x, double s, RowC* grad, Complex* ds) const override {
    thread_local RowC gl, gm;
    Complex vl = l_.eval(x, grad ? &gl : nullptr), vm = m_.eval(x, grad ? &gm : nullptr);
    Complex c = c_.at(s);
    if (grad) *grad = gl - c * gm;
    if (ds) *ds = -c_.derivative(s) * vm;
    return vl - c * vm;
  }

 private:
  HomPoly l_, m_;
  ComplexPath c_;
};

/// Several equations evaluated together.
class Block {
 public:
  virtual ~Block() = default;
  virtual int size() const = 0;
  /// Writes rows [off, off + size()) of the values, the x-Jacobian and the s-derivative.
  virtual void eval(const VecC& x, double s, int off, VecC& val, MatC* jac, VecC* ds) const = 0;
};
using BlockPtr = std::shared_ptr<const Block>;

class RowsBlock : public Block {
 public:
  explicit RowsBlock(std::vector<RowPtr> rows) : rows_(std::move(rows)) {}
  int size() const override { return static_cast<int>(rows_.size()); }
  void eval(const VecC& x, double s, int off, VecC& val, MatC* jac, VecC* ds) const override {
    thread_local RowC g;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      Complex d;
      val(off + r) = rows_[r]->eval(x, s, jac ? &g : nullptr, ds ? &d : nullptr);
      if (jac) jac->row(off + r) = g;
      if (ds) (*ds)(off + r) = d;
    }
  }

 private:
  std::vector<RowPtr> rows_;
};

/// Linear combinations `combo` of the closure coordinates of factored loop products.
class ClosureBlock : public Block {
 public:
  ClosureBlock(int nvars, const std::vector<std::vector<LoopFactor>>& loops, MatC combo)
      : nvars_(nvars), combo_(std::move(combo)) {
    for (const auto& loop : loops) {
      std::vector<Factor> f;
      for (const auto& lf : loop) f.push_back({lf.var, convert<Complex>(lf.g), convert<Complex>(lf.hg)});
      loops_.push_back(std::move(f));
    }
    if (combo_.cols() != 6 * static_cast<int>(loops_.size()))
      throw std::invalid_argument("ClosureBlock: combination width must be six per loop");
  }
  int size() const override { return static_cast<int>(combo_.rows()); }

  /// Loop products at x, one per loop.
  std::vector<DQ<Complex>> products(const VecC& x) const {
    std::vector<DQ<Complex>> out;
    for (const auto& loop : loops_) {
      DQ<Complex> p = DQ<Complex>::one();
      for (const auto& f : loop) p = p * factor(f, x);
      out.push_back(p);
    }
    return out;
  }

  void eval(const VecC& x, double, int off, VecC& val, MatC* jac, VecC* ds) const override {
    thread_local VecC c;
    thread_local MatC j;
    thread_local std::vector<DQ<Complex>> pre, suf;
    int nl = static_cast<int>(loops_.size());
    c.resize(6 * nl);
    if (jac) j.setZero(6 * nl, 2 * nvars_);
    for (int l = 0; l < nl; ++l) {
      const auto& loop = loops_[l];
      int m = static_cast<int>(loop.size());
      pre.assign(m + 1, DQ<Complex>::one());
      for (int k = 0; k < m; ++k) pre[k + 1] = pre[k] * factor(loop[k], x);
      for (int a = 0; a < 6; ++a) c(6 * l + a) = pre[m][kClosureCoords[a]];
      if (!jac) continue;
      suf.assign(m + 1, DQ<Complex>::one());
      for (int k = m - 1; k >= 0; --k) suf[k] = factor(loop[k], x) * suf[k + 1];
      for (int k = 0; k < m; ++k) {
        if (loop[k].var < 0) continue;
        DQ<Complex> du = pre[k] * loop[k].g * suf[k + 1];
        DQ<Complex> dv = pre[k] * loop[k].hg * suf[k + 1];
        int v = loop[k].var;
        for (int a = 0; a < 6; ++a) {
          j(6 * l + a, 2 * v) += du[kClosureCoords[a]];
          j(6 * l + a, 2 * v + 1) -= dv[kClosureCoords[a]];
        }
      }
    }
    int m = size();
    val.segment(off, m).noalias() = combo_ * c;
    if (jac) jac->middleRows(off, m).noalias() = combo_ * j;
    if (ds) ds->segment(off, m).setZero();
  }

 private:
  struct Factor {
    int var;
    DQ<Complex> g, hg;
  };
  static DQ<Complex> factor(const Factor& f, const VecC& x) {
    if (f.var < 0) return f.g;
    Complex u = x(2 * f.var), v = x(2 * f.var + 1);
    DQ<Complex> r;
    for (int a = 0; a < 8; ++a) r[a] = u * f.g[a] - v * f.hg[a];
    return r;
  }

  int nvars_;
  std::vector<std::vector<Factor>> loops_;
  MatC combo_;
};

/// Blocks stacked on top of each other.
class ConcatBlock : public Block {
 public:
  explicit ConcatBlock(std::vector<BlockPtr> parts) : parts_(std::move(parts)) {}
  int size() const override {
    int m = 0;
    for (const auto& b : parts_) m += b->size();
    return m;
  }
  void eval(const VecC& x, double s, int off, VecC& val, MatC* jac, VecC* ds) const override {
    for (const auto& b : parts_) {
      b->eval(x, s, off, val, jac, ds);
      off += b->size();
    }
  }

 private:
  std::vector<BlockPtr> parts_;
};

/// gamma (1 - s) start + s target, row by row.
class BlendBlock : public Block {
 public:
  BlendBlock(std::vector<RowPtr> start, BlockPtr target, Complex gamma)
      : start_(std::move(start)), target_(std::move(target)), g_(gamma) {
    if (static_cast<int>(start_.size()) != target_->size())
      throw std::invalid_argument("BlendBlock: start and target sizes differ");
  }
  int size() const override { return target_->size(); }
  void eval(const VecC& x, double s, int off, VecC& val, MatC* jac, VecC* ds) const override {
    thread_local VecC tv;
    thread_local MatC tj;
    thread_local RowC gs;
    int m = size();
    tv.resize(m);
    if (jac) tj.resize(m, x.size());
    target_->eval(x, s, 0, tv, jac ? &tj : nullptr, nullptr);
    for (int r = 0; r < m; ++r) {
      Complex vs = start_[r]->eval(x, s, jac ? &gs : nullptr, nullptr);
      val(off + r) = g_ * (1.0 - s) * vs + s * tv(r);
      if (jac) jac->row(off + r) = g_ * (1.0 - s) * gs + s * tj.row(r);
      if (ds) (*ds)(off + r) = -g_ * vs + tv(r);
    }
  }

 private:
  std::vector<RowPtr> start_;
  BlockPtr target_;
  Complex g_;
};

struct Homotopy {
  int nvars = 0;
  std::vector<BlockPtr> blocks;

  void add(RowPtr r) { blocks.push_back(std::make_shared<RowsBlock>(std::vector<RowPtr>{std::move(r)})); }
  void add(std::vector<RowPtr> rs) { blocks.push_back(std::make_shared<RowsBlock>(std::move(rs))); }
  void add(BlockPtr b) { blocks.push_back(std::move(b)); }

  int dim() const { return 2 * nvars; }
  int rows() const {
    int m = 0;
    for (const auto& b : blocks) m += b->size();
    return m;
  }
  void evaluate(const VecC& x, double s, VecC& h, MatC* hx, VecC* hs) const {
    int m = rows();
    h.resize(m);
    if (hx) hx->resize(m, dim());
    if (hs) hs->resize(m);
    int off = 0;
    for (const auto& b : blocks) {
      b->eval(x, s, off, h, hx, hs);
      off += b->size();
    }
  }
};

struct TrackOptions {
  double initial_step = 0.02;
  double max_step = 0.1;
  double min_step = 1e-13;
  int max_steps = 50000;
  double corrector_tol = 1e-9;
  int max_corrector = 3;
  double divergence = 1e9;
  /// Optional early termination test on accepted points (x, s).
  std::function<bool(const VecC&, double)> stop;
};

enum class PathStatus { Success, StepUnderflow, MaxSteps, Diverged, Stopped };

inline const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Success:
      return "success";
    case PathStatus::StepUnderflow:
      return "step-underflow";
    case PathStatus::MaxSteps:
      return "max-steps";
    case PathStatus::Diverged:
      return "diverged";
    case PathStatus::Stopped:
      return "stopped";
  }
  return "?";
}

struct PathResult {
  VecC x;
  double s = 0;
  PathStatus status = PathStatus::Success;
  int steps = 0;
};

/// Solves J dx = r for square or overdetermined J (least squares).
inline VecC solve_linear(const MatC& j, const VecC& r) {
  if (j.rows() == j.cols()) return j.partialPivLu().solve(r);
  return j.colPivHouseholderQr().solve(r);
}

namespace detail {
inline VecC velocity(const Homotopy& h, const VecC& x, double s) {
  VecC val, hs;
  MatC hx;
  h.evaluate(x, s, val, &hx, &hs);
  return solve_linear(hx, -hs);
}
}  // namespace detail

/// Newton corrector at fixed s. Returns true when the last update is below `tol` (relative).
inline bool newton(const Homotopy& h, VecC& x, double s, int max_iter, double tol, double* last = nullptr) {
  VecC val;
  MatC hx;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    h.evaluate(x, s, val, &hx, nullptr);
    VecC dx = solve_linear(hx, -val);
    if (!dx.allFinite()) return false;
    x += dx;
    double n = dx.norm();
    if (last) *last = n;
    if (n <= tol * (1.0 + x.norm())) return true;
    if (it > 0 && n > 0.5 * prev) return false;
    prev = n;
  }
  return false;
}

/// Predictor-corrector path tracking from s0 to s1 (RK4 predictor, Newton corrector).
inline PathResult track(const Homotopy& h, VecC x, double s0, double s1, const TrackOptions& opt = {}) {
  PathResult res;
  double s = s0, step = opt.initial_step * (s1 - s0);
  int good = 0;
  const double dir = s1 > s0 ? 1.0 : -1.0;
  step = std::abs(step);
  for (res.steps = 0; res.steps < opt.max_steps; ++res.steps) {
    double remaining = (s1 - s) * dir;
    if (remaining <= 0) break;
    double hstep = std::min(step, remaining) * dir;
    VecC k1 = detail::velocity(h, x, s);
    VecC k2 = detail::velocity(h, x + 0.5 * hstep * k1, s + 0.5 * hstep);
    VecC k3 = detail::velocity(h, x + 0.5 * hstep * k2, s + 0.5 * hstep);
    VecC k4 = detail::velocity(h, x + hstep * k3, s + hstep);
    VecC xp = x + hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    bool ok = xp.allFinite() && newton(h, xp, s + hstep, opt.max_corrector, opt.corrector_tol);
    if (ok) {
      x = xp;
      s += hstep;
      if (x.norm() > opt.divergence) {
        res.status = PathStatus::Diverged;
        break;
      }
      if (opt.stop && opt.stop(x, s)) {
        res.status = PathStatus::Stopped;
        break;
      }
      if (++good >= 3) {
        step = std::min(step * 2.0, opt.max_step);
        good = 0;
      }
    } else {
      step *= 0.5;
      good = 0;
      if (step < opt.min_step) {
        res.status = PathStatus::StepUnderflow;
        break;
      }
    }
  }
  if (res.steps >= opt.max_steps) res.status = PathStatus::MaxSteps;
  res.x = x;
  res.s = s;
  return res;
}

/// Worker count from BONDFORGE_THREADS (default: hardware concurrency).
inline int thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BONDFORGE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on a small pool; results must be written by index.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  for (auto& th : pool) th.join();
}

/// Start solutions of a linear-product system: every row picks one factor, each variable exactly once.
inline std::vector<VecC> product_start_solutions(int nvars, const std::vector<std::shared_ptr<const ProductRow>>& rows,
                                                 const std::vector<std::shared_ptr<const ChartRow>>& charts) {
  std::vector<VecC> out;
  int m = static_cast<int>(rows.size());
  std::vector<const LinForm*> pick(nvars, nullptr);
  std::vector<Complex> ca(nvars), cb(nvars);
  for (const auto& c : charts) {
    ca[c->var()] = c->a();
    cb[c->var()] = c->b();
  }
  std::function<void(int)> rec = [&](int r) {
    if (r == m) {
      VecC x(2 * nvars);
      for (int k = 0; k < nvars; ++k) {
        // [a b; ca cb] (u, v) = (0, 1)
        Complex a = pick[k]->a, b = pick[k]->b;
        Complex det = a * cb[k] - b * ca[k];
        x(2 * k) = -b / det;
        x(2 * k + 1) = a / det;
      }
      out.push_back(x);
      return;
    }
    for (const auto& f : rows[r]->factors()) {
      if (pick[f.var]) continue;
      pick[f.var] = &f;
      rec(r + 1);
      pick[f.var] = nullptr;
    }
  };
  rec(0);
  return out;
}

inline Complex random_unit_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.0, 2.0 * M_PI);
  return std::polar(1.0, ud(rng));
}

inline Complex random_gaussian_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  return {nd(rng), nd(rng)};
}

}  // namespace bondforge::numeric
