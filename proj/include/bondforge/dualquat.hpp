#pragma once

#include "bondforge/scalar.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace bondforge {

template <class S>
struct Quaternion {
  S w{0}, x{0}, y{0}, z{0};

  Quaternion() = default;
  Quaternion(S w_, S x_, S y_, S z_) : w(std::move(w_)), x(std::move(x_)), y(std::move(y_)), z(std::move(z_)) {}

  static Quaternion real(S v) { return {std::move(v), S(0), S(0), S(0)}; }
  static Quaternion pure(S x_, S y_, S z_) { return {S(0), std::move(x_), std::move(y_), std::move(z_)}; }

  Quaternion conj() const { return {w, -x, -y, -z}; }
  /// Sum of squares of the coordinates; not a modulus for complex scalars.
  S norm() const { return w * w + x * x + y * y + z * z; }
  bool is_pure() const { return is_zero(w); }

  Quaternion operator-() const { return {-w, -x, -y, -z}; }
  friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }
  friend Quaternion operator*(const S& s, const Quaternion& a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Quaternion& a, const Quaternion& b) {
    return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
  }
};

template <class S>
struct DualNumber {
  S real{0}, eps{0};
  friend bool operator==(const DualNumber& a, const DualNumber& b) { return a.real == b.real && a.eps == b.eps; }
};

/// Dual quaternion with coordinates in the basis (1, i, j, k, ε, εi, εj, εk).
template <class S>
class DualQuaternion {
 public:
  DualQuaternion() { c_.fill(S(0)); }
  explicit DualQuaternion(std::array<S, 8> c) : c_(std::move(c)) {}
  DualQuaternion(const Quaternion<S>& p, const Quaternion<S>& q) : c_{p.w, p.x, p.y, p.z, q.w, q.x, q.y, q.z} {}

  static DualQuaternion scalar(S v) {
    DualQuaternion h;
    h.c_[0] = std::move(v);
    return h;
  }
  static DualQuaternion one() { return scalar(S(1)); }
  static DualQuaternion basis(int idx) {
    DualQuaternion h;
    h.c_.at(idx) = S(1);
    return h;
  }
  static DualQuaternion i() { return basis(1); }
  static DualQuaternion j() { return basis(2); }
  static DualQuaternion k() { return basis(3); }
  static DualQuaternion eps() { return basis(4); }

  const S& operator[](int idx) const { return c_[idx]; }
  S& operator[](int idx) { return c_[idx]; }
  const std::array<S, 8>& coords() const { return c_; }

  Quaternion<S> primal() const { return {c_[0], c_[1], c_[2], c_[3]}; }
  Quaternion<S> dual() const { return {c_[4], c_[5], c_[6], c_[7]}; }

  /// Quaternion conjugation on both parts (i, j, k negated).
  DualQuaternion conj() const {
    return DualQuaternion({c_[0], -c_[1], -c_[2], -c_[3], c_[4], -c_[5], -c_[6], -c_[7]});
  }

  bool is_zero_dq(double tol = kDefaultTol) const {
    for (const auto& v : c_)
      if (!bondforge::is_zero(v, tol)) return false;
    return true;
  }

  DualQuaternion operator-() const {
    DualQuaternion r;
    for (int a = 0; a < 8; ++a) r.c_[a] = -c_[a];
    return r;
  }
  DualQuaternion& operator+=(const DualQuaternion& o) {
    for (int a = 0; a < 8; ++a) c_[a] += o.c_[a];
    return *this;
  }
  DualQuaternion& operator-=(const DualQuaternion& o) {
    for (int a = 0; a < 8; ++a) c_[a] -= o.c_[a];
    return *this;
  }
  friend DualQuaternion operator+(DualQuaternion a, const DualQuaternion& b) { return a += b; }
  friend DualQuaternion operator-(DualQuaternion a, const DualQuaternion& b) { return a -= b; }
  friend DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b) {
    Quaternion<S> p1 = a.primal(), q1 = a.dual(), p2 = b.primal(), q2 = b.dual();
    return {p1 * p2, p1 * q2 + q1 * p2};
  }
  friend DualQuaternion operator*(const S& s, const DualQuaternion& a) {
    DualQuaternion r;
    for (int k = 0; k < 8; ++k) r.c_[k] = s * a.c_[k];
    return r;
  }
  friend bool operator==(const DualQuaternion& a, const DualQuaternion& b) { return a.c_ == b.c_; }
  friend bool operator!=(const DualQuaternion& a, const DualQuaternion& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const DualQuaternion& h) {
    os << "[";
    for (int k = 0; k < 8; ++k) os << (k ? ", " : "") << h.c_[k];
    return os << "]";
  }

 private:
  std::array<S, 8> c_;
};

template <class S>
using DQ = DualQuaternion<S>;

/// h * conj(h) = p p̄ + ε (p q̄ + q p̄).
template <class S>
DualNumber<S> norm(const DualQuaternion<S>& h) {
  const auto& c = h.coords();
  S real = c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
  S eps = S(2) * (c[0] * c[4] + c[1] * c[5] + c[2] * c[6] + c[3] * c[7]);
  return {real, eps};
}

template <class S>
double max_abs(const DualQuaternion<S>& h) {
  double m = 0;
  for (const auto& v : h.coords()) m = std::max(m, magnitude(v));
  return m;
}

/// Complex copy scaled so that the largest coordinate has modulus one.
template <class S>
DualQuaternion<Complex> normalized_complex(const DualQuaternion<S>& h) {
  DualQuaternion<Complex> r;
  double m = max_abs(h);
  for (int a = 0; a < 8; ++a) r[a] = to_complex(h[a]) / (m > 0 ? m : 1.0);
  return r;
}

template <class S>
bool is_on_study_quadric(const DualQuaternion<S>& h, double tol = kDefaultTol) {
  if constexpr (is_exact_v<S>) {
    return norm(h).eps == S(0);
  } else {
    return std::abs(to_complex(norm(normalized_complex(h)).eps)) <= tol;
  }
}

template <class S>
bool is_on_null_cone(const DualQuaternion<S>& h, double tol = kDefaultTol) {
  if constexpr (is_exact_v<S>) {
    return norm(h).real == S(0);
  } else {
    return std::abs(to_complex(norm(normalized_complex(h)).real)) <= tol;
  }
}

template <class T, class S>
DualQuaternion<T> convert(const DualQuaternion<S>& h) {
  DualQuaternion<T> r;
  for (int a = 0; a < 8; ++a) {
    if constexpr (std::is_same_v<T, Complex>) {
      r[a] = to_complex(h[a]);
    } else {
      r[a] = T(h[a]);
    }
  }
  return r;
}

/// Homogeneous parameter (u : v) on P^1, t = u / v; (1 : 0) is infinity.
template <class S>
struct ProjectiveParam {
  S u{1}, v{0};

  static ProjectiveParam infinity() { return {S(1), S(0)}; }
  static ProjectiveParam finite(S t) { return {std::move(t), S(1)}; }

  bool is_infinite(double tol = kDefaultTol) const {
    if constexpr (is_exact_v<S>) {
      return v == S(0);
    } else {
      double m = std::max(magnitude(u), magnitude(v));
      return magnitude(v) <= tol * m;
    }
  }
  /// Value t = u/v; only meaningful when finite.
  S value() const { return u / v; }
};

template <class S>
bool same_point(const ProjectiveParam<S>& a, const ProjectiveParam<S>& b, double tol = kDefaultTol) {
  if constexpr (is_exact_v<S>) {
    return a.u * b.v == a.v * b.u;
  } else {
    Complex au = to_complex(a.u), av = to_complex(a.v), bu = to_complex(b.u), bv = to_complex(b.v);
    double na = std::sqrt(std::norm(au) + std::norm(av)), nb = std::sqrt(std::norm(bu) + std::norm(bv));
    return std::abs(au * bv - av * bu) <= tol * na * nb;
  }
}

/// Chordal distance between two points of P^1 (0 for equal, at most 1).
inline double chordal_distance(const ProjectiveParam<Complex>& a, const ProjectiveParam<Complex>& b) {
  double na = std::sqrt(std::norm(a.u) + std::norm(a.v)), nb = std::sqrt(std::norm(b.u) + std::norm(b.v));
  if (na == 0 || nb == 0) return 1.0;
  return std::abs(a.u * b.v - a.v * b.u) / (na * nb);
}

/// Equivalence class of a nonzero dual quaternion under nonzero scalar multiples.
template <class S>
struct PoseClass {
  DualQuaternion<S> rep;

  bool represents_displacement(double tol = kDefaultTol) const {
    return !rep.is_zero_dq(tol) && is_on_study_quadric(rep, tol) && !is_on_null_cone(rep, tol);
  }

  friend bool operator==(const PoseClass& a, const PoseClass& b) { return proportional(a.rep, b.rep); }
};

template <class S>
bool proportional(const DualQuaternion<S>& a, const DualQuaternion<S>& b, double tol = kDefaultTol) {
  if constexpr (is_exact_v<S>) {
    if (a.is_zero_dq() || b.is_zero_dq()) return a.is_zero_dq() && b.is_zero_dq();
    for (int r = 0; r < 8; ++r)
      for (int s = r + 1; s < 8; ++s)
        if (a[r] * b[s] != a[s] * b[r]) return false;
    return true;
  } else {
    auto x = normalized_complex(a), y = normalized_complex(b);
    if (x.is_zero_dq(0) || y.is_zero_dq(0)) return x.is_zero_dq(0) && y.is_zero_dq(0);
    for (int r = 0; r < 8; ++r)
      for (int s = r + 1; s < 8; ++s)
        if (std::abs(x[r] * y[s] - x[s] * y[r]) > tol) return false;
    return true;
  }
}

/// Rotation class [u - v h] about the line h (h^2 = -1).
template <class S>
PoseClass<S> rotation_element(const DualQuaternion<S>& h, const ProjectiveParam<S>& t, double tol = kDefaultTol) {
  DualQuaternion<S> sq = h * h + DualQuaternion<S>::one();
  if (!sq.is_zero_dq(tol)) throw std::invalid_argument("rotation_element: axis must satisfy h^2 = -1");
  return {DualQuaternion<S>::scalar(t.u) - t.v * h};
}

/// Translation class [1 - ε dir t]; translates points by 2 t dir.
template <class S>
PoseClass<S> translation_element(const Quaternion<S>& dir, const S& t, double tol = kDefaultTol) {
  if (!is_zero(dir.w, tol) || !is_zero(S(dir.norm() - S(1)), tol))
    throw std::invalid_argument("translation_element: direction must be a pure unit quaternion");
  Quaternion<S> zero;
  return {DualQuaternion<S>(Quaternion<S>::real(S(1)), S(-t) * dir)};
}

template <class S>
using Vec3 = std::array<S, 3>;

/// Line through `point` with direction `dir` (|dir| = 1) as the dual quaternion dir + ε (dir × point).
template <class S>
DualQuaternion<S> line_axis(const Vec3<S>& dir, const Vec3<S>& point) {
  Vec3<S> m{dir[1] * point[2] - dir[2] * point[1], dir[2] * point[0] - dir[0] * point[2],
            dir[0] * point[1] - dir[1] * point[0]};
  return DualQuaternion<S>({S(0), dir[0], dir[1], dir[2], S(0), m[0], m[1], m[2]});
}

/// Action x -> p x p̄ / (p p̄) - 2 q p̄ / (p p̄) of a pose class on a point.
template <class S>
Vec3<S> act_on_point(const PoseClass<S>& g, const Vec3<S>& x) {
  static_assert(!scalar_traits<S>::has_imag, "act_on_point needs real scalars");
  Quaternion<S> p = g.rep.primal(), q = g.rep.dual();
  S n = p.norm();
  if (is_zero(n)) throw std::domain_error("act_on_point: pose lies on the null cone");
  if (!is_on_study_quadric(g.rep)) throw std::domain_error("act_on_point: not on the Study quadric");
  Quaternion<S> xq = Quaternion<S>::pure(x[0], x[1], x[2]);
  Quaternion<S> r = p * xq * p.conj();
  Quaternion<S> tr = q * p.conj();
  return {r.x / n - S(2) * tr.x / n, r.y / n - S(2) * tr.y / n, r.z / n - S(2) * tr.z / n};
}

}  // namespace bondforge
