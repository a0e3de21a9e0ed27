#pragma once

#include "bondforge/scalar.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace bondforge {

/// Exponent vector with trailing zeros removed, so constants have an empty vector.
using Exponents = std::vector<std::uint8_t>;

inline void trim(Exponents& e) {
  while (!e.empty() && e.back() == 0) e.pop_back();
}

/// Sparse multivariate polynomial.
template <class S>
class Polynomial {
 public:
  using Terms = std::map<Exponents, S>;

  Polynomial() = default;
  Polynomial(int c) {
    if (c != 0) terms_[{}] = S(c);
  }
  static Polynomial constant(const S& c) {
    Polynomial p;
    if (!bondforge::is_zero(c, 0.0)) p.terms_[{}] = c;
    return p;
  }
  static Polynomial variable(int idx) {
    Polynomial p;
    Exponents e(idx + 1, 0);
    e[idx] = 1;
    p.terms_[e] = S(1);
    return p;
  }
  static Polynomial monomial(Exponents e, const S& c) {
    trim(e);
    Polynomial p;
    if (!bondforge::is_zero(c, 0.0)) p.terms_[std::move(e)] = c;
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  int degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms_)
      if (var < static_cast<int>(e.size())) d = std::max<int>(d, e[var]);
    return d;
  }
  int num_vars() const {
    int n = 0;
    for (const auto& [e, c] : terms_) n = std::max<int>(n, static_cast<int>(e.size()));
    return n;
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        Exponents e(std::max(ea.size(), eb.size()), 0);
        for (std::size_t k = 0; k < ea.size(); ++k) e[k] += ea[k];
        for (std::size_t k = 0; k < eb.size(); ++k) e[k] += eb[k];
        r.add_term(e, ca * cb);
      }
    return r;
  }
  friend Polynomial operator*(const S& s, const Polynomial& a) {
    Polynomial r;
    if (bondforge::is_zero(s, 0.0)) return r;
    for (const auto& [e, c] : a.terms_) r.terms_[e] = s * c;
    return r;
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  /// Evaluates at a point given in any scalar type constructible from S via `conv`.
  template <class T, class Conv>
  T eval(const std::vector<T>& x, Conv conv) const {
    T sum = T(0);
    for (const auto& [e, c] : terms_) {
      T m = conv(c);
      for (std::size_t k = 0; k < e.size(); ++k)
        for (int p = 0; p < e[k]; ++p) m = m * x[k];
      sum = sum + m;
    }
    return sum;
  }
  S eval(const std::vector<S>& x) const {
    return eval<S>(x, [](const S& c) { return c; });
  }

  /// Substitutes var = u / v, homogenized with this polynomial's own degree in var, and removes
  /// the variable (later variables move down by one).
  Polynomial substitute(int var, const S& u, const S& v) const {
    int d = degree_in(var);
    Polynomial r;
    for (const auto& [e, c] : terms_) {
      int a = var < static_cast<int>(e.size()) ? e[var] : 0;
      S f = c;
      for (int p = 0; p < a; ++p) f = f * u;
      for (int p = a; p < d; ++p) f = f * v;
      Exponents ne;
      for (std::size_t k = 0; k < e.size(); ++k)
        if (static_cast<int>(k) != var) ne.push_back(e[k]);
      r.add_term(trimmed(ne), f);
    }
    return r;
  }

  template <class T, class Conv>
  Polynomial<T> map_coeffs(Conv conv) const {
    Polynomial<T> r;
    for (const auto& [e, c] : terms_) r += Polynomial<T>::monomial(e, conv(c));
    return r;
  }

  std::string to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << "(" << it->second << ")";
      for (std::size_t k = 0; k < it->first.size(); ++k) {
        if (it->first[k] == 0) continue;
        os << "*" << names.at(k);
        if (it->first[k] > 1) os << "^" << int(it->first[k]);
      }
    }
    return os.str();
  }

 private:
  static Exponents trimmed(Exponents e) {
    trim(e);
    return e;
  }
  void add_term(const Exponents& e, const S& c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!bondforge::is_zero(c, 0.0)) terms_.emplace(e, c);
      return;
    }
    it->second += c;
    if (bondforge::is_zero(it->second, 0.0)) terms_.erase(it);
  }

  Terms terms_;
};

/// Dense univariate polynomial, c[k] is the coefficient of x^k.
template <class S>
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<S> c) : c_(std::move(c)) { trim(); }
  UPoly(int c) {
    if (c != 0) c_.push_back(S(c));
  }
  static UPoly constant(const S& c) { return UPoly(std::vector<S>{c}); }
  static UPoly x() { return UPoly(std::vector<S>{S(0), S(1)}); }

  const std::vector<S>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  S coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : S(0); }
  const S& lead() const { return c_.back(); }

  S eval(const S& x) const {
    S r(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }
  template <class T, class Conv>
  T eval(const T& x, Conv conv) const {
    T r(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + conv(*it);
    return r;
  }

  UPoly derivative() const {
    std::vector<S> d;
    for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(S(static_cast<int>(k)) * c_[k]);
    return UPoly(d);
  }

  /// Coefficients of p(a + x).
  UPoly taylor_shift(const S& a) const {
    std::vector<S> c = c_;
    int n = static_cast<int>(c.size());
    for (int k = 0; k < n; ++k)
      for (int j = n - 2; j >= k; --j) c[j] = c[j] + a * c[j + 1];
    return UPoly(c);
  }

  UPoly operator-() const {
    std::vector<S> c = c_;
    for (auto& v : c) v = -v;
    return UPoly(c);
  }
  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<S> c(std::max(a.c_.size(), b.c_.size()), S(0));
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] = c[k] + a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] = c[k] + b.c_[k];
    return UPoly(c);
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) { return a + (-b); }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<S> c(a.c_.size() + b.c_.size() - 1, S(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] = c[i + j] + a.c_[i] * b.c_[j];
    return UPoly(c);
  }
  friend UPoly operator*(const S& s, const UPoly& a) {
    std::vector<S> c = a.c_;
    for (auto& v : c) v = s * v;
    return UPoly(c);
  }
  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }

  /// Euclidean division for exact fields.
  static std::pair<UPoly, UPoly> divmod(UPoly a, const UPoly& b) {
    if (b.is_zero()) throw std::domain_error("UPoly: division by zero polynomial");
    std::vector<S> q(std::max(0, a.degree() - b.degree() + 1), S(0));
    while (!a.is_zero() && a.degree() >= b.degree()) {
      int sh = a.degree() - b.degree();
      S f = a.lead() / b.lead();
      q[sh] = f;
      std::vector<S> c = a.c_;
      for (int k = 0; k <= b.degree(); ++k) c[k + sh] = c[k + sh] - f * b.c_[k];
      c.pop_back();
      a = UPoly(c);
    }
    return {UPoly(q), a};
  }

  UPoly monic() const {
    if (is_zero()) return *this;
    S l = lead();
    std::vector<S> c = c_;
    for (auto& v : c) v = v / l;
    return UPoly(c);
  }

 private:
  void trim() {
    while (!c_.empty() && bondforge::is_zero(c_.back(), 0.0)) c_.pop_back();
  }
  std::vector<S> c_;
};

/// Monic gcd over an exact field.
template <class S>
UPoly<S> gcd(UPoly<S> a, UPoly<S> b) {
  static_assert(is_exact_v<S>, "exact gcd only");
  while (!b.is_zero()) {
    auto r = UPoly<S>::divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Vanishing order of a polynomial at x = 0 (exact), -1 for the zero polynomial.
template <class S>
int order_at_zero(const UPoly<S>& p) {
  for (int k = 0; k <= p.degree(); ++k)
    if (!is_zero(p.coeff(k), 0.0)) return k;
  return -1;
}

/// Exact determinant by fraction-based Gaussian elimination.
template <class S>
S determinant(std::vector<std::vector<S>> m) {
  int n = static_cast<int>(m.size());
  S det(1);
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!is_zero(m[r][col], 0.0)) {
        piv = r;
        break;
      }
    if (piv < 0) return S(0);
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det = det * m[col][col];
    for (int r = col + 1; r < n; ++r) {
      if (is_zero(m[r][col], 0.0)) continue;
      S f = m[r][col] / m[col][col];
      for (int c = col; c < n; ++c) m[r][c] = m[r][c] - f * m[col][c];
    }
  }
  return det;
}

/// Exact rank of a list of row vectors.
template <class S>
int exact_rank(std::vector<std::vector<S>> rows) {
  if (rows.empty()) return 0;
  int ncol = static_cast<int>(rows[0].size());
  int rank = 0;
  for (int col = 0; col < ncol && rank < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (!is_zero(rows[r][col], 0.0)) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || is_zero(rows[r][col], 0.0)) continue;
      S f = rows[r][col] / rows[rank][col];
      for (int c = col; c < ncol; ++c) rows[r][c] = rows[r][c] - f * rows[rank][c];
    }
    ++rank;
  }
  return rank;
}

/// Basis of the right nullspace of a matrix given by rows with `ncols` columns (exact).
template <class S>
std::vector<std::vector<S>> exact_nullspace(std::vector<std::vector<S>> rows, int ncols) {
  std::vector<int> pivot_col;
  int rank = 0;
  for (int col = 0; col < ncols && rank < static_cast<int>(rows.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(rows.size()); ++r)
      if (!is_zero(rows[r][col], 0.0)) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[piv], rows[rank]);
    S inv = S(1) / rows[rank][col];
    for (int c = col; c < ncols; ++c) rows[rank][c] = rows[rank][c] * inv;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) {
      if (r == rank || is_zero(rows[r][col], 0.0)) continue;
      S f = rows[r][col];
      for (int c = col; c < ncols; ++c) rows[r][c] = rows[r][c] - f * rows[rank][c];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<std::vector<S>> basis;
  for (int free = 0; free < ncols; ++free) {
    if (std::find(pivot_col.begin(), pivot_col.end(), free) != pivot_col.end()) continue;
    std::vector<S> v(ncols, S(0));
    v[free] = S(1);
    for (int r = 0; r < rank; ++r) v[pivot_col[r]] = -rows[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Numerical rank with singular values relative to the largest one.
inline int numeric_rank(const Eigen::MatrixXcd& m, double rel_tol = 1e-9) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0) return 0;
  int r = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > rel_tol * sv(0)) ++r;
  return r;
}

/// Sylvester resultant of two univariate polynomials.
template <class S>
S resultant(const UPoly<S>& p, const UPoly<S>& q) {
  int m = p.degree(), n = q.degree();
  if (m < 0 || n < 0) return S(0);
  if (m == 0 && n == 0) return S(1);
  int size = m + n;
  std::vector<std::vector<S>> syl(size, std::vector<S>(size, S(0)));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) syl[r][r + k] = p.coeff(m - k);
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) syl[n + r][r + k] = q.coeff(n - k);
  return determinant(syl);
}

/// Complex roots via the companion matrix followed by Newton polishing.
inline std::vector<Complex> roots(const UPoly<Complex>& p) {
  int n = p.degree();
  if (n <= 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < n; ++k) comp(0, k) = -p.coeff(n - 1 - k) / p.lead();
  for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  std::vector<Complex> r;
  UPoly<Complex> dp = p.derivative();
  for (int k = 0; k < n; ++k) {
    Complex z = es.eigenvalues()(k);
    for (int it = 0; it < 20; ++it) {
      Complex d = dp.eval(z);
      if (std::abs(d) == 0) break;
      Complex step = p.eval(z) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      z -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
    }
    r.push_back(z);
  }
  std::sort(r.begin(), r.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return r;
}

template <class S>
UPoly<Complex> to_complex_poly(const UPoly<S>& p) {
  std::vector<Complex> c;
  for (const auto& v : p.coeffs()) c.push_back(to_complex(v));
  return UPoly<Complex>(c);
}

}  // namespace bondforge
