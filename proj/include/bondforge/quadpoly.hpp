#pragma once

#include "bondforge/coupling.hpp"

#include <array>
#include <map>
#include <optional>
#include <utility>

namespace bondforge {

struct CbParams {
  Rational c;
  std::optional<Rational> b;
};

inline CbParams cb_params(const ProjectiveParam<Rational>& w, const Rational& d) {
  auto [c, b] = link_cb(w, d);
  return {c, b};
}

inline CbParams cb_params(const Rational& w, const Rational& d) { return cb_params(ProjectiveParam<Rational>::finite(w), d); }

/// Quadratic x^2 + a1 x + a0 over Q(i) attached to joint i and sign ±.
struct QuadPolynomial {
  int joint = 0;
  int sign = 1;
  /// Coefficients of x^0, x^1, x^2.
  std::array<GaussRational, 3> coeffs;

  UPoly<GaussRational> poly() const { return UPoly<GaussRational>(std::vector<GaussRational>(coeffs.begin(), coeffs.end())); }
  UPoly<Complex> complex_poly() const { return to_complex_poly(poly()); }
};

namespace detail {

/// The quadratic for the shifted index window (s, b, c at positions 1, 2, 3).
inline std::array<GaussRational, 3> quad_coefficients(const Rational& s1, const Rational& s2, const Rational& s3,
                                                      const Rational& b1, const Rational& b2, const Rational& b3,
                                                      const Rational& c1, const Rational& c2, const Rational& c3) {
  const GaussRational I = GaussRational::i();
  GaussRational a = GaussRational((b3 * c3 - b1 * c1) / 2) - GaussRational(s1 / 2) * I;
  GaussRational k = a * a + I * GaussRational((b1 * s2 + b3 * s3 + s2 * b3 * c2 + s3 * b1 * c2) / 2) -
                    GaussRational((b1 * b3 * c2 - s2 * s3 * c2) / 2) +
                    GaussRational((s2 * s2 + s3 * s3 - b1 * b1 + b2 * b2 - b3 * b3 - b2 * b2 * c2 * c2) / 4);
  return {k, GaussRational(2) * a, GaussRational(1)};
}

}  // namespace detail

/// Q_i^± for a revolute 6-loop (0-based i). For the minus sign all c, b and the offsets of the even
/// joints (second, fourth, sixth) are negated first, then indices are shifted cyclically to i.
inline QuadPolynomial quad_polynomial(const DHInvariants& inv, int i, int sign) {
  if (inv.c.size() != 6) throw InputError("joints", "quad polynomials need a 6R loop");
  if (i < 0 || i >= 6) throw InputError("joint", "joint index out of range");
  std::array<Rational, 6> s, b, c;
  for (int k = 0; k < 6; ++k) {
    if (!inv.b[k] || !inv.s[k])
      throw InputError("joints[" + std::to_string(k) + "]",
                       "quad polynomials need finite b and s (no parallel neighbouring axes at nonzero distance)");
    s[k] = *inv.s[k];
    b[k] = *inv.b[k];
    c[k] = inv.c[k];
    if (sign < 0) {
      b[k] = -b[k];
      c[k] = -c[k];
      if (k % 2 == 1) s[k] = -s[k];
    }
  }
  auto at = [&](const std::array<Rational, 6>& v, int off) { return v[(i + off) % 6]; };
  QuadPolynomial q;
  q.joint = i;
  q.sign = sign < 0 ? -1 : 1;
  q.coeffs = detail::quad_coefficients(at(s, 0), at(s, 1), at(s, 2), at(b, 0), at(b, 1), at(b, 2), at(c, 0), at(c, 1), at(c, 2));
  return q;
}

inline QuadPolynomial quad_polynomial(const Linkage& l, int i, int sign) {
  if (l.size() != 6) throw InputError("joints", "quad polynomials need a 6R loop");
  return quad_polynomial(dh_invariants(l), i, sign);
}

/// Degree of gcd(p, q) for two monic quadratics: 2 if equal, 1 if the resultant vanishes, else 0.
inline int gcd_degree(const UPoly<GaussRational>& p, const UPoly<GaussRational>& q) {
  if (p.degree() != 2 || q.degree() != 2) throw InputError("polynomial", "gcd_degree expects quadratics");
  auto pm = p.monic(), qm = q.monic();
  if (pm == qm) return 2;
  return resultant(pm, qm).is_zero() ? 1 : 0;
}

inline int gcd_degree(const QuadPolynomial& p, const QuadPolynomial& q) { return gcd_degree(p.poly(), q.poly()); }

/// Float variant: both quadratics scaled to unit coefficient norm; |res| < tol counts as zero.
inline int gcd_degree_float(const UPoly<Complex>& p, const UPoly<Complex>& q, double tol = 1e-8) {
  if (p.degree() != 2 || q.degree() != 2) throw InputError("polynomial", "gcd_degree expects quadratics");
  auto unit = [](const UPoly<Complex>& a) {
    double n = 0;
    for (int k = 0; k <= 2; ++k) n += std::norm(a.coeff(k));
    return Complex(1.0 / std::sqrt(n)) * a;
  };
  auto pm = p.monic(), qm = q.monic();
  double diff = 0;
  for (int k = 0; k <= 2; ++k) diff = std::max(diff, std::abs(pm.coeff(k) - qm.coeff(k)));
  if (diff < tol) return 2;
  return std::abs(resultant(unit(p), unit(q))) < tol ? 1 : 0;
}

struct ConnectionBound {
  std::pair<int, int> joints;
  int plus = 0, minus = 0;
  int bound() const { return plus + minus; }
};

/// Bounds on the number of bond connections of the opposite joint pairs (i, i+3) of a 6R loop.
inline std::vector<ConnectionBound> connection_bound(const Linkage& l) {
  if (l.size() != 6) throw InputError("joints", "connection bounds need a 6R loop");
  auto inv = dh_invariants(l);
  std::vector<ConnectionBound> out;
  for (int i = 0; i < 3; ++i) {
    ConnectionBound cb;
    cb.joints = {i, i + 3};
    cb.plus = gcd_degree(quad_polynomial(inv, i, 1), quad_polynomial(inv, i + 3, 1));
    cb.minus = gcd_degree(quad_polynomial(inv, i, -1), quad_polynomial(inv, i + 3, -1));
    out.push_back(cb);
  }
  return out;
}

}  // namespace bondforge
