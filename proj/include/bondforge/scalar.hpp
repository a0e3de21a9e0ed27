#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bondforge {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;
using Complex = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;

/// Element of Q(i).
class GaussRational {
 public:
  GaussRational() = default;
  GaussRational(int v) : re_(v) {}
  GaussRational(Rational re, Rational im = Rational(0)) : re_(std::move(re)), im_(std::move(im)) {}

  static GaussRational i() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  GaussRational conj() const { return {re_, -im_}; }
  Rational abs2() const { return re_ * re_ + im_ * im_; }
  bool is_zero() const { return re_ == 0 && im_ == 0; }

  GaussRational operator-() const { return {-re_, -im_}; }
  GaussRational& operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    Rational n = o.abs2();
    if (n == 0) throw std::domain_error("GaussRational: division by zero");
    *this *= o.conj();
    re_ /= n;
    im_ /= n;
    return *this;
  }
  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GaussRational& z) {
    if (z.im_ == 0) return os << z.re_;
    if (z.re_ != 0) os << z.re_ << (z.im_ > 0 ? "+" : "");
    if (z.im_ == 1) return os << "i";
    if (z.im_ == -1) return os << "-i";
    return os << z.im_ << "i";
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr bool has_imag = false;
  static Complex to_complex(double x) { return {x, 0.0}; }
  static double magnitude(double x) { return std::abs(x); }
  static bool is_zero(double x, double tol) { return std::abs(x) <= tol; }
};

template <>
struct scalar_traits<Complex> {
  static constexpr bool exact = false;
  static constexpr bool has_imag = true;
  static Complex imag_unit() { return {0.0, 1.0}; }
  static Complex to_complex(const Complex& x) { return x; }
  static double magnitude(const Complex& x) { return std::abs(x); }
  static bool is_zero(const Complex& x, double tol) { return std::abs(x) <= tol; }
  static Complex conj(const Complex& x) { return std::conj(x); }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr bool has_imag = false;
  static Complex to_complex(const Rational& x) { return {x.convert_to<double>(), 0.0}; }
  static double magnitude(const Rational& x) { return std::abs(x.convert_to<double>()); }
  static bool is_zero(const Rational& x, double) { return x == 0; }
};

template <>
struct scalar_traits<GaussRational> {
  static constexpr bool exact = true;
  static constexpr bool has_imag = true;
  static GaussRational imag_unit() { return GaussRational::i(); }
  static Complex to_complex(const GaussRational& x) {
    return {x.re().convert_to<double>(), x.im().convert_to<double>()};
  }
  static double magnitude(const GaussRational& x) { return std::abs(to_complex(x)); }
  static bool is_zero(const GaussRational& x, double) { return x.is_zero(); }
  static GaussRational conj(const GaussRational& x) { return x.conj(); }
};

template <class S>
inline constexpr bool is_exact_v = scalar_traits<S>::exact;

template <class S>
Complex to_complex(const S& x) {
  return scalar_traits<S>::to_complex(x);
}

template <class S>
bool is_zero(const S& x, double tol = kDefaultTol) {
  return scalar_traits<S>::is_zero(x, tol);
}

template <class S>
double magnitude(const S& x) {
  return scalar_traits<S>::magnitude(x);
}

/// Parses "p/q", integers and decimal strings such as "-1.25" or "3e-2" exactly.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text) + "'");
  };
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  s = s.substr(b);
  if (s.empty()) return fail();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational p = parse_rational(s.substr(0, slash));
    Rational q = parse_rational(s.substr(slash + 1));
    if (q == 0) return fail();
    return p / q;
  }
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
  Integer mant = 0;
  int scale = 0;
  bool digits = false, dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mant = mant * 10 + (c - '0');
      digits = true;
      if (dot) --scale;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!digits) return fail();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') return fail();
    ++pos;
    std::size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(s.substr(pos), &used);
    } catch (...) {
      return fail();
    }
    if (pos + used != s.size() || used == 0) return fail();
    scale += e;
  }
  Rational r(mant);
  Integer ten = 1;
  for (int k = 0; k < std::abs(scale); ++k) ten *= 10;
  if (scale > 0) r *= Rational(ten);
  if (scale < 0) r /= Rational(ten);
  return neg ? Rational(-r) : r;
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

/// Exact rational value of a double (every finite double is a dyadic rational).
inline Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exact_rational: non-finite value");
  int e = 0;
  double m = std::frexp(x, &e);
  auto mi = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  Rational r{Integer(mi)};
  Integer p = 1;
  p <<= std::abs(e);
  return e >= 0 ? Rational(r * Rational(p)) : Rational(r / Rational(p));
}

/// Best continued-fraction approximation p/q of x with q <= max_den and |x - p/q| <= tol.
template <class F>
std::optional<Rational> rationalize(const F& x, const Integer& max_den, const F& tol) {
  using std::abs;
  using std::floor;
  Integer h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  F y = x;
  for (int iter = 0; iter < 200; ++iter) {
    F fl = floor(y);
    Integer a;
    if constexpr (std::is_same_v<F, double>) {
      a = Integer(fl);
    } else {
      a = fl.template convert_to<Integer>();
    }
    Integer h2 = a * h1 + h0, k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    F approx;
    if constexpr (std::is_same_v<F, double>) {
      approx = h1.convert_to<double>() / k1.convert_to<double>();
    } else {
      approx = F(h1) / F(k1);
    }
    if (abs(approx - x) <= tol) return Rational(h1, k1);
    F frac = y - fl;
    if (frac == 0) break;
    y = F(1) / frac;
  }
  return std::nullopt;
}

inline std::optional<Rational> rationalize(double x, long long max_den = 1000000, double tol = 1e-12) {
  if (!std::isfinite(x)) return std::nullopt;
  return rationalize<double>(x, Integer(max_den), tol * std::max(1.0, std::abs(x)));
}

inline std::optional<GaussRational> rationalize(const Complex& z, long long max_den = 1000000,
                                                double tol = 1e-12) {
  auto r = rationalize(z.real(), max_den, tol);
  auto i = rationalize(z.imag(), max_den, tol);
  if (!r || !i) return std::nullopt;
  return GaussRational(*r, *i);
}

}  // namespace bondforge
