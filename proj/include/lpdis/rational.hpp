#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lpdis {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Floor division with b > 0.
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

inline Int ipow(Int base, unsigned long e) {
  Int r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline Rational rat_ipow(const Rational& base, long e) {
  if (e == 0) return Rational(1);
  if (e < 0) {
    if (base == 0) throw domain_error("rat_ipow: zero base with negative exponent");
    Rational p = rat_ipow(base, -e);
    return Rational(denominator(p), numerator(p));
  }
  Rational r(1);
  Rational b = base;
  unsigned long k = static_cast<unsigned long>(e);
  while (k) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

// 2^e as an exact rational, e of either sign.
inline Rational pow2(long e) {
  if (e >= 0) return Rational(Int(1) << e);
  return Rational(Int(1), Int(1) << (-e));
}

inline Int floor_rational(const Rational& r) { return floor_div(numerator(r), denominator(r)); }
inline Int ceil_rational(const Rational& r) { return ceil_div(numerator(r), denominator(r)); }

// Smallest s >= 0 with |r| <= 2^s.
inline long mag2_upper(const Rational& r) {
  Rational a = abs(r);
  long s = 0;
  Rational p(1);
  while (p < a) {
    p *= 2;
    ++s;
  }
  return s;
}

inline long ceil_log2_ul(unsigned long n) {
  long s = 0;
  unsigned long p = 1;
  while (p < n) {
    p <<= 1;
    ++s;
  }
  return s;
}

inline std::string format_rational(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational parse_rational(std::string_view s) {
  if (s.empty()) throw parse_error("empty rational");
  auto slash = s.find('/');
  try {
    if (slash == std::string_view::npos) return Rational(Int(std::string(s)));
    Int num{std::string(s.substr(0, slash))};
    Int den{std::string(s.substr(slash + 1))};
    if (den == 0) throw parse_error("zero denominator: " + std::string(s));
    return Rational(num, den);
  } catch (const std::exception&) {
    throw parse_error("bad rational: " + std::string(s));
  }
}

// Scalar from Q(i).
struct GaussianRational {
  Rational re;
  Rational im;

  GaussianRational() = default;
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  Rational norm_sq() const { return re * re + im * im; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) = default;
};

// "a/b+c/di", e.g. "1/1+0/1i", "1/2-3/4i"; pure-real "a/b" also accepted on input.
inline std::string format_gaussian(const GaussianRational& g) {
  std::string s = format_rational(g.re);
  if (g.im >= 0)
    s += "+" + format_rational(g.im) + "i";
  else
    s += "-" + format_rational(-g.im) + "i";
  return s;
}

inline GaussianRational parse_gaussian(std::string_view s) {
  if (s.empty()) throw parse_error("empty scalar");
  if (s.back() != 'i') return GaussianRational(parse_rational(s));
  std::string_view body = s.substr(0, s.size() - 1);
  // split at the sign separating the two fractions (skip a leading sign)
  for (size_t i = 1; i < body.size(); ++i) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != '/' && body[i - 1] != '+' &&
        body[i - 1] != '-') {
      Rational re = parse_rational(body.substr(0, i));
      Rational im = parse_rational(body.substr(body[i] == '+' ? i + 1 : i));
      return {re, im};
    }
  }
  // pure imaginary
  return {Rational(0), parse_rational(body)};
}

// The exponent p of the L^p norm, restricted to rationals >= 1.
class Exponent {
 public:
  explicit Exponent(Rational p) : p_(std::move(p)) {
    if (p_ < 1) throw domain_error("exponent must be >= 1");
    num_ = static_cast<long>(numerator(p_));
    den_ = static_cast<long>(denominator(p_));
  }
  static Exponent parse(std::string_view s) { return Exponent(parse_rational(s)); }

  const Rational& value() const { return p_; }
  long num() const { return num_; }  // p = num/den, reduced
  long den() const { return den_; }
  bool is_two() const { return p_ == 2; }

  friend bool operator==(const Exponent& a, const Exponent& b) { return a.p_ == b.p_; }

 private:
  Rational p_;
  long num_;
  long den_;
};

}  // namespace lpdis
