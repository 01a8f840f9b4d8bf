#pragma once

#include <algorithm>
#include <string>

#include "lpdis/rational.hpp"

namespace lpdis {

// Dyadic rational man * 2^exp, canonical form: man odd, or man == 0 and exp == 0.
// Closed under +, -, *; rounding enters only through the grid conversions below.
struct Dyadic {
  Int man{0};
  long exp{0};

  Dyadic() = default;
  Dyadic(Int m, long e) : man(std::move(m)), exp(e) { normalize(); }
  explicit Dyadic(long v) : man(v), exp(0) { normalize(); }

  void normalize() {
    if (man == 0) {
      exp = 0;
      return;
    }
    while ((man & 1) == 0) {
      man >>= 1;
      ++exp;
    }
  }

  bool is_zero() const { return man == 0; }

  Rational to_rational() const {
    if (exp >= 0) return Rational(man * (Int(1) << exp));
    return Rational(man, Int(1) << (-exp));
  }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.man == 0) return b;
    if (b.man == 0) return a;
    long e = std::min(a.exp, b.exp);
    return Dyadic((a.man << (a.exp - e)) + (b.man << (b.exp - e)), e);
  }
  friend Dyadic operator-(const Dyadic& a) { return Dyadic(-a.man, a.exp); }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    return Dyadic(a.man * b.man, a.exp + b.exp);
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.man == b.man && a.exp == b.exp;
  }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    Dyadic d = a - b;
    if (d.man < 0) return std::strong_ordering::less;
    if (d.man > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
};

// "m*2^e"
inline std::string format_dyadic(const Dyadic& d) {
  return d.man.str() + "*2^" + std::to_string(d.exp);
}

inline Dyadic parse_dyadic(std::string_view s) {
  auto pos = s.find("*2^");
  if (pos == std::string_view::npos) throw parse_error("bad dyadic: " + std::string(s));
  try {
    Int m{std::string(s.substr(0, pos))};
    long e = std::stol(std::string(s.substr(pos + 3)));
    return Dyadic(std::move(m), e);
  } catch (const std::exception&) {
    throw parse_error("bad dyadic: " + std::string(s));
  }
}

// Largest multiple of 2^-grid not exceeding r.
inline Dyadic dyadic_floor(const Rational& r, long grid) {
  Int num = numerator(r);
  Int den = denominator(r);
  if (grid >= 0)
    num <<= grid;
  else
    den <<= (-grid);
  return Dyadic(floor_div(num, den), -grid);
}

inline Dyadic dyadic_ceil(const Rational& r, long grid) {
  Int num = numerator(r);
  Int den = denominator(r);
  if (grid >= 0)
    num <<= grid;
  else
    den <<= (-grid);
  return Dyadic(ceil_div(num, den), -grid);
}

inline bool is_dyadic(const Rational& r) {
  Int d = denominator(r);
  return (d & (d - 1)) == 0;
}

// Closed interval [lo, hi] with dyadic endpoints; every irrational quantity in this
// library is reported as such an enclosure.
struct DyadicInterval {
  Dyadic lo;
  Dyadic hi;

  DyadicInterval() = default;
  DyadicInterval(Dyadic l, Dyadic h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw domain_error("interval endpoints out of order");
  }
  static DyadicInterval point(Dyadic d) { return {d, d}; }
  static DyadicInterval point(long v) { return point(Dyadic(v)); }

  Rational width() const { return (hi - lo).to_rational(); }
  Rational mid() const { return (lo.to_rational() + hi.to_rational()) / 2; }
  bool is_point() const { return lo == hi; }

  bool contains(const Rational& r) const {
    return lo.to_rational() <= r && r <= hi.to_rational();
  }
  bool contains(const DyadicInterval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool overlaps(const DyadicInterval& o) const { return !(hi < o.lo || o.hi < lo); }
  bool definitely_positive() const { return lo.man > 0; }
  bool is_exact_zero() const { return lo.is_zero() && hi.is_zero(); }

  friend DyadicInterval operator+(const DyadicInterval& a, const DyadicInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
  }
  friend DyadicInterval operator-(const DyadicInterval& a) { return {-a.hi, -a.lo}; }
  friend DyadicInterval operator-(const DyadicInterval& a, const DyadicInterval& b) {
    return a + (-b);
  }
  friend DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b) {
    Dyadic p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
  }
  friend bool operator==(const DyadicInterval& a, const DyadicInterval& b) = default;
};

// Exact-rational interval used inside enclosure computations; +,-,*,/ are exact,
// so directed rounding is needed only at dyadic conversion points.
struct RationalInterval {
  Rational lo;
  Rational hi;

  RationalInterval() = default;
  RationalInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw domain_error("interval endpoints out of order");
  }
  static RationalInterval point(Rational r) { return {r, r}; }
  static RationalInterval of(const DyadicInterval& d) {
    return {d.lo.to_rational(), d.hi.to_rational()};
  }

  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
  bool contains(const Rational& r) const { return lo <= r && r <= hi; }
  bool overlaps(const RationalInterval& o) const { return !(hi < o.lo || o.hi < lo); }

  DyadicInterval to_dyadic(long grid) const {
    return {dyadic_floor(lo, grid), dyadic_ceil(hi, grid)};
  }

  friend RationalInterval operator+(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
  }
  friend RationalInterval operator-(const RationalInterval& a) { return {-a.hi, -a.lo}; }
  friend RationalInterval operator-(const RationalInterval& a, const RationalInterval& b) {
    return a + (-b);
  }
  friend RationalInterval operator*(const RationalInterval& a, const RationalInterval& b) {
    Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
  }
  friend RationalInterval operator*(const Rational& c, const RationalInterval& a) {
    return c >= 0 ? RationalInterval{c * a.lo, c * a.hi} : RationalInterval{c * a.hi, c * a.lo};
  }
  // requires 0 outside b
  friend RationalInterval operator/(const RationalInterval& a, const RationalInterval& b) {
    if (b.lo <= 0 && b.hi >= 0) throw domain_error("interval division by zero");
    RationalInterval inv{Rational(1) / b.hi, Rational(1) / b.lo};
    return a * inv;
  }
};

inline RationalInterval square(const RationalInterval& a) {
  if (a.lo >= 0) return {a.lo * a.lo, a.hi * a.hi};
  if (a.hi <= 0) return {a.hi * a.hi, a.lo * a.lo};
  return {Rational(0), std::max(a.lo * a.lo, a.hi * a.hi)};
}

}  // namespace lpdis
