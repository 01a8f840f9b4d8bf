#pragma once

#include "lpdis/dyadic.hpp"
#include "lpdis/rational.hpp"

namespace lpdis {

// floor(n^{1/v}) for n >= 0.
inline Int integer_root(const Int& n, unsigned long v) {
  if (n < 0) throw domain_error("integer_root: negative radicand");
  if (v == 0) throw domain_error("integer_root: zeroth root");
  if (n == 0 || n == 1 || v == 1) return n;
  long bits = static_cast<long>(msb(n));
  Int x = Int(1) << (bits / static_cast<long>(v) + 1);  // strictly above the root
  while (true) {
    Int y = ((v - 1) * x + n / ipow(x, v - 1)) / static_cast<long>(v);
    if (y >= x) break;
    x = y;
  }
  while (ipow(x, v) > n) --x;
  while (ipow(x + 1, v) <= n) ++x;
  return x;
}

namespace detail {

// floor(y^{1/v} * 2^grid) for rational y >= 0; equals floor of the v-th root of
// floor(y * 2^{grid*v}) (the two floors agree for any rational radicand).
inline Int root_floor_scaled(const Rational& y, unsigned long v, long grid) {
  Rational scaled = y * pow2(grid * static_cast<long>(v));
  return integer_root(floor_rational(scaled), v);
}

}  // namespace detail

// Directed bounds for x^e (x >= 0, e = u/v > 0) on the 2^-grid dyadic grid.
// Both are monotone in x and refine (nest) as grid increases.
inline Dyadic pow_lower(const Rational& x, const Rational& e, long grid) {
  if (x < 0) throw domain_error("pow_lower: negative base");
  if (e <= 0) throw domain_error("pow_lower: exponent must be positive");
  if (x == 0) return Dyadic(0, 0);
  long u = static_cast<long>(numerator(e));
  unsigned long v = static_cast<unsigned long>(denominator(e));
  Rational y = rat_ipow(x, u);
  if (v == 1) return dyadic_floor(y, grid);
  return Dyadic(detail::root_floor_scaled(y, v, grid), -grid);
}

inline Dyadic pow_upper(const Rational& x, const Rational& e, long grid) {
  if (x < 0) throw domain_error("pow_upper: negative base");
  if (e <= 0) throw domain_error("pow_upper: exponent must be positive");
  if (x == 0) return Dyadic(0, 0);
  long u = static_cast<long>(numerator(e));
  unsigned long v = static_cast<unsigned long>(denominator(e));
  Rational y = rat_ipow(x, u);
  if (v == 1) return dyadic_ceil(y, grid);
  Int t = detail::root_floor_scaled(y, v, grid);
  Rational t_val = Rational(t) * pow2(-grid);
  if (rat_ipow(t_val, static_cast<long>(v)) == y) return Dyadic(t, -grid);
  return Dyadic(t + 1, -grid);
}

// Enclosure of x^e with width <= 2^-k; exact when the value is dyadic.
// e may be negative provided x > 0.
inline DyadicInterval rat_pow(const Rational& x, const Rational& e, int k) {
  if (k < 0) throw domain_error("rat_pow: negative precision");
  if (x < 0) throw domain_error("rat_pow: negative base");
  if (e == 0) return DyadicInterval::point(1);
  if (x == 0) {
    if (e < 0) throw domain_error("rat_pow: zero base with negative exponent");
    return DyadicInterval::point(0);
  }
  Rational base = x;
  Rational exp = e;
  if (exp < 0) {
    base = Rational(1) / base;
    exp = -exp;
  }
  long grid = k + 1;
  Dyadic lo = pow_lower(base, exp, grid);
  Dyadic hi = pow_upper(base, exp, grid);
  return {lo, hi};
}

// Enclosure of |c|^p = (re^2 + im^2)^{p/2}, width <= 2^-k.
inline DyadicInterval abs_pow(const GaussianRational& c, const Exponent& p, int k) {
  return rat_pow(c.norm_sq(), p.value() / 2, k);
}

// Enclosure of |c| itself.
inline DyadicInterval abs_enclosure(const GaussianRational& c, int k) {
  return rat_pow(c.norm_sq(), Rational(1, 2), k);
}

// Outward enclosure of t^e over a rational interval t in [lo, hi] >= 0, e > 0.
inline RationalInterval pow_interval(const RationalInterval& t, const Rational& e, long grid) {
  if (t.lo < 0) throw domain_error("pow_interval: negative values in base interval");
  return {pow_lower(t.lo, e, grid).to_rational(), pow_upper(t.hi, e, grid).to_rational()};
}

// p-th root of an interval, i.e. the image of [lo, hi] under x^{1/p}.
inline DyadicInterval interval_root(const DyadicInterval& a, const Exponent& p, int k) {
  if (a.lo.man < 0) throw domain_error("interval_root: interval contains negatives");
  Rational e(p.den(), p.num());  // 1/p
  long grid = k + 1;
  return {pow_lower(a.lo.to_rational(), e, grid), pow_upper(a.hi.to_rational(), e, grid)};
}

}  // namespace lpdis
