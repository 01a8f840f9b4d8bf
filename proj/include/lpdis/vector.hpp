#pragma once

#include <map>
#include <optional>
#include <type_traits>
#include <vector>

#include "lpdis/powers.hpp"
#include "lpdis/step_function.hpp"

namespace lpdis {

// Complex scalar with rational-interval real and imaginary parts. Point
// intervals are exact scalars; plain +,-,* stay exact on the endpoints.
struct ComplexInterval {
  RationalInterval re{Rational(0), Rational(0)};
  RationalInterval im{Rational(0), Rational(0)};

  ComplexInterval() = default;
  ComplexInterval(RationalInterval r, RationalInterval i) : re(std::move(r)), im(std::move(i)) {}
  static ComplexInterval exact(const GaussianRational& g) {
    return {RationalInterval::point(g.re), RationalInterval::point(g.im)};
  }
  static ComplexInterval real(RationalInterval r) {
    return {std::move(r), RationalInterval::point(Rational(0))};
  }
  static ComplexInterval real(const DyadicInterval& r) { return real(RationalInterval::of(r)); }

  bool is_exact_zero() const {
    return re.lo == 0 && re.hi == 0 && im.lo == 0 && im.hi == 0;
  }
  bool is_point() const { return re.lo == re.hi && im.lo == im.hi; }
  std::optional<GaussianRational> exact_value() const {
    if (!is_point()) return std::nullopt;
    return GaussianRational{re.lo, im.lo};
  }
  RationalInterval norm_sq() const { return square(re) + square(im); }
  Rational width() const { return re.width() + im.width(); }

  friend ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ComplexInterval operator-(const ComplexInterval& a) { return {-a.re, -a.im}; }
  friend ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const ComplexInterval& a, const ComplexInterval& b) {
    return a.re.lo == b.re.lo && a.re.hi == b.re.hi && a.im.lo == b.im.lo && a.im.hi == b.im.hi;
  }
};

// Atomic dimension bound: n for the n-atom space, omega for infinitely many atoms.
struct Dim {
  std::optional<unsigned long> bound;

  static Dim omega() { return {}; }
  static Dim finite(unsigned long n) { return {n}; }
  bool is_omega() const { return !bound.has_value(); }
  bool admits(unsigned long index) const { return is_omega() || index < *bound; }
  friend bool operator==(const Dim&, const Dim&) = default;
};

namespace detail {

template <class Coeff>
struct CoeffTraits;

template <>
struct CoeffTraits<GaussianRational> {
  static RationalInterval norm_sq(const GaussianRational& g) {
    return RationalInterval::point(g.norm_sq());
  }
  static bool possibly_nonzero(const GaussianRational& g) { return !g.is_zero(); }
};

template <>
struct CoeffTraits<ComplexInterval> {
  static RationalInterval norm_sq(const ComplexInterval& c) { return c.norm_sq(); }
  static bool possibly_nonzero(const ComplexInterval& c) { return !c.is_exact_zero(); }
};

}  // namespace detail

// Element of the hybrid space: finitely many weighted atoms plus a rational
// step function on [0,1]. With GaussianRational coefficients this is the exact
// model; with ComplexInterval coefficients it is the enclosure-valued variant.
template <class Coeff>
struct BasicVector {
  std::map<unsigned long, Coeff> atoms;  // no stored zero coefficients
  StepFunction<Coeff> steps;
  Dim dim = Dim::omega();

  BasicVector() = default;
  explicit BasicVector(Dim d) : dim(d) {}

  static BasicVector zero(Dim d) { return BasicVector(d); }

  static BasicVector atom(unsigned long index, Coeff c, Dim d) {
    BasicVector v(d);
    v.set_atom(index, std::move(c));
    return v;
  }

  static BasicVector step(const Rational& a, const Rational& b, Coeff c, Dim d) {
    BasicVector v(d);
    v.steps = StepFunction<Coeff>::indicator(a, b, std::move(c));
    return v;
  }

  void set_atom(unsigned long index, Coeff c) {
    if (!dim.admits(index)) throw domain_error("atom index exceeds dimension bound");
    if (c == Coeff{})
      atoms.erase(index);
    else
      atoms[index] = std::move(c);
  }

  bool is_zero() const { return atoms.empty() && steps.is_zero(); }

  friend BasicVector operator+(const BasicVector& a, const BasicVector& b) {
    if (!(a.dim == b.dim)) throw domain_error("dimension mismatch");
    BasicVector out(a.dim);
    out.atoms = a.atoms;
    for (auto& [i, c] : b.atoms) {
      auto it = out.atoms.find(i);
      if (it == out.atoms.end()) {
        out.atoms.emplace(i, c);
      } else {
        it->second = it->second + c;
        if (it->second == Coeff{}) out.atoms.erase(it);
      }
    }
    out.steps = a.steps + b.steps;
    return out;
  }
  friend BasicVector operator-(const BasicVector& a, const BasicVector& b) {
    return a + scaled(b, Coeff{} - unit());
  }

  template <class S>
  friend BasicVector scaled(const BasicVector& v, const S& c) {
    BasicVector out(v.dim);
    for (auto& [i, a] : v.atoms) {
      Coeff prod = a * c;
      if (!(prod == Coeff{})) out.atoms.emplace(i, std::move(prod));
    }
    out.steps = v.steps.scaled(c);
    return out;
  }

  friend bool operator==(const BasicVector& a, const BasicVector& b) {
    return a.dim == b.dim && a.atoms == b.atoms && a.steps == b.steps;
  }

 private:
  static Coeff unit() {
    if constexpr (std::is_same_v<Coeff, GaussianRational>)
      return GaussianRational(Rational(1));
    else
      return ComplexInterval::exact(GaussianRational(Rational(1)));
  }
};

using HybridVector = BasicVector<GaussianRational>;
using ApproxVector = BasicVector<ComplexInterval>;

inline ApproxVector to_approx(const HybridVector& v) {
  ApproxVector out(v.dim);
  for (auto& [i, c] : v.atoms) out.atoms.emplace(i, ComplexInterval::exact(c));
  std::vector<ComplexInterval> vals;
  for (auto& c : v.steps.values()) vals.push_back(ComplexInterval::exact(c));
  out.steps = StepFunction<ComplexInterval>(v.steps.cuts(), std::move(vals));
  return out;
}

// Exact counterpart when every coefficient is a point interval.
inline std::optional<HybridVector> exact_hybrid(const ApproxVector& v) {
  HybridVector out(v.dim);
  for (auto& [i, c] : v.atoms) {
    auto g = c.exact_value();
    if (!g) return std::nullopt;
    out.atoms.emplace(i, *g);
  }
  std::vector<GaussianRational> vals;
  for (auto& c : v.steps.values()) {
    auto g = c.exact_value();
    if (!g) return std::nullopt;
    vals.push_back(*g);
  }
  out.steps = StepFunction<GaussianRational>(v.steps.cuts(), std::move(vals));
  return out;
}

inline HybridVector add(const HybridVector& a, const HybridVector& b) { return a + b; }
inline HybridVector scale(const GaussianRational& c, const HybridVector& v) {
  return scaled(v, c);
}
inline ApproxVector scale(const ComplexInterval& c, const ApproxVector& v) {
  return scaled(v, c);
}

// --- norm machinery -------------------------------------------------------

namespace detail {

struct NormTerm {
  RationalInterval sq;  // |coefficient|^2
  Rational weight;      // 1 for atoms, piece length for steps
};

template <class Coeff>
std::vector<NormTerm> norm_terms(const BasicVector<Coeff>& v) {
  std::vector<NormTerm> terms;
  for (auto& [i, c] : v.atoms)
    terms.push_back({CoeffTraits<Coeff>::norm_sq(c), Rational(1)});
  for (auto& [a, b, c] : v.steps.nonzero_pieces())
    terms.push_back({CoeffTraits<Coeff>::norm_sq(c), b - a});
  return terms;
}

// Sum of |c_i|^p * w_i as a rational interval; the grid-directed part of the
// width is <= 2^-target (input interval widths propagate on top of that).
inline RationalInterval mass_enclosure_terms(const std::vector<NormTerm>& terms,
                                             const Exponent& p, long target) {
  Rational half_p = p.value() / 2;
  long grid = target + 1 + ceil_log2_ul(terms.size() + 1);
  RationalInterval sum{Rational(0), Rational(0)};
  for (const auto& t : terms) {
    RationalInterval powed = pow_interval(t.sq, half_p, grid);
    sum = sum + t.weight * powed;
  }
  return sum;
}

// mass^{1/p} enclosure, sound for mass intervals in [0, inf).
inline DyadicInterval root_of_mass(const RationalInterval& mass, const Exponent& p, int k) {
  Rational lo = mass.lo < 0 ? Rational(0) : mass.lo;
  unsigned long u = static_cast<unsigned long>(p.num());
  long v = p.den();
  RationalInterval powed{rat_ipow(lo, v), rat_ipow(mass.hi, v)};
  long grid = k + 2;
  Dyadic rlo(detail::root_floor_scaled(powed.lo, u, grid), -grid);
  Int t = detail::root_floor_scaled(powed.hi, u, grid);
  Rational t_val = Rational(t) * pow2(-grid);
  Dyadic rhi = rat_ipow(t_val, static_cast<long>(u)) == powed.hi ? Dyadic(t, -grid)
                                                                 : Dyadic(t + 1, -grid);
  return {rlo, rhi};
}

template <class Coeff>
RationalInterval mass_interval(const BasicVector<Coeff>& v, const Exponent& p, long target) {
  return mass_enclosure_terms(norm_terms(v), p, target);
}

}  // namespace detail

// Enclosure of ||v||_p^p with directed-rounding width <= 2^-k.
template <class Coeff>
DyadicInterval norm_mass(const BasicVector<Coeff>& v, const Exponent& p, int k) {
  RationalInterval m = detail::mass_interval(v, p, k + 2);
  if (m.lo < 0) m.lo = 0;
  return m.to_dyadic(k + 2);
}

// Enclosure of ||v||_p with directed-rounding width <= 2^-k. For exact
// (GaussianRational) inputs the width bound is unconditional; interval inputs
// additionally propagate their own widths.
template <class Coeff>
DyadicInterval norm(const BasicVector<Coeff>& v, const Exponent& p, int k) {
  auto terms = detail::norm_terms(v);
  if (terms.empty()) return DyadicInterval::point(0);
  RationalInterval coarse = detail::mass_enclosure_terms(terms, p, 4);
  long s = coarse.hi <= 1 ? 0 : mag2_upper(coarse.hi);
  long u = p.num(), vden = p.den();
  long target = u * (static_cast<long>(k) + 3) + ceil_log2_ul(vden) + 1 + s * (vden - 1);
  RationalInterval mass = detail::mass_enclosure_terms(terms, p, target);
  if (mass.lo < 0) mass.lo = 0;
  return detail::root_of_mass(mass, p, k);
}

// --- support predicates ----------------------------------------------------

template <class Coeff>
bool support_disjoint(const BasicVector<Coeff>& u, const BasicVector<Coeff>& v) {
  for (auto& [i, c] : u.atoms)
    if (v.atoms.count(i)) return false;
  return support_overlap_measure(u.steps, v.steps) == 0;
}

// f is a subvector of g iff g - f and f are disjointly supported.
inline bool is_subvector(const HybridVector& u, const HybridVector& v) {
  return support_disjoint(v - u, u);
}

// Measure of the symmetric difference of the supports; atoms carry weight 1.
inline Rational symm_diff_measure(const HybridVector& u, const HybridVector& v) {
  Rational m(0);
  for (auto& [i, c] : u.atoms)
    if (!v.atoms.count(i)) m += 1;
  for (auto& [i, c] : v.atoms)
    if (!u.atoms.count(i)) m += 1;
  return m + support_symm_diff_measure(u.steps, v.steps);
}

}  // namespace lpdis
