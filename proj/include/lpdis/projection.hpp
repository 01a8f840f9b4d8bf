#pragma once

#include "lpdis/finite_atomic.hpp"
#include "lpdis/infinite_atomic.hpp"

namespace lpdis {

struct insufficient_precision : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Answers projection queries against ground truth; stands in for the halting
// oracle that the projection maps require.
class ProjectionOracle {
 public:
  virtual ~ProjectionOracle() = default;
  virtual Exponent exponent() const = 0;
  // enclosure of || P(phi(nu)) ||_p (the norm, not its p-th power), width <= 2^-k
  virtual DyadicInterval proj_norm(const NodePath& nu, int k) const = 0;
  virtual ApproxVector proj_vector(const NodePath& nu, int k) const = 0;
  // enclosure of || P(phi(nu)) ||_p^p; exact whenever the mass is rational
  virtual RationalInterval proj_mass_p(const NodePath& nu, int k) const = 0;
};

// Projections over the finitely atomic adversarial presentation: either onto
// the nonatomic part, or onto the span of a single atom.
class FiniteAtomicProjection final : public ProjectionOracle {
 public:
  FiniteAtomicProjection(FiniteAtomicOracle oracle, std::optional<unsigned long> atom)
      : oracle_(std::move(oracle)), atom_(atom) {
    oracle_.hidden_real().gamma();  // ground truth required
    if (atom_ && *atom_ >= oracle_.atom_count())
      throw domain_error("projection target atom out of range");
  }

  static FiniteAtomicProjection onto_continuous(FiniteAtomicOracle oracle) {
    return FiniteAtomicProjection(std::move(oracle), std::nullopt);
  }
  static FiniteAtomicProjection onto_atom(FiniteAtomicOracle oracle, unsigned long j) {
    return FiniteAtomicProjection(std::move(oracle), j);
  }

  Exponent exponent() const override { return oracle_.exponent(); }

  DyadicInterval proj_norm(const NodePath& nu, int k) const override {
    const LeftCEReal& lce = oracle_.hidden_real();
    const Rational& gamma = lce.gamma();
    Rational inv_p(oracle_.exponent().den(), oracle_.exponent().num());
    auto c = oracle_.classify(nu);
    using Kind = FiniteAtomicOracle::Kind;
    if (c.what == Kind::outside) throw not_enumerated("node outside tree: " + nu.str());
    if (!atom_) {
      // continuous p-masses are exact rationals
      Rational mass(0);
      switch (c.what) {
        case Kind::root: mass = gamma - lce.q(0) + 1; break;
        case Kind::spine: mass = gamma - lce.q(c.k - 1); break;
        case Kind::atom_leaf: mass = 0; break;
        default: mass = oracle_.node_mass(nu); break;  // cells carry no atoms
      }
      return rat_pow(mass, inv_p, k);
    }
    bool hidden = (c.what == Kind::root || c.what == Kind::spine) && *atom_ == 0;
    if (hidden) return rat_pow(1 - gamma, inv_p, k);
    bool unit = (c.what == Kind::root && *atom_ >= 1) ||
                (c.what == Kind::atom_leaf && c.k - 1 == *atom_);
    return DyadicInterval::point(unit ? 1 : 0);
  }

  ApproxVector proj_vector(const NodePath& nu, int k) const override {
    auto lbl = oracle_.label(nu, k);
    if (!lbl) throw not_enumerated("node outside tree: " + nu.str());
    ApproxVector out(lbl->dim);
    if (!atom_) {
      out.steps = lbl->steps;
    } else if (auto it = lbl->atoms.find(*atom_); it != lbl->atoms.end()) {
      out.set_atom(*atom_, it->second);
    }
    return out;
  }

  RationalInterval proj_mass_p(const NodePath& nu, int) const override {
    const LeftCEReal& lce = oracle_.hidden_real();
    const Rational& gamma = lce.gamma();
    auto c = oracle_.classify(nu);
    using Kind = FiniteAtomicOracle::Kind;
    if (c.what == Kind::outside) throw not_enumerated("node outside tree: " + nu.str());
    if (!atom_) {
      switch (c.what) {
        case Kind::root: return RationalInterval::point(gamma - lce.q(0) + 1);
        case Kind::spine: return RationalInterval::point(gamma - lce.q(c.k - 1));
        case Kind::atom_leaf: return RationalInterval::point(Rational(0));
        default: return RationalInterval::point(oracle_.node_mass(nu));
      }
    }
    bool hidden = (c.what == Kind::root || c.what == Kind::spine) && *atom_ == 0;
    if (hidden) return RationalInterval::point(1 - gamma);
    bool unit = (c.what == Kind::root && *atom_ >= 1) ||
                (c.what == Kind::atom_leaf && c.k - 1 == *atom_);
    return RationalInterval::point(Rational(unit ? 1 : 0));
  }

 private:
  FiniteAtomicOracle oracle_;
  std::optional<unsigned long> atom_;
};

// Projection onto the sum of the nonatomic summands of the infinitely atomic
// presentation: phi(nu) passes through untouched when W_{nu(0)} is infinite
// and is annihilated when it is finite.
class InfiniteAtomicProjection final : public ProjectionOracle {
 public:
  explicit InfiniteAtomicProjection(InfiniteAtomicOracle oracle) : oracle_(std::move(oracle)) {}

  Exponent exponent() const override { return oracle_.exponent(); }

  DyadicInterval proj_norm(const NodePath& nu, int k) const override {
    const Exponent p = oracle_.exponent();
    if (nu.is_root()) {
      int inner = static_cast<int>(p.num()) * (k + 3) + 8;
      RationalInterval mass{Rational(0), Rational(0)};
      for (unsigned long e = 0; e < oracle_.builder().schedules.size(); ++e)
        if (!oracle_.in_fin(e))
          mass = mass + RationalInterval::of(
                            rat_pow(Rational(2), -(static_cast<long>(e) + 1) * p.value(), inner));
      return detail::root_of_mass(mass, p, k);
    }
    unsigned long e = nu.ix[0];
    if (oracle_.in_fin(e)) return DyadicInterval::point(0);
    long alpha = static_cast<long>(nu.length()) - 1;
    // 2^{-(e+1)} 2^{-alpha/p}
    Rational expo = -Rational(e + 1) - Rational(alpha) / p.value();
    return rat_pow(Rational(2), expo, k);
  }

  ApproxVector proj_vector(const NodePath& nu, int k) const override {
    if (nu.is_root()) {
      ApproxVector sum = ApproxVector::zero(Dim::omega());
      for (unsigned long e = 0; e < oracle_.builder().schedules.size(); ++e)
        if (!oracle_.in_fin(e)) sum = sum + proj_vector(NodePath{e}, k);
      return sum;
    }
    if (oracle_.in_fin(nu.ix[0])) return ApproxVector::zero(Dim::omega());
    auto lbl = oracle_.label(nu, k);
    if (!lbl) throw not_enumerated("node outside the true tree: " + nu.str());
    return *lbl;
  }

  RationalInterval proj_mass_p(const NodePath& nu, int k) const override {
    const Exponent p = oracle_.exponent();
    if (nu.is_root()) {
      RationalInterval mass{Rational(0), Rational(0)};
      for (unsigned long e = 0; e < oracle_.builder().schedules.size(); ++e)
        if (!oracle_.in_fin(e))
          mass = mass + proj_mass_p(NodePath{e}, k + 4);
      return mass;
    }
    if (oracle_.in_fin(nu.ix[0])) return RationalInterval::point(Rational(0));
    long e = static_cast<long>(nu.ix[0]);
    long alpha = static_cast<long>(nu.length()) - 1;
    RationalInterval head =
        RationalInterval::of(rat_pow(Rational(2), -(e + 1) * p.value(), k + alpha + 2));
    return pow2(-alpha) * head;
  }

 private:
  InfiniteAtomicOracle oracle_;
};

// Projection of the standard hybrid presentation onto its continuous part;
// trivial, but it lets the isometry builders run against the standard target.
class StandardHybridProjection final : public ProjectionOracle {
 public:
  explicit StandardHybridProjection(StandardHybridOracle oracle) : oracle_(std::move(oracle)) {}

  Exponent exponent() const override { return oracle_.exponent(); }

  DyadicInterval proj_norm(const NodePath& nu, int k) const override {
    RationalInterval m = proj_mass_p(nu, k + 2);
    return rat_pow(m.lo, Rational(oracle_.exponent().den(), oracle_.exponent().num()), k);
  }
  ApproxVector proj_vector(const NodePath& nu, int k) const override {
    auto lbl = oracle_.label(nu, k);
    if (!lbl) throw not_enumerated("node outside tree: " + nu.str());
    ApproxVector out(lbl->dim);
    out.steps = lbl->steps;
    return out;
  }
  RationalInterval proj_mass_p(const NodePath& nu, int) const override {
    if (oracle_.member(nu, 0) != Membership::in)
      throw not_enumerated("node outside tree: " + nu.str());
    if (nu.is_root()) return RationalInterval::point(Rational(1));
    if (nu.ix[0] < oracle_.atom_count()) return RationalInterval::point(Rational(0));
    return RationalInterval::point(pow2(-(static_cast<long>(nu.length()) - 1)));
  }

 private:
  StandardHybridOracle oracle_;
};

// Recover the hidden left-c.e. real: query || P(phi((0))) ||_p = (1-gamma)^{1/p},
// raise to the p-th power, subtract from 1. Width <= 2^-k.
inline DyadicInterval decode_gamma(const ProjectionOracle& po, const Exponent& p, int k) {
  long c = ceil_log2_ul(static_cast<unsigned long>(p.num() / p.den() + 1)) + 3;
  DyadicInterval x = po.proj_norm(NodePath{0}, k + static_cast<int>(c));
  long grid = k + 3;
  Rational lo = x.lo.to_rational();
  if (lo < 0) lo = 0;
  DyadicInterval powed{pow_lower(lo, p.value(), grid),
                       pow_upper(x.hi.to_rational(), p.value(), grid)};
  return DyadicInterval::point(Dyadic(Int(1), 0)) - powed;
}

// Base-3 digits of gamma - 1/4 at positions 3..m+3 are in {0,2}; an enclosure
// of width below 3^{-(m+4)} pins every one of them. Bit x of W is digit x+3 = 2.
inline std::vector<bool> decode_membership(const DyadicInterval& gamma_enc, int m) {
  if (!(gamma_enc.width() < rat_ipow(Rational(1, 3), m + 4)))
    throw insufficient_precision("gamma enclosure too wide for " + std::to_string(m + 1) +
                                 " digits");
  Rational rem = gamma_enc.mid() - Rational(1, 4);
  std::vector<bool> bits;
  for (int x = 0; x <= m; ++x) {
    Rational scale = rat_ipow(Rational(1, 3), x + 3);
    bool bit = rem > Rational(3, 2) * scale;
    bits.push_back(bit);
    if (bit) rem -= 2 * scale;
  }
  return bits;
}

// Membership of e in Fin from one norm query: a rational q within 2^{-(e+3)}
// of || P(phi((e))) ||_p decides via the |q| < 2^{-(e+2)} test.
inline bool decode_fin(const ProjectionOracle& po, unsigned long e) {
  DyadicInterval enc = po.proj_norm(NodePath{e}, static_cast<int>(e) + 4);
  Rational q = enc.mid();
  return q < pow2(-(static_cast<long>(e) + 2));
}

}  // namespace lpdis
