#pragma once

#include "lpdis/oracle.hpp"
#include "lpdis/schedule.hpp"

namespace lpdis {

// Adversarial presentation of the space with n atoms. The tree: a spine of
// 0-nodes carrying the hidden atom, a side cell hanging off every spine node,
// a unit-mass binary subtree under (1), and terminal atom leaves (2)..(n).
// Node norms are exact rationals in the q_j prefix and never mention gamma;
// labels and chain limits exist only when ground truth is attached.
class FiniteAtomicOracle final : public PresentationOracle {
 public:
  FiniteAtomicOracle(unsigned long n, LeftCEReal lce, Exponent p)
      : n_(n), lce_(std::move(lce)), p_(std::move(p)) {
    if (n_ < 1) throw domain_error("finite-atomic construction needs n >= 1");
  }

  Exponent exponent() const override { return p_; }
  std::string name() const override { return "finite-atomic:" + std::to_string(n_); }
  unsigned long atom_count() const { return n_; }
  const LeftCEReal& hidden_real() const { return lce_; }

  struct Kind {
    enum What { root, spine, spine_side, one_subtree, atom_leaf, outside } what;
    size_t k = 0;     // spine depth for spine / spine_side
    NodePath beta;    // binary suffix for the two subtree kinds
  };

  Kind classify(const NodePath& n) const {
    if (n.is_root()) return {Kind::root};
    unsigned long head = n.ix[0];
    if (head == 0) {
      size_t k = 0;
      while (k < n.ix.size() && n.ix[k] == 0) ++k;
      if (k == n.ix.size()) return {Kind::spine, k};
      if (n.ix[k] != 1) return {Kind::outside};
      NodePath beta(std::vector<unsigned long>(n.ix.begin() + k + 1, n.ix.end()));
      for (unsigned long b : beta.ix)
        if (b > 1) return {Kind::outside};
      return {Kind::spine_side, k, std::move(beta)};
    }
    if (head == 1) {
      NodePath beta(std::vector<unsigned long>(n.ix.begin() + 1, n.ix.end()));
      for (unsigned long b : beta.ix)
        if (b > 1) return {Kind::outside};
      return {Kind::one_subtree, 0, std::move(beta)};
    }
    if (head <= n_ && n.length() == 1) return {Kind::atom_leaf, head};
    return {Kind::outside};
  }

  Membership member(const NodePath& n, int) const override {
    return classify(n).what == Kind::outside ? Membership::out : Membership::in;
  }

  std::vector<NodePath> children(const NodePath& n, int) const override {
    Kind c = classify(n);
    switch (c.what) {
      case Kind::root: {
        std::vector<NodePath> out;
        for (unsigned long j = 0; j <= n_; ++j) out.push_back(n.child(j));
        return out;
      }
      case Kind::spine:
      case Kind::spine_side:
      case Kind::one_subtree:
        return {n.child(0), n.child(1)};
      default:
        return {};
    }
  }

  // exact rational p-masses, from the q-prefix alone
  Rational node_mass(const NodePath& n) const {
    Kind c = classify(n);
    switch (c.what) {
      case Kind::root:
        return Rational(n_) + 1 - lce_.q(0);
      case Kind::spine:
        return 1 - lce_.q(c.k - 1);
      case Kind::atom_leaf:
        return Rational(1);
      case Kind::one_subtree:
        return pow2(-static_cast<long>(c.beta.length()));
      case Kind::spine_side:
        return pow2(-static_cast<long>(c.beta.length())) * (lce_.q(c.k) - lce_.q(c.k - 1));
      default:
        throw not_enumerated("node outside tree: " + n.str());
    }
  }

  DyadicInterval node_norm_p(const NodePath& n, int k) const override {
    return RationalInterval::point(node_mass(n)).to_dyadic(k + 1);
  }

  DyadicInterval residual_mass(const NodePath& n, int, int) const override {
    Kind c = classify(n);
    if (c.what == Kind::outside) throw not_enumerated("node outside tree: " + n.str());
    if (c.what == Kind::atom_leaf)
      return DyadicInterval::point(1);  // terminal: nothing enumerated below
    return DyadicInterval::point(0);    // children always sum exactly
  }

  Trit terminal(const NodePath& n) const override {
    Kind c = classify(n);
    if (c.what == Kind::outside) return Trit::unknown;
    return c.what == Kind::atom_leaf ? Trit::yes : Trit::no;
  }
  std::optional<unsigned long> atomic_dimension() const override { return n_; }

  std::optional<ApproxVector> label(const NodePath& n, int k) const override {
    if (!lce_.has_gamma()) return std::nullopt;
    Kind c = classify(n);
    if (c.what == Kind::outside) return std::nullopt;
    const Rational& gamma = lce_.gamma();
    Dim dim = Dim::finite(n_);
    auto one = ComplexInterval::exact(GaussianRational(Rational(1)));
    switch (c.what) {
      case Kind::root: {
        ApproxVector v(dim);
        v.set_atom(0, atom_coeff(k));
        for (unsigned long j = 1; j < n_; ++j) v.set_atom(j, one);
        auto inner = StepFunction<ComplexInterval>::indicator(Rational(0), gamma - lce_.q(0), one);
        auto outer = StepFunction<ComplexInterval>::indicator(gamma - lce_.q(0), Rational(1),
                                                              scale_coeff(k));
        v.steps = inner + outer;
        return v;
      }
      case Kind::spine: {
        ApproxVector v(dim);
        v.set_atom(0, atom_coeff(k));
        v.steps = StepFunction<ComplexInterval>::indicator(Rational(0),
                                                           gamma - lce_.q(c.k - 1), one);
        return v;
      }
      case Kind::atom_leaf:
        return ApproxVector::atom(c.k - 1, one, dim);
      case Kind::one_subtree: {
        auto [a, b] = descend(gamma - lce_.q(0), Rational(1), c.beta);
        ApproxVector v(dim);
        v.steps = StepFunction<ComplexInterval>::indicator(a, b, scale_coeff(k));
        return v;
      }
      case Kind::spine_side: {
        auto [a, b] = descend(gamma - lce_.q(c.k), gamma - lce_.q(c.k - 1), c.beta);
        ApproxVector v(dim);
        v.steps = StepFunction<ComplexInterval>::indicator(a, b, one);
        return v;
      }
      default:
        return std::nullopt;
    }
  }

  std::optional<LimitData> greedy_limit(const NodePath& n, int k) const override {
    if (!lce_.has_gamma()) return std::nullopt;
    Kind c = classify(n);
    Dim dim = Dim::finite(n_);
    switch (c.what) {
      case Kind::atom_leaf:
        return LimitData{ApproxVector::atom(c.k - 1,
                                            ComplexInterval::exact(GaussianRational(Rational(1))),
                                            dim),
                         DyadicInterval::point(1)};
      case Kind::one_subtree:
      case Kind::spine_side:
      case Kind::root:
        // greedy descent from the root prefers the unit-mass (1)-subtree; all
        // cell masses vanish along any branch of the binary subtrees
        return LimitData{ApproxVector::zero(dim), DyadicInterval::point(0)};
      case Kind::spine: {
        if (!spine_persists(c.k))
          return LimitData{ApproxVector::zero(dim), DyadicInterval::point(0)};
        ApproxVector v = ApproxVector::atom(0, atom_coeff(k), dim);
        return LimitData{std::move(v),
                         RationalInterval::point(1 - lce_.gamma()).to_dyadic(k + 1)};
      }
      default:
        return std::nullopt;
    }
  }

 private:
  // (1-gamma)^{1/p} and c^{-1/p} with c = 1 - gamma + q_0
  ComplexInterval atom_coeff(int k) const {
    return ComplexInterval::real(
        rat_pow(1 - lce_.gamma(), Rational(p_.den(), p_.num()), k + 2));
  }
  ComplexInterval scale_coeff(int k) const {
    Rational c = 1 - lce_.gamma() + lce_.q(0);
    return ComplexInterval::real(rat_pow(c, -Rational(p_.den(), p_.num()), k + 2));
  }

  static std::pair<Rational, Rational> descend(Rational a, Rational b, const NodePath& beta) {
    for (unsigned long bit : beta.ix) {
      Rational mid = (a + b) / 2;
      if (bit)
        a = mid;
      else
        b = mid;
    }
    return {a, b};
  }

  // Does the greedy anm selection follow the spine from depth k on forever?
  // Diversion at depth j needs the side mass q_j - q_{j-1} to exceed the spine
  // mass 1 - q_j; once q_{j-1} >= 2*gamma - 1 that is impossible for good.
  bool spine_persists(size_t from) const {
    Rational threshold = 2 * lce_.gamma() - 1;
    for (size_t j = from;; ++j) {
      if (lce_.q(j - 1) >= threshold) return true;
      if (j >= lce_.prefix_length())
        throw depth_exceeded("q prefix too short to certify the spine limit");
      if (lce_.q(j) - lce_.q(j - 1) > 1 - lce_.q(j)) return false;
    }
  }

  unsigned long n_;
  LeftCEReal lce_;
  Exponent p_;
};

inline FiniteAtomicOracle build_finite_atomic(unsigned long n, LeftCEReal lce, Exponent p) {
  return FiniteAtomicOracle(n, std::move(lce), std::move(p));
}

// Depth-truncated materialization against ground truth; labels carry interval
// coefficients for the two irrational scalars of the construction.
inline ConcreteDisintegration materialize_finite_atomic(unsigned long n, const Rational& gamma,
                                                        std::vector<Rational> q_prefix,
                                                        const Exponent& p, int depth, int k) {
  FiniteAtomicOracle oracle(n, LeftCEReal(gamma, std::move(q_prefix)), p);
  return materialize(oracle, depth, 0, k);
}

}  // namespace lpdis
