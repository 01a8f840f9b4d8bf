#pragma once

#include "lpdis/oracle.hpp"
#include "lpdis/schedule.hpp"

namespace lpdis {

// Adversarial presentation of the space with infinitely many atoms. Summand e
// carries mass 2^{-(e+1)p}; below (e) the tree splits binarily, one level per
// element enumerated into W_e, so the subtree is finite with 2^{#W_e} singleton
// leaves exactly when W_e is finite. Node norms depend only on the enumeration
// counts, never on whether W_e is finite.
struct InfiniteAtomicBuilder {
  std::vector<CESetSchedule> schedules;  // schedule for e = 0..E; empty set beyond

  void validate() const {
    for (auto& s : schedules) s.validate();
  }
};

class InfiniteAtomicOracle final : public PresentationOracle {
 public:
  InfiniteAtomicOracle(InfiniteAtomicBuilder builder, Exponent p, bool ground_truth)
      : builder_(std::move(builder)), p_(std::move(p)), ground_truth_(ground_truth) {
    builder_.validate();
  }

  Exponent exponent() const override { return p_; }
  std::string name() const override { return "infinite-atomic"; }
  const InfiniteAtomicBuilder& builder() const { return builder_; }

  unsigned long count_at(unsigned long e, int stage) const {
    if (e >= builder_.schedules.size()) return 0;
    return builder_.schedules[e].count_at(stage);
  }

  // ground truth: nullopt means W_e is infinite
  std::optional<unsigned long> true_size(unsigned long e) const {
    if (e >= builder_.schedules.size()) return 0;
    const auto& s = builder_.schedules[e];
    if (s.total) return std::nullopt;
    return s.elements().size();
  }
  bool in_fin(unsigned long e) const { return true_size(e).has_value(); }

  Membership member(const NodePath& n, int stage) const override {
    if (n.is_root()) return Membership::in;
    unsigned long e = n.ix[0];
    for (size_t i = 1; i < n.ix.size(); ++i)
      if (n.ix[i] > 1) return Membership::out;
    size_t alpha = n.length() - 1;
    if (static_cast<int>(e) <= stage && count_at(e, stage) >= alpha) return Membership::in;
    return Membership::unknown;
  }

  std::vector<NodePath> children(const NodePath& n, int stage) const override {
    if (n.is_root()) {
      std::vector<NodePath> out;
      for (unsigned long e = 0; static_cast<int>(e) <= stage; ++e) out.push_back(n.child(e));
      return out;
    }
    if (member(n, stage) != Membership::in) return {};
    size_t alpha = n.length() - 1;
    if (count_at(n.ix[0], stage) >= alpha + 1) return {n.child(0), n.child(1)};
    return {};
  }

  DyadicInterval node_norm_p(const NodePath& n, int k) const override {
    if (n.is_root()) {
      // sum_e 2^{-(e+1)p} = r / (1 - r) with r = 2^{-p}
      RationalInterval r = RationalInterval::of(rat_pow(Rational(2), -p_.value(), k + 6));
      RationalInterval total = r / (RationalInterval::point(Rational(1)) - r);
      return total.to_dyadic(k + 2);
    }
    for (size_t i = 1; i < n.ix.size(); ++i)
      if (n.ix[i] > 1) throw not_enumerated("node outside tree: " + n.str());
    long e = static_cast<long>(n.ix[0]);
    long alpha = static_cast<long>(n.length()) - 1;
    // 2^{-(e+1)p} * 2^{-alpha}
    DyadicInterval head = rat_pow(Rational(2), -(e + 1) * p_.value(), k + alpha + 1);
    DyadicInterval shift = DyadicInterval::point(Dyadic(Int(1), -alpha));
    return head * shift;
  }

  DyadicInterval residual_mass(const NodePath& n, int stage, int k) const override {
    if (n.is_root()) {
      // tail past the last enumerated child: sum_{e > stage} 2^{-(e+1)p}
      RationalInterval r = RationalInterval::of(rat_pow(Rational(2), -p_.value(), k + 8));
      RationalInterval head = RationalInterval::of(
          rat_pow(Rational(2), -(static_cast<long>(stage) + 2) * p_.value(), k + 8));
      RationalInterval tail = head / (RationalInterval::point(Rational(1)) - r);
      return tail.to_dyadic(k + 2);
    }
    if (member(n, stage) == Membership::out)
      throw not_enumerated("node outside tree: " + n.str());
    if (children(n, stage).empty()) return node_norm_p(n, k);  // nothing enumerated below
    return DyadicInterval::point(0);  // the two halves sum exactly
  }

  Trit terminal(const NodePath&) const override { return Trit::unknown; }

  std::optional<ApproxVector> label(const NodePath& n, int k) const override {
    if (!ground_truth_) return std::nullopt;
    if (n.is_root()) {
      // truncated at one summand past the schedule list; the root stays
      // frontier-marked in every materialization
      ApproxVector sum = ApproxVector::zero(Dim::omega());
      for (unsigned long e = 0; e <= builder_.schedules.size(); ++e)
        sum = sum + *label(NodePath{e}, k);
      return sum;
    }
    unsigned long e = n.ix[0];
    NodePath alpha(std::vector<unsigned long>(n.ix.begin() + 1, n.ix.end()));
    for (unsigned long b : alpha.ix)
      if (b > 1) return std::nullopt;
    auto size = true_size(e);
    if (size) {
      if (alpha.length() > *size) return std::nullopt;  // not a node of the true tree
      unsigned long cells = 1UL << (*size - alpha.length());
      unsigned long lo = cell_low(alpha) * cells;
      ApproxVector v(Dim::omega());
      ComplexInterval coeff = fin_coeff(e, *size, k);
      for (unsigned long j = 0; j < cells; ++j) v.set_atom(atom_offset(e) + lo + j, coeff);
      return v;
    }
    // infinite summand: a chunk of [0,1], rescaled to preserve mass
    auto [base, len] = chunk(e);
    Rational a(0), b(1);
    for (unsigned long bit : alpha.ix) {
      Rational mid = (a + b) / 2;
      if (bit)
        a = mid;
      else
        b = mid;
    }
    ApproxVector v(Dim::omega());
    v.steps = StepFunction<ComplexInterval>::indicator(base + a * len, base + b * len,
                                                       cont_coeff(e, k));
    return v;
  }

  std::optional<LimitData> greedy_limit(const NodePath& n, int k) const override {
    if (!ground_truth_) return std::nullopt;
    if (n.is_root()) return greedy_limit(NodePath{0}, k);
    unsigned long e = n.ix[0];
    NodePath alpha(std::vector<unsigned long>(n.ix.begin() + 1, n.ix.end()));
    auto size = true_size(e);
    if (!size) return LimitData{ApproxVector::zero(Dim::omega()), DyadicInterval::point(0)};
    if (alpha.length() > *size) return std::nullopt;
    // greedy descent breaks the constant mass ties leftward: the limit is the
    // atom at the low end of the current cell block
    unsigned long cells = 1UL << (*size - alpha.length());
    unsigned long index = atom_offset(e) + cell_low(alpha) * cells;
    ComplexInterval coeff = fin_coeff(e, *size, k);
    DyadicInterval mass =
        rat_pow(Rational(2), -(static_cast<long>(e) + 1) * p_.value(), k + *size + 1) *
        DyadicInterval::point(Dyadic(Int(1), -static_cast<long>(*size)));
    return LimitData{ApproxVector::atom(index, coeff, Dim::omega()), mass};
  }

 private:
  // atoms of the finite summands are packed in blocks ordered by e
  unsigned long atom_offset(unsigned long e) const {
    unsigned long off = 0;
    for (unsigned long i = 0; i < e && i < builder_.schedules.size(); ++i)
      if (auto s = true_size(i)) off += 1UL << *s;
    if (e > builder_.schedules.size())
      off += static_cast<unsigned long>(e - builder_.schedules.size());
    return off;
  }

  // infinite summands get the dyadic chunks [1-2^-r, 1-2^-(r+1)] of [0,1]
  std::pair<Rational, Rational> chunk(unsigned long e) const {
    unsigned long rank = 0;
    for (unsigned long i = 0; i < e; ++i)
      if (!in_fin(i)) ++rank;
    Rational base = 1 - pow2(-static_cast<long>(rank));
    Rational len = pow2(-static_cast<long>(rank) - 1);
    return {base, len};
  }

  static unsigned long cell_low(const NodePath& alpha) {
    unsigned long lo = 0;
    for (unsigned long bit : alpha.ix) lo = 2 * lo + bit;
    return lo;
  }

  // 2^{-(e+1)} * 2^{-m/p}
  ComplexInterval fin_coeff(unsigned long e, unsigned long m, int k) const {
    Rational expo = -Rational(e + 1) - Rational(m) / p_.value();
    return ComplexInterval::real(rat_pow(Rational(2), expo, k + 2));
  }
  // 2^{-(e+1)} * len^{-1/p}
  ComplexInterval cont_coeff(unsigned long e, int k) const {
    auto [base, len] = chunk(e);
    RationalInterval head = RationalInterval::point(pow2(-static_cast<long>(e) - 1));
    RationalInterval stretch =
        RationalInterval::of(rat_pow(len, -Rational(p_.den(), p_.num()), k + 2));
    return ComplexInterval::real(head * stretch);
  }

  InfiniteAtomicBuilder builder_;
  Exponent p_;
  bool ground_truth_;
};

inline InfiniteAtomicOracle build_infinite_atomic(InfiniteAtomicBuilder builder, Exponent p,
                                                  bool ground_truth = false) {
  return InfiniteAtomicOracle(std::move(builder), std::move(p), ground_truth);
}

// Truncation of the true tree (full enumeration), frontier-marked where the
// cut hides more of it.
inline ConcreteDisintegration materialize_infinite_atomic(const InfiniteAtomicBuilder& builder,
                                                          const Exponent& p, int depth, int k) {
  InfiniteAtomicOracle oracle(builder, p, true);
  ConcreteDisintegration out;
  out.tree.insert_closed(NodePath{});
  out.labels.emplace(NodePath{}, *oracle.label(NodePath{}, k));
  out.frontier.insert(NodePath{});  // the root's child list is never complete
  for (unsigned long e = 0; e < builder.schedules.size(); ++e) {
    std::vector<NodePath> level{NodePath{e}};
    while (!level.empty()) {
      std::vector<NodePath> next;
      for (const NodePath& n : level) {
        auto lbl = oracle.label(n, k);
        if (!lbl) continue;
        out.tree.insert_closed(n);
        out.labels.emplace(n, std::move(*lbl));
        auto size = oracle.true_size(n.ix[0]);
        size_t alpha = n.length() - 1;
        bool splits = !size || alpha < *size;
        if (!splits) continue;  // singleton leaf of a finite summand
        if (static_cast<int>(n.length()) >= depth) {
          out.frontier.insert(n);
          continue;
        }
        next.push_back(n.child(0));
        next.push_back(n.child(1));
      }
      level = std::move(next);
    }
  }
  return out;
}

}  // namespace lpdis
