#pragma once

#include <memory>
#include <optional>

#include "lpdis/disintegration.hpp"
#include "lpdis/powers.hpp"
#include "lpdis/tree.hpp"
#include "lpdis/vector.hpp"

namespace lpdis {

enum class Membership { in, out, unknown };
enum class Trit { yes, no, unknown };

struct insufficient_stage : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct not_enumerated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct depth_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ground-truth limit of the greedy almost-norm-maximizing chain continuing
// downward from a node; only oracles built with full knowledge provide it.
struct LimitData {
  ApproxVector vec;       // enclosure of the limit vector (may be exactly zero)
  DyadicInterval mass_p;  // enclosure of its p-mass
};

// Stagewise view of a computable presentation given by a disintegration:
// node membership, child enumeration, and node-norm enclosures. Everything
// but the optional ground-truth hooks must be computable from public data.
class PresentationOracle {
 public:
  virtual ~PresentationOracle() = default;

  virtual Exponent exponent() const = 0;
  virtual std::string name() const = 0;

  // monotone in stage: in never becomes out; out only when provably absent
  virtual Membership member(const NodePath& n, int stage) const = 0;
  // children enumerated by the given stage; grows with stage
  virtual std::vector<NodePath> children(const NodePath& n, int stage) const = 0;
  // enclosure of ||phi(n)||_p^p, width <= 2^-k, nested in k
  virtual DyadicInterval node_norm_p(const NodePath& n, int k) const = 0;
  // enclosure of ||phi(n)||_p^p minus the masses of the stage-enumerated children
  virtual DyadicInterval residual_mass(const NodePath& n, int stage, int k) const = 0;

  virtual Trit terminal(const NodePath&) const { return Trit::unknown; }
  // number of atoms of the presented space, when finite and known
  virtual std::optional<unsigned long> atomic_dimension() const { return std::nullopt; }
  // materialized label, when the oracle can produce one
  virtual std::optional<ApproxVector> label(const NodePath&, int /*k*/) const {
    return std::nullopt;
  }
  // ground-truth greedy-chain limit, when available
  virtual std::optional<LimitData> greedy_limit(const NodePath&, int /*k*/) const {
    return std::nullopt;
  }
};

namespace detail {

inline DyadicInterval point_enclosure(const Rational& r, int k) {
  return RationalInterval::point(r).to_dyadic(k + 1);
}

}  // namespace detail

// The standard presentation of the nonatomic factor: full binary tree, node nu
// labelled by the indicator of the |nu|-th dyadic subinterval picked by nu's bits.
class StandardDyadicOracle final : public PresentationOracle {
 public:
  explicit StandardDyadicOracle(Exponent p) : p_(std::move(p)) {}

  Exponent exponent() const override { return p_; }
  std::string name() const override { return "dyadic"; }

  Membership member(const NodePath& n, int) const override {
    for (unsigned long i : n.ix)
      if (i > 1) return Membership::out;
    return Membership::in;
  }
  std::vector<NodePath> children(const NodePath& n, int stage) const override {
    if (member(n, stage) != Membership::in) return {};
    return {n.child(0), n.child(1)};
  }
  DyadicInterval node_norm_p(const NodePath& n, int) const override {
    return DyadicInterval::point(Dyadic(Int(1), -static_cast<long>(n.length())));
  }
  DyadicInterval residual_mass(const NodePath& n, int, int) const override {
    if (member(n, 0) != Membership::in) throw not_enumerated("node outside tree: " + n.str());
    return DyadicInterval::point(0);
  }
  Trit terminal(const NodePath&) const override { return Trit::no; }
  std::optional<unsigned long> atomic_dimension() const override { return 0; }

  std::optional<ApproxVector> label(const NodePath& n, int) const override {
    auto [a, b] = cell(n);
    return to_approx(HybridVector::step(a, b, GaussianRational(Rational(1)), Dim::omega()));
  }
  std::optional<LimitData> greedy_limit(const NodePath&, int) const override {
    return LimitData{ApproxVector::zero(Dim::omega()), DyadicInterval::point(0)};
  }

  static std::pair<Rational, Rational> cell(const NodePath& n) {
    Rational a(0), len(1);
    for (unsigned long bit : n.ix) {
      len /= 2;
      if (bit) a += len;
    }
    return {a, a + len};
  }

 private:
  Exponent p_;
};

// Standard presentation of the hybrid space with n atoms: root splits into the
// n atoms (terminal) followed by the dyadic tree of the continuous part.
class StandardHybridOracle final : public PresentationOracle {
 public:
  StandardHybridOracle(unsigned long n, Exponent p) : n_(n), p_(std::move(p)) {
    if (n_ < 1) throw domain_error("hybrid presentation needs at least one atom");
  }

  Exponent exponent() const override { return p_; }
  std::string name() const override { return "hybrid:" + std::to_string(n_); }
  unsigned long atom_count() const { return n_; }

  Membership member(const NodePath& n, int) const override {
    if (n.is_root()) return Membership::in;
    if (n.ix[0] > n_) return Membership::out;
    if (n.ix[0] < n_) return n.length() == 1 ? Membership::in : Membership::out;
    for (size_t i = 1; i < n.ix.size(); ++i)
      if (n.ix[i] > 1) return Membership::out;
    return Membership::in;
  }
  std::vector<NodePath> children(const NodePath& n, int stage) const override {
    if (member(n, stage) != Membership::in) return {};
    if (n.is_root()) {
      std::vector<NodePath> out;
      for (unsigned long j = 0; j <= n_; ++j) out.push_back(n.child(j));
      return out;
    }
    if (n.ix[0] < n_) return {};
    return {n.child(0), n.child(1)};
  }
  DyadicInterval node_norm_p(const NodePath& n, int k) const override {
    if (n.is_root()) return detail::point_enclosure(Rational(n_ + 1), k);
    if (n.ix[0] < n_) return DyadicInterval::point(1);
    return DyadicInterval::point(Dyadic(Int(1), -static_cast<long>(n.length() - 1)));
  }
  DyadicInterval residual_mass(const NodePath& n, int, int) const override {
    if (member(n, 0) != Membership::in) throw not_enumerated("node outside tree: " + n.str());
    return DyadicInterval::point(0);
  }
  Trit terminal(const NodePath& n) const override {
    return (!n.is_root() && n.ix[0] < n_) ? Trit::yes : Trit::no;
  }
  std::optional<unsigned long> atomic_dimension() const override { return n_; }

  std::optional<ApproxVector> label(const NodePath& n, int) const override {
    Dim dim = Dim::finite(n_);
    if (n.is_root()) {
      HybridVector v(dim);
      for (unsigned long j = 0; j < n_; ++j) v.set_atom(j, GaussianRational(Rational(1)));
      v.steps = StepFunction<GaussianRational>::indicator(Rational(0), Rational(1),
                                                          GaussianRational(Rational(1)));
      return to_approx(v);
    }
    if (n.ix[0] < n_)
      return to_approx(HybridVector::atom(n.ix[0], GaussianRational(Rational(1)), dim));
    NodePath tail(std::vector<unsigned long>(n.ix.begin() + 1, n.ix.end()));
    auto [a, b] = StandardDyadicOracle::cell(tail);
    return to_approx(HybridVector::step(a, b, GaussianRational(Rational(1)), dim));
  }
  std::optional<LimitData> greedy_limit(const NodePath& n, int) const override {
    Dim dim = Dim::finite(n_);
    if (n.is_root() || n.ix[0] < n_) {
      unsigned long j = n.is_root() ? 0 : n.ix[0];
      return LimitData{to_approx(HybridVector::atom(j, GaussianRational(Rational(1)), dim)),
                       DyadicInterval::point(1)};
    }
    return LimitData{ApproxVector::zero(dim), DyadicInterval::point(0)};
  }

 private:
  unsigned long n_;
  Exponent p_;
};

// Any materialized tree acts as an oracle: membership is decided by the tree,
// norms come from the labels, residuals from label arithmetic. No ground truth.
class TreeOracle final : public PresentationOracle {
 public:
  TreeOracle(ConcreteDisintegration d, Exponent p) : d_(std::move(d)), p_(std::move(p)) {}

  Exponent exponent() const override { return p_; }
  std::string name() const override { return "tree"; }
  const ConcreteDisintegration& data() const { return d_; }

  Membership member(const NodePath& n, int) const override {
    return d_.tree.contains(n) ? Membership::in : Membership::out;
  }
  std::vector<NodePath> children(const NodePath& n, int) const override {
    return d_.tree.children_of(n);
  }
  DyadicInterval node_norm_p(const NodePath& n, int k) const override {
    return norm_mass(d_.label(n), p_, k);
  }
  DyadicInterval residual_mass(const NodePath& n, int stage, int k) const override {
    if (member(n, stage) != Membership::in)
      throw not_enumerated("node outside tree: " + n.str());
    auto kids = d_.tree.children_of(n);
    int kk = k + 2 + static_cast<int>(ceil_log2_ul(kids.size() + 2));
    RationalInterval res = RationalInterval::of(node_norm_p(n, kk));
    for (const NodePath& c : kids) res = res - RationalInterval::of(node_norm_p(c, kk));
    return res.to_dyadic(k + 2);
  }
  Trit terminal(const NodePath& n) const override {
    if (!d_.tree.contains(n)) return Trit::unknown;
    if (!d_.tree.is_leaf(n)) return Trit::no;
    return d_.frontier.count(n) ? Trit::unknown : Trit::yes;
  }
  std::optional<ApproxVector> label(const NodePath& n, int) const override {
    if (!d_.labels.count(n)) return std::nullopt;
    return d_.label(n);
  }

 private:
  ConcreteDisintegration d_;
  Exponent p_;
};

// Truncate an oracle-presented tree to the given depth. Nodes whose child
// lists are incomplete (cut by the depth bound, or with residual mass bounded
// away from zero at this stage) are frontier-marked; nodes the oracle declares
// terminal are genuine leaves.
inline ConcreteDisintegration materialize(const PresentationOracle& oracle, int depth,
                                          int stage, int k) {
  ConcreteDisintegration out;
  std::vector<NodePath> level{NodePath{}};
  while (!level.empty()) {
    std::vector<NodePath> next;
    for (const NodePath& n : level) {
      auto lbl = oracle.label(n, k);
      if (!lbl) throw domain_error("oracle cannot materialize a label at " + n.str());
      out.tree.insert_closed(n);
      out.labels.emplace(n, std::move(*lbl));
      if (oracle.terminal(n) == Trit::yes) continue;
      if (static_cast<int>(n.length()) >= depth) {
        out.frontier.insert(n);
        continue;
      }
      auto kids = oracle.children(n, stage);
      if (!oracle.residual_mass(n, stage, k + 4).contains(Rational(0)))
        out.frontier.insert(n);
      else if (kids.empty())
        out.frontier.insert(n);
      for (const NodePath& c : kids) next.push_back(c);
    }
    level = std::move(next);
  }
  return out;
}

// Norm of a rational vector sum_nu coeffs[nu] * phi(nu), computed from the
// oracle data alone: the downward closure of the support, extended by all
// stage-enumerated children at internal nodes, with residual-mass terms
// standing in for unenumerated siblings.
inline DyadicInterval rational_vector_norm(const PresentationOracle& oracle,
                                           const std::map<NodePath, GaussianRational>& coeffs,
                                           int stage, int k) {
  Exponent p = oracle.exponent();

  std::set<NodePath> supp;
  for (auto& [n, c] : coeffs)
    if (!c.is_zero()) supp.insert(n);
  if (supp.empty()) return DyadicInterval::point(0);
  for (const NodePath& n : supp)
    if (oracle.member(n, stage) != Membership::in)
      throw not_enumerated("coefficient on a node not enumerated by stage " +
                           std::to_string(stage) + ": " + n.str());

  std::set<NodePath> closure = downset(supp);
  std::set<NodePath> internal;
  for (const NodePath& n : closure)
    for (const NodePath& m : closure)
      if (n != m && n.is_prefix_of(m)) {
        internal.insert(n);
        break;
      }
  std::set<NodePath> tree = closure;
  for (const NodePath& n : internal)
    for (const NodePath& c : oracle.children(n, stage)) tree.insert(c);

  // cumulative coefficients along paths
  std::map<NodePath, GaussianRational> sigma;
  for (const NodePath& n : tree) {
    GaussianRational s;
    for (auto& [m, c] : coeffs)
      if (m.is_prefix_of(n)) s = s + c;
    sigma[n] = s;
  }

  long term_mag = 0;  // set by the coarse pass; bounds all factors and masses
  auto term_enclosures = [&](long grid, bool record_mag) {
    RationalInterval sum{Rational(0), Rational(0)};
    for (const NodePath& n : tree) {
      const GaussianRational& s = sigma[n];
      if (s.is_zero()) continue;
      bool leaf = !internal.count(n);
      RationalInterval mass =
          leaf ? RationalInterval::of(oracle.node_norm_p(n, static_cast<int>(grid)))
               : RationalInterval::of(
                     oracle.residual_mass(n, stage, static_cast<int>(grid)));
      // true masses and residuals are nonnegative
      if (mass.hi < 0) mass.hi = 0;
      if (mass.lo < 0) mass.lo = 0;
      RationalInterval factor =
          pow_interval(RationalInterval::point(s.norm_sq()), p.value() / 2, grid);
      if (record_mag)
        term_mag = std::max(term_mag, mag2_upper(std::max(factor.hi, mass.hi) + 1));
      sum = sum + factor * mass;
    }
    return sum;
  };

  RationalInterval coarse = term_enclosures(6, true);
  long s_mag = coarse.hi <= 1 ? 0 : mag2_upper(coarse.hi);
  long u = p.num(), v = p.den();
  long target = u * (static_cast<long>(k) + 3) + ceil_log2_ul(v) + 1 + s_mag * (v - 1);
  long grid = target + 3 + term_mag + ceil_log2_ul(tree.size() + 1);
  RationalInterval mass = term_enclosures(grid, false);
  if (mass.lo < 0) mass.lo = 0;
  return detail::root_of_mass(mass, p, k);
}

}  // namespace lpdis
