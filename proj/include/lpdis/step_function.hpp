#pragma once

#include <vector>

#include "lpdis/rational.hpp"

namespace lpdis {

// Piecewise-constant function on [0,1]: value vals[i] on [cuts[i], cuts[i+1]).
// Canonical form: 0 = cuts[0] < ... < cuts[m] = 1, no two adjacent pieces equal,
// at least one piece. Single points are null, so the half-open convention is
// invisible to every measure-level operation.
template <class V>
class StepFunction {
 public:
  StepFunction() : cuts_{Rational(0), Rational(1)}, vals_{V{}} {}

  StepFunction(std::vector<Rational> cuts, std::vector<V> vals)
      : cuts_(std::move(cuts)), vals_(std::move(vals)) {
    if (cuts_.size() < 2 || vals_.size() + 1 != cuts_.size())
      throw domain_error("step function: size mismatch");
    if (cuts_.front() != 0 || cuts_.back() != 1)
      throw domain_error("step function: domain must be [0,1]");
    for (size_t i = 0; i + 1 < cuts_.size(); ++i)
      if (!(cuts_[i] < cuts_[i + 1])) throw domain_error("step function: cuts not increasing");
    canonicalize();
  }

  static StepFunction zero() { return StepFunction(); }

  // value * indicator of [a,b]
  static StepFunction indicator(const Rational& a, const Rational& b, V value) {
    if (a < 0 || b > 1 || a > b) throw domain_error("indicator: bad interval");
    if (a == b || value == V{}) return zero();
    std::vector<Rational> cuts;
    std::vector<V> vals;
    cuts.push_back(Rational(0));
    if (a > 0) {
      cuts.push_back(a);
      vals.push_back(V{});
    }
    vals.push_back(std::move(value));
    if (b < 1) {
      cuts.push_back(b);
      vals.push_back(V{});
    }
    cuts.push_back(Rational(1));
    return StepFunction(std::move(cuts), std::move(vals));
  }

  const std::vector<Rational>& cuts() const { return cuts_; }
  const std::vector<V>& values() const { return vals_; }
  size_t pieces() const { return vals_.size(); }

  bool is_zero() const { return vals_.size() == 1 && vals_[0] == V{}; }

  const V& at(const Rational& x) const {
    for (size_t i = 0; i + 1 < cuts_.size(); ++i)
      if (x < cuts_[i + 1] || i + 2 == cuts_.size()) return vals_[i];
    return vals_.back();
  }

  template <class F>
  static StepFunction combine(const StepFunction& a, const StepFunction& b, F&& f) {
    std::vector<Rational> cuts;
    std::vector<V> vals;
    size_t i = 0, j = 0;
    cuts.push_back(Rational(0));
    while (i < a.vals_.size() && j < b.vals_.size()) {
      vals.push_back(f(a.vals_[i], b.vals_[j]));
      const Rational& ea = a.cuts_[i + 1];
      const Rational& eb = b.cuts_[j + 1];
      if (ea == eb) {
        cuts.push_back(ea);
        ++i;
        ++j;
      } else if (ea < eb) {
        cuts.push_back(ea);
        ++i;
      } else {
        cuts.push_back(eb);
        ++j;
      }
    }
    return StepFunction(std::move(cuts), std::move(vals));
  }

  friend StepFunction operator+(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, [](const V& x, const V& y) { return x + y; });
  }
  friend StepFunction operator-(const StepFunction& a, const StepFunction& b) {
    return combine(a, b, [](const V& x, const V& y) { return x - y; });
  }

  template <class S>
  StepFunction scaled(const S& c) const {
    std::vector<V> vals;
    vals.reserve(vals_.size());
    for (const V& v : vals_) vals.push_back(v * c);
    return StepFunction(cuts_, std::move(vals));
  }

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    return a.cuts_ == b.cuts_ && a.vals_ == b.vals_;
  }

  // [from, to, value] with zero pieces dropped
  std::vector<std::tuple<Rational, Rational, V>> nonzero_pieces() const {
    std::vector<std::tuple<Rational, Rational, V>> out;
    for (size_t i = 0; i < vals_.size(); ++i)
      if (!(vals_[i] == V{})) out.emplace_back(cuts_[i], cuts_[i + 1], vals_[i]);
    return out;
  }

  // support as maximal intervals of nonzero value
  std::vector<std::pair<Rational, Rational>> support() const {
    std::vector<std::pair<Rational, Rational>> out;
    for (size_t i = 0; i < vals_.size(); ++i) {
      if (vals_[i] == V{}) continue;
      if (!out.empty() && out.back().second == cuts_[i])
        out.back().second = cuts_[i + 1];
      else
        out.emplace_back(cuts_[i], cuts_[i + 1]);
    }
    return out;
  }

  Rational support_measure() const {
    Rational m(0);
    for (auto& [a, b] : support()) m += b - a;
    return m;
  }

 private:
  void canonicalize() {
    std::vector<Rational> cuts{cuts_.front()};
    std::vector<V> vals;
    for (size_t i = 0; i < vals_.size(); ++i) {
      if (!vals.empty() && vals.back() == vals_[i]) {
        cuts.back() = cuts_[i + 1];
      } else {
        vals.push_back(vals_[i]);
        cuts.push_back(cuts_[i + 1]);
      }
    }
    cuts_ = std::move(cuts);
    vals_ = std::move(vals);
  }

  std::vector<Rational> cuts_;
  std::vector<V> vals_;
};

// Lebesgue measure of the overlap of two supports.
template <class V>
Rational support_overlap_measure(const StepFunction<V>& a, const StepFunction<V>& b) {
  Rational m(0);
  size_t i = 0, j = 0;
  Rational left(0);
  const auto& ac = a.cuts();
  const auto& bc = b.cuts();
  const auto& av = a.values();
  const auto& bv = b.values();
  while (i < av.size() && j < bv.size()) {
    Rational right = std::min(ac[i + 1], bc[j + 1]);
    if (!(av[i] == V{}) && !(bv[j] == V{})) m += right - left;
    if (ac[i + 1] == right) ++i;
    if (bc[j + 1] == right) ++j;
    left = right;
  }
  return m;
}

// Measure of the symmetric difference of the two supports.
template <class V>
Rational support_symm_diff_measure(const StepFunction<V>& a, const StepFunction<V>& b) {
  return a.support_measure() + b.support_measure() - 2 * support_overlap_measure(a, b);
}

}  // namespace lpdis
