#pragma once

#include <optional>
#include <set>
#include <vector>

#include "lpdis/rational.hpp"

namespace lpdis {

// Finite enumeration schedule standing in for a c.e. set: element x enters at
// the given stage. The harness knows the full set; oracles only ever see the
// stage-s prefix. `total` flags a set that should be treated as infinite
// (enumeration keeps producing elements past the listed ones, one per stage).
struct CESetSchedule {
  std::vector<std::pair<unsigned long, int>> entries;
  bool total = false;

  void validate() const {
    std::set<unsigned long> seen;
    for (auto& [x, s] : entries) {
      if (s < 0) throw domain_error("schedule stage must be >= 0");
      if (!seen.insert(x).second) throw domain_error("schedule elements must be distinct");
    }
  }

  int max_stage() const {
    int m = 0;
    for (auto& [x, s] : entries) m = std::max(m, s);
    return m;
  }

  // number of elements enumerated by stage s
  unsigned long count_at(int stage) const {
    unsigned long c = 0;
    for (auto& [x, s] : entries)
      if (s <= stage) ++c;
    if (total && stage > max_stage()) c += static_cast<unsigned long>(stage - max_stage());
    return c;
  }

  std::set<unsigned long> elements() const {
    std::set<unsigned long> out;
    for (auto& [x, s] : entries) out.insert(x);
    return out;
  }
};

// Left-c.e. real: the sup gamma of a strictly increasing rational sequence
// q_0 < q_1 < ... < gamma. The q-prefix is public data; gamma itself is ground
// truth and may be absent (oracles built without it cannot leak it).
class LeftCEReal {
 public:
  LeftCEReal(std::optional<Rational> gamma, std::vector<Rational> q)
      : gamma_(std::move(gamma)), q_(std::move(q)) {
    if (q_.empty()) throw domain_error("left-c.e. real needs at least q_0");
    if (!(q_[0] > 0)) throw domain_error("q_0 must be positive");
    for (size_t j = 0; j + 1 < q_.size(); ++j)
      if (!(q_[j] < q_[j + 1])) throw domain_error("q_j must increase strictly");
    if (gamma_) {
      if (!(*gamma_ > 0 && *gamma_ < 1)) throw domain_error("gamma must lie in (0,1)");
      if (!(q_.back() < *gamma_)) throw domain_error("q_j must stay below gamma");
    }
  }

  bool has_gamma() const { return gamma_.has_value(); }
  const Rational& gamma() const {
    if (!gamma_) throw domain_error("ground-truth gamma not attached");
    return *gamma_;
  }
  size_t prefix_length() const { return q_.size(); }
  const Rational& q(size_t j) const {
    if (j >= q_.size())
      throw domain_error("q prefix exceeded at index " + std::to_string(j));
    return q_[j];
  }

  LeftCEReal without_gamma() const { return LeftCEReal(std::nullopt, q_); }

 private:
  std::optional<Rational> gamma_;
  std::vector<Rational> q_;
};

// Encode the schedule's set W into a left-c.e. real:
//   gamma = 1/4 + sum_{x in W} 2 * 3^{-(x+3)}
// (base-3 digits in {0,2}, so digit extraction at finite precision is
// unambiguous), with q_j the stage-j partial sum minus a shrinking 3^{-(j+2)}
// tail that keeps the sequence strictly increasing and strictly below gamma.
inline LeftCEReal left_ce_from_schedule(const CESetSchedule& schedule, int j_max) {
  schedule.validate();
  if (schedule.entries.empty()) throw domain_error("schedule must be nonempty");
  auto weight = [](unsigned long x) {
    return Rational(2) * rat_ipow(Rational(1, 3), static_cast<long>(x) + 3);
  };
  Rational gamma = Rational(1, 4);
  for (auto& [x, s] : schedule.entries) gamma += weight(x);
  std::vector<Rational> q;
  for (int j = 0; j <= j_max; ++j) {
    Rational partial = Rational(1, 4);
    for (auto& [x, s] : schedule.entries)
      if (s <= j) partial += weight(x);
    q.push_back(partial - rat_ipow(Rational(1, 3), j + 2));
  }
  return LeftCEReal(gamma, std::move(q));
}

}  // namespace lpdis
