#include <catch2/catch_amalgamated.hpp>

#include "lpdis/finite_atomic.hpp"
#include "lpdis/infinite_atomic.hpp"
#include "test_util.hpp"

using namespace lpdis;
using testutil::Rng;

namespace {

Rational q(long n, long d) { return Rational(n, d); }

CESetSchedule sched(std::initializer_list<std::pair<unsigned long, int>> entries,
                    bool total = false) {
  CESetSchedule s;
  s.entries.assign(entries.begin(), entries.end());
  s.total = total;
  return s;
}

CESetSchedule rand_sched(Rng& rng, bool total = false) {
  CESetSchedule s;
  s.total = total;
  long count = rng.range(1, 4);
  std::set<unsigned long> used;
  for (long i = 0; i < count; ++i) {
    unsigned long x = static_cast<unsigned long>(rng.range(0, 8));
    if (!used.insert(x).second) continue;
    s.entries.emplace_back(x, static_cast<int>(rng.range(0, 4)));
  }
  return s;
}

// the geometric seed used throughout the chain examples: gamma = 2/3,
// q_j = 2/3 - (1/3) 2^{-j}
LeftCEReal geometric_seed(int j_max) {
  std::vector<Rational> qs;
  for (int j = 0; j <= j_max; ++j) qs.push_back(q(2, 3) - q(1, 3) * pow2(-j));
  return LeftCEReal(q(2, 3), std::move(qs));
}

}  // namespace

TEST_CASE("left-c.e. real from a schedule") {
  SECTION("W = {0} at stage 0 gives gamma = 35/108") {
    auto lce = left_ce_from_schedule(sched({{0, 0}}), 20);
    CHECK(lce.gamma() == q(35, 108));
  }
  SECTION("q_j strictly increasing below gamma") {
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
      auto lce = left_ce_from_schedule(rand_sched(rng), 20);
      for (int j = 0; j + 1 <= 20; ++j) {
        CHECK(lce.q(j) < lce.q(j + 1));
        CHECK(lce.q(j) < lce.gamma());
      }
      CHECK(lce.q(0) > 0);
    }
  }
  SECTION("base-3 digit at position x+3 is 2 exactly for x in W") {
    auto lce = left_ce_from_schedule(sched({{0, 0}, {3, 2}}), 10);
    Rational d = lce.gamma() - q(1, 4);
    for (int x = 0; x <= 5; ++x) {
      Int digit = floor_rational(d * rat_ipow(Rational(3), x + 3)) % 3;
      bool in_w = (x == 0 || x == 3);
      CHECK(digit == (in_w ? 2 : 0));
    }
  }
  SECTION("empty schedule rejected") {
    CHECK_THROWS_AS(left_ce_from_schedule(CESetSchedule{}, 5), domain_error);
  }
}

TEST_CASE("finite-atomic node norms follow the closed forms") {
  Exponent p{Rational(3)};
  auto lce = left_ce_from_schedule(sched({{0, 0}, {2, 1}}), 30);
  FiniteAtomicOracle oracle(3, lce, p);

  CHECK(oracle.node_mass(NodePath{}) == Rational(4) - lce.q(0));  // n + 1 - q_0
  for (size_t j = 0; j <= 6; ++j) {
    NodePath spine(std::vector<unsigned long>(j + 1, 0));
    CHECK(oracle.node_mass(spine) == 1 - lce.q(j));  // 1 - q_j at (0)^{j+1}
  }
  // 2^{-|mu|+1} below (1)
  CHECK(oracle.node_mass(NodePath{1}) == Rational(1));
  CHECK(oracle.node_mass(NodePath{1, 0}) == q(1, 2));
  CHECK(oracle.node_mass(NodePath{1, 0, 1}) == q(1, 4));
  // side cells: 2^{-|beta|} (q_k - q_{k-1})
  CHECK(oracle.node_mass(NodePath{0, 1}) == lce.q(1) - lce.q(0));
  CHECK(oracle.node_mass(NodePath{0, 0, 1, 0}) == (lce.q(2) - lce.q(1)) / 2);
  // atoms
  CHECK(oracle.node_mass(NodePath{2}) == Rational(1));
  CHECK(oracle.terminal(NodePath{3}) == Trit::yes);
  CHECK(oracle.member(NodePath{4}, 0) == Membership::out);
  CHECK(oracle.member(NodePath{2, 0}, 0) == Membership::out);
}

TEST_CASE("norms never consult ground truth") {
  Exponent p{q(3, 2)};
  auto lce = left_ce_from_schedule(sched({{1, 0}, {4, 3}}), 25);
  FiniteAtomicOracle with_gamma(2, lce, p);
  FiniteAtomicOracle without(2, lce.without_gamma(), p);
  CHECK(!without.label(NodePath{}, 20).has_value());
  CHECK(!without.greedy_limit(NodePath{0}, 20).has_value());
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    NodePath n;
    long len = rng.range(0, 6);
    for (long i = 0; i < len; ++i)
      n.ix.push_back(static_cast<unsigned long>(rng.range(0, 2)));
    if (with_gamma.member(n, 0) != Membership::in) continue;
    CHECK(with_gamma.node_norm_p(n, 25) == without.node_norm_p(n, 25));
  }
}

TEST_CASE("finite-atomic materialization validates and matches the oracle") {
  Exponent p{Rational(3)};
  Rng rng(1001);
  for (int t = 0; t < 4; ++t) {
    auto lce = left_ce_from_schedule(rand_sched(rng), 30);
    unsigned long n = t % 2 ? 1 : 3;
    FiniteAtomicOracle oracle(n, lce, p);
    auto mat = materialize(oracle, 6, 0, 30);
    auto rep = validate_disintegration(mat, p);
    INFO("violations: " << (rep.violations.empty() ? "none" : rep.violations[0]));
    CHECK(rep.all_passed());
    // closed forms overlap materialized norms at every node
    for (const NodePath& node : mat.tree.nodes()) {
      auto direct = norm_mass(mat.label(node), p, 25);
      CHECK(RationalInterval::of(direct).overlaps(
          RationalInterval::of(oracle.node_norm_p(node, 25))));
    }
  }
}

TEST_CASE("closed forms match materializations at depth 8 for ten schedules") {
  Exponent p{Rational(3)};
  Rng rng(886);
  for (int t = 0; t < 10; ++t) {
    auto lce = left_ce_from_schedule(rand_sched(rng), 30);
    FiniteAtomicOracle oracle(t % 2 ? 1 : 2, lce, p);
    auto mat = materialize(oracle, 8, 0, 26);
    for (const NodePath& node : mat.tree.nodes())
      CHECK(RationalInterval::of(norm_mass(mat.label(node), p, 24))
                .overlaps(RationalInterval::of(oracle.node_norm_p(node, 24))));
  }
}

TEST_CASE("linear density witness along the spine") {
  // || (e_0, 0) - (1-gamma)^{-1/p} phi((0)^{K+1}) ||_p^p = (gamma - q_K) / (1 - gamma)
  Exponent p{Rational(3)};
  auto lce = left_ce_from_schedule(sched({{0, 0}, {1, 1}}), 30);
  FiniteAtomicOracle oracle(2, lce, p);
  const Rational gamma = lce.gamma();
  for (size_t K : {0, 3, 7}) {
    NodePath spine(std::vector<unsigned long>(K + 1, 0));
    ApproxVector phi = *oracle.label(spine, 40);
    ComplexInterval inv_scale =
        ComplexInterval::real(rat_pow(1 - gamma, -Rational(1, 3), 40));
    ApproxVector e0 = ApproxVector::atom(
        0, ComplexInterval::exact(GaussianRational(Rational(1))), Dim::finite(2));
    ApproxVector diff = e0 - scale(inv_scale, phi);
    auto mass = norm_mass(diff, p, 20);
    CHECK(RationalInterval::of(mass).contains((gamma - lce.q(K)) / (1 - gamma)));
  }
}

TEST_CASE("infinite-atomic oracle norms") {
  Exponent p{Rational(3)};
  InfiniteAtomicBuilder b;
  b.schedules = {sched({{5, 0}, {6, 1}}), sched({{0, 0}}, true), sched({})};
  InfiniteAtomicOracle oracle(b, p, false);

  // ||phi((e))|| = 2^{-(e+1)}: p-mass 2^{-(e+1)p}
  for (long e = 0; e <= 3; ++e) {
    auto mass = oracle.node_norm_p(NodePath{static_cast<unsigned long>(e)}, 30);
    CHECK(mass.contains(pow2(-3 * (e + 1))));
  }
  // halving along every enumerated edge
  for (NodePath n : {NodePath{0}, NodePath{0, 1}, NodePath{1, 0}}) {
    auto parent = RationalInterval::of(oracle.node_norm_p(n, 30));
    auto child = RationalInterval::of(oracle.node_norm_p(n.child(1), 30));
    CHECK((child + child).overlaps(parent));
  }
  // root mass: sum 2^{-3(e+1)} = 1/7
  CHECK(oracle.node_norm_p(NodePath{}, 30).contains(q(1, 7)));
  // root residual after stage s: geometric tail
  CHECK(oracle.residual_mass(NodePath{}, 0, 30).contains(q(1, 7) - q(1, 8)));
}

TEST_CASE("infinite-atomic membership follows the enumeration") {
  Exponent p{Rational(3)};
  InfiniteAtomicBuilder b;
  b.schedules = {sched({{3, 1}, {7, 4}})};
  InfiniteAtomicOracle oracle(b, p, false);

  CHECK(oracle.member(NodePath{0}, 0) == Membership::in);
  CHECK(oracle.member(NodePath{1}, 0) == Membership::unknown);
  CHECK(oracle.member(NodePath{1}, 1) == Membership::in);
  // (0)^(0): needs one element of W_0; arrives at stage 1
  CHECK(oracle.member(NodePath{0, 0}, 0) == Membership::unknown);
  CHECK(oracle.member(NodePath{0, 0}, 1) == Membership::in);
  CHECK(oracle.member(NodePath{0, 0, 1}, 3) == Membership::unknown);
  CHECK(oracle.member(NodePath{0, 0, 1}, 4) == Membership::in);
  CHECK(oracle.member(NodePath{0, 2}, 9) == Membership::out);
  // monotone: in never degrades
  for (int s = 0; s < 8; ++s) {
    auto before = oracle.member(NodePath{0, 1}, s);
    auto after = oracle.member(NodePath{0, 1}, s + 1);
    if (before == Membership::in) CHECK(after == Membership::in);
  }
}

TEST_CASE("infinite-atomic materialization validates") {
  Exponent p{Rational(3)};
  Rng rng(77);
  InfiniteAtomicBuilder b;
  b.schedules = {rand_sched(rng), rand_sched(rng, true), rand_sched(rng), rand_sched(rng, true)};
  auto mat = materialize_infinite_atomic(b, p, 6, 30);
  auto rep = validate_disintegration(mat, p);
  INFO("violations: " << (rep.violations.empty() ? "none" : rep.violations[0]));
  CHECK(rep.all_passed());

  InfiniteAtomicOracle oracle(b, p, true);
  for (const NodePath& node : mat.tree.nodes()) {
    if (node.is_root()) continue;  // truncated sum, not the closed form
    auto direct = norm_mass(mat.label(node), p, 25);
    CHECK(RationalInterval::of(direct).overlaps(
        RationalInterval::of(oracle.node_norm_p(node, 25))));
  }
}

TEST_CASE("stage changes residual attribution, not the value enclosed") {
  Exponent p{Rational(3)};
  InfiniteAtomicBuilder b;
  b.schedules = {sched({{5, 0}, {6, 1}}), sched({{0, 0}}, true), sched({{1, 2}})};
  InfiniteAtomicOracle oracle(b, p, false);
  std::map<NodePath, GaussianRational> coeffs{
      {NodePath{}, GaussianRational(Rational(1))},
      {NodePath{0}, GaussianRational(q(-1, 2))},
      {NodePath{1}, GaussianRational(Rational(2))}};
  std::vector<RationalInterval> encs;
  for (int stage : {2, 6, 12})
    encs.push_back(RationalInterval::of(rational_vector_norm(oracle, coeffs, stage, 14)));
  for (size_t i = 0; i < encs.size(); ++i)
    for (size_t j = i + 1; j < encs.size(); ++j) CHECK(encs[i].overlaps(encs[j]));
}

TEST_CASE("finite summands split to singleton atoms") {
  Exponent p{Rational(3)};
  InfiniteAtomicBuilder b;
  b.schedules = {sched({{2, 0}, {9, 0}})};  // m_0 = 2: four atoms
  InfiniteAtomicOracle oracle(b, p, true);
  auto leaf = oracle.label(NodePath{0, 1, 0}, 30);
  REQUIRE(leaf.has_value());
  CHECK(leaf->atoms.size() == 1);
  CHECK(leaf->atoms.count(2));  // cell 10 -> index 2 of the block at offset 0
  auto full = oracle.label(NodePath{0}, 30);
  CHECK(full->atoms.size() == 4);
  CHECK(!oracle.label(NodePath{0, 1, 0, 0}, 30).has_value());
}

TEST_CASE("geometric seed behaves like the worked examples") {
  Exponent p{Rational(3)};
  auto lce = geometric_seed(30);
  FiniteAtomicOracle oracle(3, lce, p);
  CHECK(oracle.node_mass(NodePath{0, 0}) == q(1, 2));  // 1 - q_1
  CHECK(oracle.node_mass(NodePath{0, 1}) == q(1, 6));  // q_1 - q_0
  auto limit = oracle.greedy_limit(NodePath{0, 0}, 30);
  REQUIRE(limit.has_value());
  CHECK(limit->mass_p.contains(q(1, 3)));  // 1 - gamma
  CHECK(limit->vec.atoms.count(0) == 1);
}
