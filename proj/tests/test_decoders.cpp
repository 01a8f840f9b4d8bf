#include <catch2/catch_amalgamated.hpp>

#include "lpdis/chains.hpp"
#include "lpdis/projection.hpp"
#include "test_util.hpp"

using namespace lpdis;
using testutil::Rng;

namespace {

Rational q(long n, long d) { return Rational(n, d); }

CESetSchedule rand_sched(Rng& rng, bool total) {
  CESetSchedule s;
  s.total = total;
  std::set<unsigned long> used;
  long count = rng.range(1, 4);
  for (long i = 0; i < count; ++i) {
    unsigned long x = static_cast<unsigned long>(rng.range(0, 8));
    if (used.insert(x).second) s.entries.emplace_back(x, static_cast<int>(rng.range(0, 4)));
  }
  return s;
}

}  // namespace

TEST_CASE("ground-truth projection norms, finite case") {
  Exponent p{Rational(3)};
  auto lce = left_ce_from_schedule(CESetSchedule{{{0, 0}}}, 30);  // gamma = 35/108
  FiniteAtomicOracle oracle(3, lce, p);
  auto po = FiniteAtomicProjection::onto_atom(oracle, 0);

  // || P(phi((0))) ||_p = (1 - gamma)^{1/p}
  auto enc = po.proj_norm(NodePath{0}, 25);
  auto expected = rat_pow(1 - lce.gamma(), q(1, 3), 30);
  CHECK(RationalInterval::of(enc).overlaps(RationalInterval::of(expected)));
  CHECK(enc.width() <= pow2(-25));

  auto cont = FiniteAtomicProjection::onto_continuous(oracle);
  // spine nodes: continuous mass gamma - q_{k-1}
  auto enc2 = cont.proj_norm(NodePath{0, 0}, 25);
  Rational mass = lce.gamma() - lce.q(1);
  CHECK(rat_ipow(enc2.lo.to_rational(), 3) <= mass);
  CHECK(mass <= rat_ipow(enc2.hi.to_rational(), 3));
  // atoms die under the continuous projection
  CHECK(cont.proj_norm(NodePath{2}, 25).is_exact_zero());
  CHECK(cont.proj_vector(NodePath{2}, 25).is_zero());
}

TEST_CASE("ground-truth projection norms, infinite case") {
  Exponent p{Rational(3)};
  InfiniteAtomicBuilder b;
  CESetSchedule fin{{{2, 0}}};
  CESetSchedule tot{{{0, 0}}, true};
  b.schedules = {fin, tot, fin, tot};
  InfiniteAtomicProjection po{InfiniteAtomicOracle(b, p, true)};

  CHECK(po.proj_norm(NodePath{0}, 25).is_exact_zero());
  CHECK(po.proj_norm(NodePath{2}, 25).is_exact_zero());
  CHECK(po.proj_norm(NodePath{1}, 25).contains(q(1, 4)));   // 2^{-(e+1)}
  CHECK(po.proj_norm(NodePath{3}, 25).contains(q(1, 16)));
  // root: (sum of the two surviving masses)^{1/3}
  Rational mass = q(1, 64) + q(1, 4096);
  auto root = po.proj_norm(NodePath{}, 25);
  CHECK(rat_ipow(root.lo.to_rational(), 3) <= mass);
  CHECK(mass <= rat_ipow(root.hi.to_rational(), 3));
}

TEST_CASE("gamma decoding") {
  Exponent p{Rational(3)};
  SECTION("seed schedule") {
    auto lce = left_ce_from_schedule(CESetSchedule{{{0, 0}}}, 30);
    FiniteAtomicOracle oracle(1, lce, p);
    auto po = FiniteAtomicProjection::onto_atom(oracle, 0);
    auto enc = decode_gamma(po, p, 20);
    CHECK(enc.contains(q(35, 108)));
    CHECK(enc.width() <= pow2(-20));
    auto tighter = decode_gamma(po, p, 25);
    CHECK(enc.contains(tighter));
  }
  SECTION("ten random schedules across exponents") {
    Rng rng(314);
    for (int t = 0; t < 10; ++t) {
      Exponent pp{t % 2 ? q(3, 2) : q(3, 1)};
      auto lce = left_ce_from_schedule(rand_sched(rng, false), 30);
      FiniteAtomicOracle oracle(2, lce, pp);
      auto po = FiniteAtomicProjection::onto_atom(oracle, 0);
      auto enc = decode_gamma(po, pp, 20);
      CHECK(enc.contains(lce.gamma()));
      CHECK(enc.width() <= pow2(-20));
    }
  }
}

TEST_CASE("membership decoding") {
  Exponent p{Rational(3)};
  SECTION("W = {0,3} gives bits 1,0,0,1") {
    CESetSchedule s{{{0, 0}, {3, 2}}};
    auto lce = left_ce_from_schedule(s, 30);
    FiniteAtomicOracle oracle(1, lce, p);
    auto po = FiniteAtomicProjection::onto_atom(oracle, 0);
    auto bits = decode_membership(decode_gamma(po, p, 22), 3);
    CHECK(bits == std::vector<bool>{true, false, false, true});
  }
  SECTION("random schedules recover exactly") {
    Rng rng(2718);
    for (int t = 0; t < 12; ++t) {
      CESetSchedule s = rand_sched(rng, false);
      auto lce = left_ce_from_schedule(s, 30);
      FiniteAtomicOracle oracle(1, lce, p);
      auto po = FiniteAtomicProjection::onto_atom(oracle, 0);
      auto bits = decode_membership(decode_gamma(po, p, 22), 8);
      auto w = s.elements();
      for (int x = 0; x <= 8; ++x)
        CHECK(bits[static_cast<size_t>(x)] == (w.count(static_cast<unsigned long>(x)) != 0));
    }
  }
  SECTION("insufficient precision is refused") {
    DyadicInterval wide{Dyadic(Int(1), -2), Dyadic(Int(1), -1)};
    CHECK_THROWS_AS(decode_membership(wide, 8), insufficient_precision);
  }
}

TEST_CASE("fin decoding") {
  Exponent p{Rational(3)};
  Rng rng(161803);
  InfiniteAtomicBuilder b;
  std::vector<bool> truth;
  for (int e = 0; e < 8; ++e) {
    bool total = e % 2 == 1;
    b.schedules.push_back(rand_sched(rng, total));
    truth.push_back(!total);
  }
  InfiniteAtomicOracle oracle(b, p, true);
  InfiniteAtomicProjection po{oracle};
  for (unsigned long e = 0; e < 8; ++e) {
    CHECK(decode_fin(po, e) == truth[e]);
    // both branches decided with slack >= 2^{-(e+3)}
    Rational est = po.proj_norm(NodePath{e}, static_cast<int>(e) + 4).mid();
    Rational threshold = pow2(-(static_cast<long>(e) + 2));
    Rational slack = est < threshold ? threshold - est : est - threshold;
    CHECK(slack >= pow2(-(static_cast<long>(e) + 3)));
  }
}

TEST_CASE("p-mass splits across the projection and its complement") {
  Exponent p{Rational(3)};
  auto lce = left_ce_from_schedule(CESetSchedule{{{1, 0}, {2, 1}}}, 30);
  FiniteAtomicOracle oracle(2, lce, p);
  auto cont = FiniteAtomicProjection::onto_continuous(oracle);
  std::vector<NodePath> nodes{NodePath{}, NodePath{0}, NodePath{0, 0}, NodePath{1},
                              NodePath{0, 1}, NodePath{1, 0, 1}};
  for (const NodePath& nu : nodes) {
    auto whole = RationalInterval::of(oracle.node_norm_p(nu, 25));
    auto proj = cont.proj_vector(nu, 25);
    ApproxVector rest = *oracle.label(nu, 25) - proj;
    auto split = RationalInterval::of(norm_mass(proj, p, 25)) +
                 RationalInterval::of(norm_mass(rest, p, 25));
    CHECK(whole.overlaps(split));
  }
}
