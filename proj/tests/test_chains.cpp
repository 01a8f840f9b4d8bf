#include <catch2/catch_amalgamated.hpp>

#include "lpdis/chains.hpp"
#include "lpdis/finite_atomic.hpp"
#include "lpdis/infinite_atomic.hpp"
#include "test_util.hpp"

using namespace lpdis;
using testutil::Rng;

namespace {

Rational q(long n, long d) { return Rational(n, d); }

LeftCEReal geometric_seed(int j_max) {
  std::vector<Rational> qs;
  for (int j = 0; j <= j_max; ++j) qs.push_back(q(2, 3) - q(1, 3) * pow2(-j));
  return LeftCEReal(q(2, 3), std::move(qs));
}

InfiniteAtomicBuilder small_builder() {
  InfiniteAtomicBuilder b;
  CESetSchedule fin2;   // m_0 = 2
  fin2.entries = {{4, 0}, {9, 1}};
  CESetSchedule tot;    // W_1 infinite
  tot.entries = {{0, 0}};
  tot.total = true;
  CESetSchedule fin0;   // m_2 = 0: (2) is itself an atom
  b.schedules = {fin2, tot, fin0};
  return b;
}

// every enumerated node up to the depth is assigned to exactly one chain
void check_partition_cover(const PresentationOracle& oracle, const ChainPartition& part) {
  size_t total = 0;
  for (const Chain& c : part.chains) {
    total += c.nodes.size();
    for (const NodePath& n : c.nodes) {
      REQUIRE(part.assignment.count(n));
      CHECK(part.assignment.at(n) == c.id);
    }
  }
  CHECK(total == part.assignment.size());
  std::vector<NodePath> level{NodePath{}};
  while (!level.empty()) {
    std::vector<NodePath> next;
    for (const NodePath& n : level) {
      CHECK(part.assignment.count(n) == 1);
      if (static_cast<int>(n.length()) < part.depth)
        for (const NodePath& c : oracle.children(n, part.stage)) next.push_back(c);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    level = std::move(next);
  }
}

}  // namespace

TEST_CASE("anm child selection") {
  Exponent p3{Rational(3)};
  SECTION("standard dyadic breaks the tie to the left") {
    StandardDyadicOracle oracle{p3};
    auto [child, cert] = select_anm_child(oracle, NodePath{}, 0, 10);
    CHECK(child == NodePath{0});
    CHECK(cert.verified());
  }
  SECTION("infinite-atomic root at stage 0") {
    InfiniteAtomicOracle oracle(small_builder(), p3, false);
    auto [child, cert] = select_anm_child(oracle, NodePath{}, 0, 10);
    CHECK(child == NodePath{0});
    CHECK(cert.verified());
    CHECK(cert.residual_bound.hi.to_rational() < q(1, 8));
  }
  SECTION("spine child wins on the geometric seed") {
    FiniteAtomicOracle oracle(3, geometric_seed(20), p3);
    auto [child, cert] = select_anm_child(oracle, NodePath{0}, 0, 10);
    CHECK(child == NodePath{0, 0});  // mass 1/2 beats the side cell's 1/6
    CHECK(cert.verified());
  }
  SECTION("terminal nodes are rejected") {
    FiniteAtomicOracle oracle(3, geometric_seed(20), p3);
    CHECK_THROWS_AS(select_anm_child(oracle, NodePath{2}, 0, 10), domain_error);
  }
  SECTION("insufficient stage is reported, not guessed") {
    InfiniteAtomicOracle oracle(small_builder(), Exponent{Rational(1)}, false);
    // at p = 1 the stage-0 root tail is 1/2 >= 2^-3
    CHECK_THROWS_AS(select_anm_child(oracle, NodePath{}, 0, 10), insufficient_stage);
  }
}

TEST_CASE("partition of the standard dyadic tree at depth 2") {
  StandardDyadicOracle oracle{Exponent{Rational(3)}};
  auto part = partition_chains(oracle, 2, 0, 10);
  REQUIRE(part.chains.size() == 4);
  CHECK(part.chains[0].nodes == std::vector<NodePath>{NodePath{}, NodePath{0}, NodePath{0, 0}});
  CHECK(part.chains[1].nodes == std::vector<NodePath>{NodePath{1}, NodePath{1, 0}});
  CHECK(part.chains[2].nodes == std::vector<NodePath>{NodePath{0, 1}});
  CHECK(part.chains[3].nodes == std::vector<NodePath>{NodePath{1, 1}});
  check_partition_cover(oracle, part);
}

TEST_CASE("partitions cover and certify across presentations") {
  Exponent p{Rational(3)};
  SECTION("standard dyadic, depth 6") {
    StandardDyadicOracle oracle{p};
    auto part = partition_chains(oracle, 6, 0, 10);
    check_partition_cover(oracle, part);
    for (const Chain& c : part.chains)
      for (const auto& cert : c.certificates) CHECK(cert.verified());
  }
  SECTION("finite-atomic, depth 8") {
    FiniteAtomicOracle oracle(3, geometric_seed(20), p);
    auto part = partition_chains(oracle, 8, 0, 10);
    check_partition_cover(oracle, part);
    for (const Chain& c : part.chains)
      for (const auto& cert : c.certificates) CHECK(cert.verified());
    // the chain through (0) follows the spine
    unsigned long spine_chain = part.assignment.at(NodePath{0});
    CHECK(part.chains[spine_chain].deepest() ==
          NodePath(std::vector<unsigned long>(8, 0)));
  }
  SECTION("infinite-atomic, depth 6, stage 8") {
    InfiniteAtomicOracle oracle(small_builder(), p, false);
    auto part = partition_chains(oracle, 6, 8, 10);
    check_partition_cover(oracle, part);
    for (const Chain& c : part.chains)
      for (const auto& cert : c.certificates) CHECK(cert.verified());
  }
}

TEST_CASE("chain masses never increase along a chain") {
  Exponent p{q(3, 2)};
  FiniteAtomicOracle oracle(2, geometric_seed(24), p);
  auto part = partition_chains(oracle, 9, 0, 12);
  for (const Chain& c : part.chains)
    for (size_t i = 0; i + 1 < c.nodes.size(); ++i) {
      auto a = oracle.node_norm_p(c.nodes[i], 20);
      auto b = oracle.node_norm_p(c.nodes[i + 1], 20);
      CHECK(b.lo.to_rational() <= a.hi.to_rational());
    }
}

TEST_CASE("chain limits") {
  Exponent p{Rational(3)};
  SECTION("terminal chains are exact") {
    FiniteAtomicOracle oracle(3, geometric_seed(20), p);
    auto part = partition_chains(oracle, 6, 0, 10);
    unsigned long id = part.assignment.at(NodePath{2});
    auto al = chain_limit(oracle, part, id, 20);
    CHECK(al.residual_p.is_exact_zero());
    REQUIRE(al.limit_vec.has_value());
    CHECK(al.limit_vec->atoms.count(1));
    CHECK(al.norm_p.contains(Rational(1)));
  }
  SECTION("dyadic chains vanish") {
    StandardDyadicOracle oracle{p};
    auto part = partition_chains(oracle, 7, 0, 10);
    auto al = chain_limit(oracle, part, 0, 20);
    CHECK(al.norm_p.contains(pow2(-7)));
    REQUIRE(al.limit_mass_p.has_value());
    CHECK(al.limit_mass_p->is_exact_zero());
  }
  SECTION("the spine chain carries the hidden atom") {
    int depth = 9;
    FiniteAtomicOracle oracle(3, geometric_seed(24), p);
    auto part = partition_chains(oracle, depth, 0, 12);
    unsigned long id = part.assignment.at(NodePath{0});
    auto al = chain_limit(oracle, part, id, 24);
    // limit mass 1 - gamma = 1/3; residual encloses gamma - q_{d-1}
    REQUIRE(al.limit_mass_p.has_value());
    CHECK(al.limit_mass_p->contains(q(1, 3)));
    CHECK(al.residual_p.contains(q(2, 3) - (q(2, 3) - q(1, 3) * pow2(-(depth - 1)))));
    // without ground truth the residual honestly stays the full node mass
    FiniteAtomicOracle blind(3, geometric_seed(24).without_gamma(), p);
    auto part2 = partition_chains(blind, depth, 0, 12);
    auto al2 = chain_limit(blind, part2, part2.assignment.at(NodePath{0}), 24);
    CHECK(!al2.limit_vec.has_value());
    CHECK(al2.residual_p == al2.norm_p);
  }
}

TEST_CASE("greedy selection may leave the spine before settling") {
  // gamma = 4/5 with a big jump q_0 = 1/10 -> q_1 = 7/10: at (0) the side cell
  // (mass 3/5) beats the spine child (mass 3/10), so the chain through (0)
  // diverts and the hidden atom belongs to the chain starting at (0,0).
  Exponent p{Rational(3)};
  std::vector<Rational> qs{q(1, 10)};
  for (int j = 1; j <= 24; ++j) qs.push_back(q(4, 5) - q(1, 10) * pow2(-(j - 1)));
  FiniteAtomicOracle oracle(1, LeftCEReal(q(4, 5), qs), p);

  auto [child, cert] = select_anm_child(oracle, NodePath{0}, 0, 10);
  CHECK(child == NodePath{0, 1});
  CHECK(cert.verified());

  auto part = partition_chains(oracle, 8, 0, 12);
  auto diverted = chain_limit(oracle, part, part.assignment.at(NodePath{0}), 20);
  REQUIRE(diverted.limit_mass_p.has_value());
  CHECK(diverted.limit_mass_p->is_exact_zero());
  auto settled = chain_limit(oracle, part, part.assignment.at(NodePath{0, 0}), 20);
  REQUIRE(settled.limit_mass_p.has_value());
  CHECK(settled.limit_mass_p->contains(q(1, 5)));  // 1 - gamma

  auto ext = extract_atoms(oracle, part, q(1, 8));
  REQUIRE(ext.candidates.size() == 1);
  CHECK(ext.candidates[0].deepest == NodePath(std::vector<unsigned long>(8, 0)));

  // the projection still subtracts the atom exactly once
  auto res = project_node(oracle, part, NodePath{0}, 24);
  auto mass = norm_mass(res.vec, p, 20);
  CHECK(mass.contains(q(4, 5) - q(1, 10)));  // gamma - q_0
}

TEST_CASE("atom extraction") {
  Exponent p{Rational(3)};
  SECTION("nonatomic presentation yields no candidates") {
    StandardDyadicOracle oracle{p};
    auto part = partition_chains(oracle, 6, 0, 10);
    auto ext = extract_atoms(oracle, part, q(1, 8));
    CHECK(ext.candidates.empty());
    CHECK(ext.vanishing_chains.size() == part.chains.size());
  }
  SECTION("three atoms recovered from the adversarial tree") {
    FiniteAtomicOracle oracle(3, geometric_seed(30), p);
    auto part = partition_chains(oracle, 12, 0, 14);
    auto ext = extract_atoms(oracle, part, q(1, 8));
    REQUIRE(ext.candidates.size() == 3);
    CHECK(ext.candidates_disjoint);
    // chain-id order: spine first, then the two terminal atoms
    auto n0 = interval_root(ext.candidates[0].norm_p, p, 20);
    auto expected = rat_pow(q(1, 3), q(1, 3), 24);  // (1-gamma)^{1/p}
    CHECK(n0.lo.to_rational() <= expected.hi.to_rational() + q(1, 256));
    CHECK(expected.lo.to_rational() <= n0.hi.to_rational() + q(1, 256));
    CHECK(ext.candidates[1].norm_p.contains(Rational(1)));
    CHECK(ext.candidates[2].norm_p.contains(Rational(1)));
  }
}

TEST_CASE("projection onto the nonatomic part") {
  Exponent p{Rational(3)};
  FiniteAtomicOracle oracle(3, geometric_seed(30), p);
  auto part = partition_chains(oracle, 8, 0, 12);

  SECTION("the spine node sheds its atom") {
    auto res = project_node(oracle, part, NodePath{0}, 24);
    CHECK(res.error_p.hi.to_rational() == 0);
    auto mass = norm_mass(res.vec, p, 20);
    CHECK(mass.contains(q(1, 3)));  // gamma - q_0
    // the continuous part survives untouched
    CHECK(res.vec.steps.support_measure() == q(1, 3));
  }
  SECTION("no atoms below the unit subtree") {
    auto res = project_node(oracle, part, NodePath{1, 0}, 24);
    CHECK(res.vec == *oracle.label(NodePath{1, 0}, 24));
    CHECK(res.error_p.hi.to_rational() == 0);
  }
  SECTION("blind projection reports its own uselessness") {
    FiniteAtomicOracle blind(3, geometric_seed(30).without_gamma(), p);
    auto part2 = partition_chains(blind, 8, 0, 12);
    // labels are unavailable without ground truth
    CHECK_THROWS_AS(project_node(blind, part2, NodePath{0}, 24), domain_error);
  }
}

TEST_CASE("projection of finite summands vanishes") {
  Exponent p{Rational(3)};
  InfiniteAtomicOracle oracle(small_builder(), p, true);
  auto part = partition_chains(oracle, 6, 8, 12);
  auto res = project_node(oracle, part, NodePath{0}, 30);  // m_0 = 2: purely atomic
  CHECK(res.error_p.hi.to_rational() == 0);
  auto mass = norm_mass(res.vec, p, 60);
  CHECK(mass.lo.to_rational() <= 0);
  CHECK(mass.hi.to_rational() <= pow2(-40));
}

TEST_CASE("project_vector") {
  Exponent p{Rational(3)};
  FiniteAtomicOracle oracle(2, geometric_seed(30), p);
  auto part = partition_chains(oracle, 8, 0, 12);

  SECTION("zero coefficients give the zero vector") {
    std::map<NodePath, GaussianRational> coeffs{{NodePath{0}, GaussianRational()}};
    auto res = project_vector(oracle, part, coeffs, 20);
    CHECK(res.vec.is_zero());
  }
  SECTION("singletons agree with project_node") {
    std::map<NodePath, GaussianRational> coeffs{{NodePath{0}, GaussianRational(Rational(1))}};
    auto a = project_vector(oracle, part, coeffs, 20);
    auto b = project_node(oracle, part, NodePath{0}, 20);
    CHECK(a.vec == b.vec);
  }
  SECTION("applying the projection twice changes nothing") {
    std::map<NodePath, GaussianRational> coeffs{
        {NodePath{}, GaussianRational(q(1, 2))},
        {NodePath{0}, GaussianRational(Rational(1))},
        {NodePath{1}, GaussianRational(q(-1, 3))}};
    auto once = project_vector(oracle, part, coeffs, 24);
    // ground truth: the projection just drops the atomic part
    ApproxVector truth = once.vec;
    truth.atoms.clear();
    auto diff = norm(once.vec - truth, p, 20);
    CHECK(diff.hi.to_rational() <= pow2(-6));
  }
}
