#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "lpdis/oracle.hpp"

namespace lpdis {

// Record of one almost-norm-maximizing selection: enough interval data to
// re-verify the defining inequality later without the oracle.
struct AnmCertificate {
  NodePath parent;
  NodePath chosen;
  long level = 0;  // |chosen|
  DyadicInterval residual_bound;
  DyadicInterval chosen_norm_p;
  std::vector<std::pair<NodePath, DyadicInterval>> sibling_norms_p;

  Rational tolerance() const { return pow2(-level); }

  // every enumerated sibling is within 2^-level of the chosen child, and the
  // unenumerated remainder is bounded below the threshold
  bool verified() const {
    if (!(residual_bound.hi.to_rational() < pow2(-(level + 2)))) return false;
    Rational floor = chosen_norm_p.lo.to_rational() + tolerance();
    for (auto& [sib, enc] : sibling_norms_p)
      if (!(enc.hi.to_rational() <= floor)) return false;
    return true;
  }
};

struct Chain {
  unsigned long id = 0;
  std::vector<NodePath> nodes;  // consecutive nodes are parent and child
  bool open = true;             // deepest node not known to be terminal
  std::vector<AnmCertificate> certificates;

  const NodePath& deepest() const { return nodes.back(); }
};

struct ChainPartition {
  std::vector<Chain> chains;
  std::map<NodePath, unsigned long> assignment;
  int stage = 0;
  int depth = 0;
};

// Pick a child whose p-mass is within 2^-|child| of every sibling, enumerated
// or not: the residual mass bounds the unenumerated ones, sibling norms are
// compared at width 2^-(|child|+3), ties break to the smallest index.
inline std::pair<NodePath, AnmCertificate> select_anm_child(const PresentationOracle& oracle,
                                                            const NodePath& parent, int stage,
                                                            int k) {
  long level = static_cast<long>(parent.length()) + 1;
  auto kids = oracle.children(parent, stage);
  if (kids.empty()) {
    if (oracle.terminal(parent) == Trit::yes)
      throw domain_error("terminal node has no children: " + parent.str());
    throw insufficient_stage("no children of " + parent.str() + " enumerated by stage " +
                             std::to_string(stage));
  }
  std::sort(kids.begin(), kids.end());

  int kr = std::max<long>(k, level + 4);
  DyadicInterval residual = oracle.residual_mass(parent, stage, kr);
  if (!(residual.hi.to_rational() < pow2(-(level + 2))))
    throw insufficient_stage("residual mass at " + parent.str() +
                             " not resolved below 2^-(level+2) at stage " +
                             std::to_string(stage));

  int kn = std::max<long>(k, level + 3);
  AnmCertificate cert;
  cert.parent = parent;
  cert.level = level;
  cert.residual_bound = residual;

  std::optional<size_t> best;
  Rational best_mid;
  std::vector<DyadicInterval> norms;
  norms.reserve(kids.size());
  for (size_t i = 0; i < kids.size(); ++i) {
    norms.push_back(oracle.node_norm_p(kids[i], kn));
    Rational mid = norms.back().mid();
    if (!best || mid > best_mid) {
      best = i;
      best_mid = mid;
    }
  }
  cert.chosen = kids[*best];
  cert.chosen_norm_p = norms[*best];
  for (size_t i = 0; i < kids.size(); ++i)
    if (i != *best) cert.sibling_norms_p.emplace_back(kids[i], norms[i]);
  return {cert.chosen, std::move(cert)};
}

// Stagewise partition of the enumerated tree into almost-norm-maximizing
// chains: breadth-first over nodes up to the depth bound, a new chain at every
// unassigned node, each new chain immediately extended downward greedily.
inline ChainPartition partition_chains(const PresentationOracle& oracle, int depth, int stage,
                                       int k) {
  ChainPartition part;
  part.stage = stage;
  part.depth = depth;
  if (oracle.member(NodePath{}, stage) != Membership::in)
    throw not_enumerated("root not enumerated");

  std::vector<NodePath> level{NodePath{}};
  while (!level.empty()) {
    for (const NodePath& n : level) {
      if (part.assignment.count(n)) continue;
      Chain chain;
      chain.id = part.chains.size();
      chain.nodes.push_back(n);
      part.assignment.emplace(n, chain.id);
      while (static_cast<int>(chain.deepest().length()) < depth &&
             !oracle.children(chain.deepest(), stage).empty()) {
        auto [child, cert] = select_anm_child(oracle, chain.deepest(), stage, k);
        part.assignment.emplace(child, chain.id);
        chain.nodes.push_back(child);
        chain.certificates.push_back(std::move(cert));
      }
      chain.open = oracle.terminal(chain.deepest()) != Trit::yes;
      part.chains.push_back(std::move(chain));
    }
    std::vector<NodePath> next;
    for (const NodePath& n : level) {
      if (static_cast<int>(n.length()) >= depth) continue;
      for (const NodePath& c : oracle.children(n, stage)) next.push_back(c);
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    level = std::move(next);
  }
  return part;
}

// Finite-depth stand-in for a chain's limit: the deepest node's data plus a
// residual enclosure for the mass not yet known converged. Ground-truth
// oracles advertise the exact limit; otherwise the only certain lower bound
// on the limit's mass is zero and the residual stays the full node mass.
struct AtomApprox {
  unsigned long chain_id = 0;
  NodePath deepest;
  std::optional<ApproxVector> vec;  // label of the deepest node, when materializable
  DyadicInterval norm_p;            // ||phi(deepest)||_p^p
  DyadicInterval residual_p;
  std::optional<ApproxVector> limit_vec;
  std::optional<DyadicInterval> limit_mass_p;
};

inline AtomApprox chain_limit(const PresentationOracle& oracle, const ChainPartition& part,
                              unsigned long chain_id, int k) {
  if (chain_id >= part.chains.size()) throw domain_error("no such chain");
  const Chain& chain = part.chains[chain_id];
  AtomApprox out;
  out.chain_id = chain_id;
  out.deepest = chain.deepest();
  out.norm_p = oracle.node_norm_p(out.deepest, k + 2);
  out.vec = oracle.label(out.deepest, k);
  if (oracle.terminal(out.deepest) == Trit::yes) {
    out.residual_p = DyadicInterval::point(0);
    out.limit_vec = out.vec;
    out.limit_mass_p = out.norm_p;
    return out;
  }
  if (auto ld = oracle.greedy_limit(out.deepest, k + 2)) {
    out.residual_p = out.norm_p - ld->mass_p;
    out.limit_vec = std::move(ld->vec);
    out.limit_mass_p = ld->mass_p;
    return out;
  }
  out.residual_p = out.norm_p;  // limit mass lower bound: 0
  return out;
}

struct AtomExtraction {
  std::vector<AtomApprox> candidates;          // p-mass enclosure reaches eps
  std::vector<unsigned long> vanishing_chains; // below eps at this depth (no proof of 0)
  bool candidates_disjoint = true;             // where materializable
};

// eps thresholds the p-mass of the deepest chain node.
inline AtomExtraction extract_atoms(const PresentationOracle& oracle, const ChainPartition& part,
                                    const Rational& eps, int k = 24) {
  if (!(eps > 0)) throw domain_error("eps must be positive");
  AtomExtraction out;
  for (unsigned long id = 0; id < part.chains.size(); ++id) {
    AtomApprox al = chain_limit(oracle, part, id, k);
    if (al.norm_p.hi.to_rational() >= eps)
      out.candidates.push_back(std::move(al));
    else
      out.vanishing_chains.push_back(id);
  }
  for (size_t i = 0; i < out.candidates.size(); ++i)
    for (size_t j = i + 1; j < out.candidates.size(); ++j) {
      const auto& a = out.candidates[i].vec;
      const auto& b = out.candidates[j].vec;
      if (a && b && !support_disjoint(*a, *b)) out.candidates_disjoint = false;
    }
  return out;
}

// Chains whose downset contains nu: the chain's nodes are totally ordered by
// extension, so it suffices to test the deepest one.
inline std::vector<unsigned long> chains_through(const ChainPartition& part, const NodePath& nu) {
  std::vector<unsigned long> out;
  for (const Chain& c : part.chains)
    if (nu.is_prefix_of(c.deepest())) out.push_back(c.id);
  return out;
}

struct ProjectionResult {
  ApproxVector vec;
  DyadicInterval error_p;  // p-mass bound on the difference from the true projection
};

// phi(nu) minus the limits of every chain whose downset contains nu. Chains
// with advertised limits contribute no residual error (their enclosures are
// pointwise sound); fallback tip labels contribute their full residual.
inline ProjectionResult project_node(const PresentationOracle& oracle,
                                     const ChainPartition& part, const NodePath& nu, int k) {
  auto phi = oracle.label(nu, k);
  if (!phi) throw domain_error("oracle cannot materialize a label at " + nu.str());
  ProjectionResult out{std::move(*phi), DyadicInterval::point(0)};
  Rational err_hi(0);
  for (unsigned long id : chains_through(part, nu)) {
    AtomApprox al = chain_limit(oracle, part, id, k);
    if (al.limit_vec) {
      out.vec = out.vec - *al.limit_vec;
    } else if (al.vec) {
      out.vec = out.vec - *al.vec;
      err_hi += std::max(Rational(0), al.residual_p.hi.to_rational());
    } else {
      throw domain_error("no approximation available for chain " + std::to_string(id));
    }
  }
  out.error_p = DyadicInterval{Dyadic(0, 0), dyadic_ceil(err_hi, k + 2)};
  return out;
}

// Linear extension: sum coeffs[nu] * P phi(nu), with the per-chain corrections
// grouped so each limit is subtracted once with its cumulative coefficient.
inline ProjectionResult project_vector(const PresentationOracle& oracle,
                                       const ChainPartition& part,
                                       const std::map<NodePath, GaussianRational>& coeffs,
                                       int k) {
  Exponent p = oracle.exponent();
  ApproxVector acc = ApproxVector::zero(Dim::omega());
  bool first = true;
  std::map<unsigned long, GaussianRational> chain_coeff;
  for (auto& [nu, alpha] : coeffs) {
    if (alpha.is_zero()) continue;
    if (oracle.member(nu, part.stage) != Membership::in)
      throw not_enumerated("coefficient on a node not enumerated: " + nu.str());
    auto phi = oracle.label(nu, k);
    if (!phi) throw domain_error("oracle cannot materialize a label at " + nu.str());
    ApproxVector term = scale(ComplexInterval::exact(alpha), *phi);
    acc = first ? std::move(term) : acc + term;
    first = false;
    for (unsigned long id : chains_through(part, nu)) {
      auto [it, inserted] = chain_coeff.emplace(id, alpha);
      if (!inserted) it->second = it->second + alpha;
    }
  }
  if (first) return {ApproxVector::zero(Dim::omega()), DyadicInterval::point(0)};

  Rational err_hi(0);
  for (auto& [id, sigma] : chain_coeff) {
    if (sigma.is_zero()) continue;
    AtomApprox al = chain_limit(oracle, part, id, k);
    if (al.limit_vec) {
      acc = acc - scale(ComplexInterval::exact(sigma), *al.limit_vec);
    } else if (al.vec) {
      acc = acc - scale(ComplexInterval::exact(sigma), *al.vec);
      Rational factor = abs_pow(sigma, p, 12).hi.to_rational();
      err_hi += factor * std::max(Rational(0), al.residual_p.hi.to_rational());
    } else {
      throw domain_error("no approximation available for chain " + std::to_string(id));
    }
  }
  return {std::move(acc), DyadicInterval{Dyadic(0, 0), dyadic_ceil(err_hi, k + 2)}};
}

}  // namespace lpdis
