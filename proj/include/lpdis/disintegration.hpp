#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpdis/tree.hpp"
#include "lpdis/vector.hpp"

namespace lpdis {

// A materialized (finite) piece of a disintegration: labelled tree plus the
// set of nodes whose child lists were cut off by the truncation. Frontier
// marks may sit on internal nodes too: a root with an unbounded child list
// stays incomplete at every truncation.
struct ConcreteDisintegration {
  FiniteTree tree;
  std::map<NodePath, ApproxVector> labels;
  std::set<NodePath> frontier;

  const ApproxVector& label(const NodePath& n) const {
    auto it = labels.find(n);
    if (it == labels.end()) throw domain_error("no label at " + n.str());
    return it->second;
  }
};

struct ValidationReport {
  bool summative = true;
  bool separating = true;
  bool injective = true;
  bool non_vanishing = true;
  std::string linear_density = "not evaluated";
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool all_passed() const { return summative && separating && injective && non_vanishing; }
};

// Exact checks of the disintegration axioms on the materialized tree.
// Frontier nodes are exempt from summativity; linear density is not decidable
// at finite scale and is reported as such.
inline ValidationReport validate_disintegration(const ConcreteDisintegration& d,
                                                const Exponent& p) {
  ValidationReport rep;
  if (p.is_two()) rep.warnings.push_back("p = 2 is outside the supported theory");

  std::vector<NodePath> order(d.tree.nodes().begin(), d.tree.nodes().end());

  for (const NodePath& n : order) {
    if (!d.labels.count(n)) {
      rep.non_vanishing = false;
      rep.violations.push_back("missing label at " + n.str());
      continue;
    }
    if (d.label(n).is_zero()) {
      rep.non_vanishing = false;
      rep.violations.push_back("zero label at " + n.str());
    }
  }

  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j) {
      if (!d.labels.count(order[i]) || !d.labels.count(order[j])) continue;
      if (d.label(order[i]) == d.label(order[j])) {
        rep.injective = false;
        rep.violations.push_back("equal labels at " + order[i].str() + " and " + order[j].str());
      }
    }

  for (const NodePath& n : order) {
    auto kids = d.tree.children_of(n);
    if (kids.empty() || d.frontier.count(n)) continue;
    if (!d.labels.count(n)) continue;
    ApproxVector sum = ApproxVector::zero(d.label(n).dim);
    bool ok = true;
    for (const NodePath& c : kids) {
      if (!d.labels.count(c)) {
        ok = false;
        break;
      }
      sum = sum + d.label(c);
    }
    if (!ok) continue;
    if (!(sum == d.label(n))) {
      rep.summative = false;
      rep.violations.push_back("children do not sum to parent at " + n.str());
    }
  }

  for (size_t i = 0; i < order.size(); ++i)
    for (size_t j = i + 1; j < order.size(); ++j) {
      if (order[i].comparable(order[j])) continue;
      if (!d.labels.count(order[i]) || !d.labels.count(order[j])) continue;
      if (!support_disjoint(d.label(order[i]), d.label(order[j]))) {
        rep.separating = false;
        rep.violations.push_back("overlapping supports at " + order[i].str() + " and " +
                                 order[j].str());
      }
    }

  return rep;
}

}  // namespace lpdis
