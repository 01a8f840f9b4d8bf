#pragma once

#include <compare>
#include <set>
#include <string>
#include <vector>

#include "lpdis/rational.hpp"

namespace lpdis {

// Finite sequence of naturals addressing a tree node; the empty path is the root.
struct NodePath {
  std::vector<unsigned long> ix;

  NodePath() = default;
  NodePath(std::initializer_list<unsigned long> v) : ix(v) {}
  explicit NodePath(std::vector<unsigned long> v) : ix(std::move(v)) {}

  size_t length() const { return ix.size(); }
  bool is_root() const { return ix.empty(); }

  NodePath parent() const {
    if (ix.empty()) throw domain_error("root has no parent");
    return NodePath(std::vector<unsigned long>(ix.begin(), ix.end() - 1));
  }
  NodePath child(unsigned long i) const {
    NodePath c = *this;
    c.ix.push_back(i);
    return c;
  }
  unsigned long last() const {
    if (ix.empty()) throw domain_error("root has no last entry");
    return ix.back();
  }

  // this is an initial segment of o (including equality)
  bool is_prefix_of(const NodePath& o) const {
    if (ix.size() > o.ix.size()) return false;
    return std::equal(ix.begin(), ix.end(), o.ix.begin());
  }
  bool comparable(const NodePath& o) const { return is_prefix_of(o) || o.is_prefix_of(*this); }

  // "0.1.3"; the root is the empty string
  std::string str() const {
    std::string s;
    for (size_t i = 0; i < ix.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(ix[i]);
    }
    return s;
  }
  static NodePath parse(std::string_view s) {
    NodePath p;
    if (s.empty()) return p;
    size_t pos = 0;
    while (pos <= s.size()) {
      size_t dot = s.find('.', pos);
      std::string_view tok = s.substr(pos, dot == std::string_view::npos ? dot : dot - pos);
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string_view::npos)
        throw parse_error("bad node path: " + std::string(s));
      p.ix.push_back(std::stoul(std::string(tok)));
      if (dot == std::string_view::npos) break;
      pos = dot + 1;
    }
    return p;
  }

  friend auto operator<=>(const NodePath&, const NodePath&) = default;
};

// breadth-first order: by length, then lexicographically
inline bool level_less(const NodePath& a, const NodePath& b) {
  if (a.length() != b.length()) return a.length() < b.length();
  return a < b;
}

// All prefixes of the given nodes (downward closure in the prefix order).
inline std::set<NodePath> downset(const std::set<NodePath>& nodes) {
  std::set<NodePath> out;
  for (const NodePath& n : nodes) {
    NodePath cur;
    out.insert(cur);
    for (unsigned long i : n.ix) {
      cur.ix.push_back(i);
      out.insert(cur);
    }
  }
  return out;
}

// Prefix-closed finite set of paths containing the root.
class FiniteTree {
 public:
  FiniteTree() { nodes_.insert(NodePath{}); }
  explicit FiniteTree(std::set<NodePath> nodes) : nodes_(std::move(nodes)) {
    nodes_.insert(NodePath{});
    for (const NodePath& n : nodes_)
      if (!n.is_root() && !nodes_.count(n.parent()))
        throw domain_error("tree is not prefix-closed at " + n.str());
  }

  void insert_closed(const NodePath& n) {
    NodePath cur;
    nodes_.insert(cur);
    for (unsigned long i : n.ix) {
      cur.ix.push_back(i);
      nodes_.insert(cur);
    }
  }

  bool contains(const NodePath& n) const { return nodes_.count(n) != 0; }
  const std::set<NodePath>& nodes() const { return nodes_; }
  size_t size() const { return nodes_.size(); }

  std::vector<NodePath> children_of(const NodePath& n) const {
    std::vector<NodePath> out;
    auto it = nodes_.upper_bound(n);
    for (; it != nodes_.end() && n.is_prefix_of(*it); ++it)
      if (it->length() == n.length() + 1) out.push_back(*it);
    return out;
  }

  bool is_leaf(const NodePath& n) const { return children_of(n).empty(); }

 private:
  std::set<NodePath> nodes_;
};

}  // namespace lpdis
