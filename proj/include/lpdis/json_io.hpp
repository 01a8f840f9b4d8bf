#pragma once

#include <memory>

#include <json.hpp>

#include "lpdis/chains.hpp"
#include "lpdis/isometry.hpp"
#include "lpdis/projection.hpp"

// JSON forms of every externally visible object. Conventions: rationals are
// "num/den" strings, dyadic interval endpoints are "m*2^e" strings, scalars
// are "a/b+c/di" strings when exact and {"re": interval, "im": interval}
// objects otherwise, node paths are "0.1.3" strings (root = "").

namespace lpdis::io {

using json = nlohmann::json;

inline json to_json(const Rational& r) { return format_rational(r); }
inline Rational rational_from(const json& j) { return parse_rational(j.get<std::string>()); }

inline json to_json(const DyadicInterval& d) {
  return json{{"lo", format_dyadic(d.lo)}, {"hi", format_dyadic(d.hi)}};
}
inline DyadicInterval interval_from(const json& j) {
  return {parse_dyadic(j.at("lo").get<std::string>()),
          parse_dyadic(j.at("hi").get<std::string>())};
}

// rational-interval endpoints serialize exactly: dyadics as "m*2^e", anything
// else as "num/den"
inline json endpoint_to_json(const Rational& r) {
  if (is_dyadic(r)) return format_dyadic(Dyadic(numerator(r), -static_cast<long>(msb(denominator(r)))));
  return format_rational(r);
}
inline Rational endpoint_from(const json& j) {
  std::string s = j.get<std::string>();
  if (s.find("*2^") != std::string::npos) return parse_dyadic(s).to_rational();
  return parse_rational(s);
}
inline json to_json(const RationalInterval& r) {
  return json{{"lo", endpoint_to_json(r.lo)}, {"hi", endpoint_to_json(r.hi)}};
}
inline RationalInterval rational_interval_from(const json& j) {
  return {endpoint_from(j.at("lo")), endpoint_from(j.at("hi"))};
}

inline json to_json(const ComplexInterval& c) {
  if (auto exact = c.exact_value()) return format_gaussian(*exact);
  return json{{"re", to_json(c.re)}, {"im", to_json(c.im)}};
}
inline ComplexInterval complex_from(const json& j) {
  if (j.is_string()) return ComplexInterval::exact(parse_gaussian(j.get<std::string>()));
  return {rational_interval_from(j.at("re")), rational_interval_from(j.at("im"))};
}

inline json to_json(const Dim& d) {
  if (d.is_omega()) return "omega";
  return *d.bound;
}
inline Dim dim_from(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "omega") throw parse_error("bad dimension: " + j.dump());
    return Dim::omega();
  }
  return Dim::finite(j.get<unsigned long>());
}

inline json to_json(const ApproxVector& v) {
  json atoms = json::object();
  for (auto& [i, c] : v.atoms) atoms[std::to_string(i)] = to_json(c);
  json steps = json::array();
  for (auto& [a, b, c] : v.steps.nonzero_pieces())
    steps.push_back(json{{"from", to_json(a)}, {"to", to_json(b)}, {"value", to_json(c)}});
  return json{{"atoms", atoms}, {"steps", steps}, {"dim", to_json(v.dim)}};
}

inline ApproxVector vector_from(const json& j) {
  ApproxVector v(dim_from(j.at("dim")));
  for (auto& [key, val] : j.at("atoms").items())
    v.set_atom(std::stoul(key), complex_from(val));
  for (auto& piece : j.at("steps"))
    v.steps = v.steps + StepFunction<ComplexInterval>::indicator(
                            rational_from(piece.at("from")), rational_from(piece.at("to")),
                            complex_from(piece.at("value")));
  return v;
}

inline json to_json(const ConcreteDisintegration& d) {
  json nodes = json::array();
  for (const NodePath& n : d.tree.nodes()) {
    json entry{{"path", n.ix},
               {"frontier", d.frontier.count(n) != 0}};
    if (d.labels.count(n)) entry["label"] = to_json(d.label(n));
    nodes.push_back(std::move(entry));
  }
  return json{{"nodes", nodes}};
}

inline ConcreteDisintegration tree_from(const json& j) {
  ConcreteDisintegration d;
  for (auto& entry : j.at("nodes")) {
    NodePath n(entry.at("path").get<std::vector<unsigned long>>());
    d.tree.insert_closed(n);
    if (entry.contains("label")) d.labels.emplace(n, vector_from(entry.at("label")));
    if (entry.value("frontier", false)) d.frontier.insert(n);
  }
  return d;
}

inline json to_json(const ValidationReport& r) {
  return json{{"summative", r.summative},
              {"separating", r.separating},
              {"injective", r.injective},
              {"non_vanishing", r.non_vanishing},
              {"linear_density", r.linear_density},
              {"violations", r.violations},
              {"warnings", r.warnings},
              {"all_passed", r.all_passed()}};
}

inline json to_json(const CESetSchedule& s) {
  json elements = json::array();
  for (auto& [x, st] : s.entries) elements.push_back(json::array({x, st}));
  return json{{"elements", elements}, {"total", s.total}};
}
inline CESetSchedule schedule_from(const json& j) {
  CESetSchedule s;
  for (auto& e : j.at("elements"))
    s.entries.emplace_back(e.at(0).get<unsigned long>(), e.at(1).get<int>());
  s.total = j.value("total", false);
  s.validate();
  return s;
}

inline json to_json(const AnmCertificate& c) {
  json siblings = json::array();
  std::optional<DyadicInterval> hull;
  for (auto& [path, enc] : c.sibling_norms_p) {
    siblings.push_back(json{{"path", path.str()}, {"norm_p", to_json(enc)}});
    hull = hull ? DyadicInterval{std::min(hull->lo, enc.lo), std::max(hull->hi, enc.hi)} : enc;
  }
  json out{{"parent", c.parent.str()},
           {"chosen", c.chosen.str()},
           {"tolerance", "2^-" + std::to_string(c.level)},
           {"chosen_norm_p", to_json(c.chosen_norm_p)},
           {"residual_bound", to_json(c.residual_bound)},
           {"siblings", siblings},
           {"verified", c.verified()}};
  if (hull) out["sibling_bound"] = to_json(*hull);
  return out;
}

inline json to_json(const ChainPartition& p) {
  json chains = json::array();
  for (const Chain& c : p.chains) {
    json nodes = json::array();
    for (const NodePath& n : c.nodes) nodes.push_back(n.str());
    json certs = json::array();
    for (const auto& cert : c.certificates) certs.push_back(to_json(cert));
    chains.push_back(json{{"id", c.id},
                          {"nodes", nodes},
                          {"open", c.open},
                          {"certificates", certs}});
  }
  return json{{"depth", p.depth}, {"stage", p.stage}, {"chains", chains}};
}

inline AnmCertificate certificate_from(const json& j) {
  AnmCertificate c;
  c.parent = NodePath::parse(j.at("parent").get<std::string>());
  c.chosen = NodePath::parse(j.at("chosen").get<std::string>());
  std::string tol = j.at("tolerance").get<std::string>();
  if (tol.rfind("2^-", 0) != 0) throw parse_error("bad tolerance: " + tol);
  c.level = std::stol(tol.substr(3));
  c.chosen_norm_p = interval_from(j.at("chosen_norm_p"));
  c.residual_bound = interval_from(j.at("residual_bound"));
  for (auto& sib : j.at("siblings"))
    c.sibling_norms_p.emplace_back(NodePath::parse(sib.at("path").get<std::string>()),
                                   interval_from(sib.at("norm_p")));
  return c;
}

inline ChainPartition partition_from(const json& j) {
  ChainPartition p;
  p.depth = j.at("depth").get<int>();
  p.stage = j.at("stage").get<int>();
  for (auto& cj : j.at("chains")) {
    Chain c;
    c.id = cj.at("id").get<unsigned long>();
    for (auto& n : cj.at("nodes")) {
      c.nodes.push_back(NodePath::parse(n.get<std::string>()));
      p.assignment.emplace(c.nodes.back(), c.id);
    }
    c.open = cj.at("open").get<bool>();
    for (auto& cert : cj.at("certificates")) c.certificates.push_back(certificate_from(cert));
    p.chains.push_back(std::move(c));
  }
  return p;
}

inline json to_json(const AtomApprox& a) {
  json out{{"chain", a.chain_id},
           {"deepest", a.deepest.str()},
           {"norm_p", to_json(a.norm_p)},
           {"residual_p", to_json(a.residual_p)}};
  if (a.vec) out["vector"] = to_json(*a.vec);
  if (a.limit_vec) out["limit_vector"] = to_json(*a.limit_vec);
  if (a.limit_mass_p) out["limit_mass_p"] = to_json(*a.limit_mass_p);
  return out;
}

inline json to_json(const ProjectionResult& r) {
  return json{{"vector", to_json(r.vec)}, {"error_p", to_json(r.error_p)}};
}

inline json to_json(const PartialIsometry& t) {
  json images = json::object();
  for (auto& [g, img] : t.images) images[g.str()] = to_json(img);
  return json{{"source_atoms", t.source_atoms},
              {"max_level", t.max_level},
              {"depth", t.depth},
              {"precision", t.precision},
              {"granularity", to_json(t.granularity)},
              {"images", images}};
}
inline PartialIsometry isometry_from(const json& j) {
  PartialIsometry t;
  t.source_atoms = j.at("source_atoms").get<unsigned long>();
  t.max_level = j.at("max_level").get<int>();
  t.depth = j.value("depth", 0);
  t.precision = j.value("precision", 0);
  t.granularity = rational_from(j.at("granularity"));
  for (auto& [key, val] : j.at("images").items())
    t.images.emplace(GenKey::parse(key), vector_from(val));
  return t;
}

inline std::map<NodePath, GaussianRational> coeffs_from(const json& j) {
  std::map<NodePath, GaussianRational> out;
  for (auto& [key, val] : j.items())
    out[NodePath::parse(key)] = parse_gaussian(val.get<std::string>());
  return out;
}

// --- presentation descriptors ----------------------------------------------
// {"kind": "dyadic"} | {"kind": "hybrid", "n": 3}
// | {"kind": "finite_atomic", "n": 3, "schedule": {...}, "j_max": 48}
// | {"kind": "infinite_atomic", "schedules": [{...}, ...]}
// | {"kind": "tree", "tree": {...}}

inline std::unique_ptr<PresentationOracle> load_presentation(const json& j, const Exponent& p) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "dyadic") return std::make_unique<StandardDyadicOracle>(p);
  if (kind == "hybrid")
    return std::make_unique<StandardHybridOracle>(j.at("n").get<unsigned long>(), p);
  if (kind == "finite_atomic") {
    auto lce = left_ce_from_schedule(schedule_from(j.at("schedule")), j.value("j_max", 48));
    return std::make_unique<FiniteAtomicOracle>(j.at("n").get<unsigned long>(), std::move(lce),
                                                p);
  }
  if (kind == "infinite_atomic") {
    InfiniteAtomicBuilder b;
    for (auto& s : j.at("schedules")) b.schedules.push_back(schedule_from(s));
    return std::make_unique<InfiniteAtomicOracle>(std::move(b), p, true);
  }
  if (kind == "tree") return std::make_unique<TreeOracle>(tree_from(j.at("tree")), p);
  throw parse_error("unknown presentation kind: " + kind);
}

// the matching ground-truth projection onto the nonatomic part
inline std::unique_ptr<ProjectionOracle> load_projection(const json& j, const Exponent& p) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "hybrid")
    return std::make_unique<StandardHybridProjection>(
        StandardHybridOracle(j.at("n").get<unsigned long>(), p));
  if (kind == "finite_atomic") {
    auto lce = left_ce_from_schedule(schedule_from(j.at("schedule")), j.value("j_max", 48));
    return std::make_unique<FiniteAtomicProjection>(FiniteAtomicProjection::onto_continuous(
        FiniteAtomicOracle(j.at("n").get<unsigned long>(), std::move(lce), p)));
  }
  if (kind == "infinite_atomic") {
    InfiniteAtomicBuilder b;
    for (auto& s : j.at("schedules")) b.schedules.push_back(schedule_from(s));
    return std::make_unique<InfiniteAtomicProjection>(
        InfiniteAtomicOracle(std::move(b), p, true));
  }
  throw parse_error("no projection oracle for presentation kind: " + kind);
}

}  // namespace lpdis::io
