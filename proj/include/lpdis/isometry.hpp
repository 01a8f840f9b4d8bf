#pragma once

#include "lpdis/chains.hpp"
#include "lpdis/projection.hpp"

namespace lpdis {

// Generator of the standard hybrid presentation: a basis atom e_index, or the
// indicator of the dyadic interval [pos 2^-level, (pos+1) 2^-level].
struct GenKey {
  enum class Kind { atom, cell } kind = Kind::atom;
  unsigned long index = 0;
  int level = 0;
  unsigned long pos = 0;

  static GenKey atom(unsigned long i) { return {Kind::atom, i, 0, 0}; }
  static GenKey cell(int level, unsigned long pos) { return {Kind::cell, 0, level, pos}; }

  std::string str() const {
    if (kind == Kind::atom) return "e" + std::to_string(index);
    return "chi:" + std::to_string(level) + ":" + std::to_string(pos);
  }
  static GenKey parse(std::string_view s) {
    if (!s.empty() && s[0] == 'e') return atom(std::stoul(std::string(s.substr(1))));
    if (s.rfind("chi:", 0) == 0) {
      auto rest = s.substr(4);
      auto colon = rest.find(':');
      if (colon != std::string_view::npos)
        return cell(std::stoi(std::string(rest.substr(0, colon))),
                    std::stoul(std::string(rest.substr(colon + 1))));
    }
    throw parse_error("bad generator key: " + std::string(s));
  }

  friend auto operator<=>(const GenKey&, const GenKey&) = default;
};

// Finite approximation of an isometric isomorphism out of the standard hybrid
// presentation: images of atoms and of dyadic indicators down to max_level,
// extended linearly to rational vectors on that grid.
struct PartialIsometry {
  std::map<GenKey, ApproxVector> images;
  unsigned long source_atoms = 0;
  int max_level = 0;
  int depth = 0;
  int precision = 0;
  Rational granularity{0};  // bound on unresolved boundary-cell mass

  const ApproxVector& image(const GenKey& g) const {
    auto it = images.find(g);
    if (it == images.end()) throw domain_error("no image for generator " + g.str());
    return it->second;
  }

  // v must have atoms below source_atoms and step cuts on the 2^-max_level grid
  ApproxVector apply(const HybridVector& v) const {
    ApproxVector out = ApproxVector::zero(images.empty() ? Dim::omega()
                                                         : images.begin()->second.dim);
    for (auto& [i, c] : v.atoms)
      out = out + scale(ComplexInterval::exact(c), image(GenKey::atom(i)));
    long cells = 1L << max_level;
    for (long j = 0; j < cells; ++j) {
      Rational a(j, cells), b(j + 1, cells);
      const GaussianRational& val = v.steps.at(a);
      if (val.is_zero()) continue;
      out = out + scale(ComplexInterval::exact(val),
                        image(GenKey::cell(max_level, static_cast<unsigned long>(j))));
    }
    // reject samples the grid cannot represent
    for (const Rational& cut : v.steps.cuts()) {
      Rational scaled = cut * cells;
      if (denominator(scaled) != 1)
        throw domain_error("step cuts finer than the materialized generators");
    }
    return out;
  }
};

// T1: e_k goes to the k-th extracted atom, normalized. Atoms are ordered by
// chain id; exact ground-truth limits are preferred over tip labels so the
// images stay purely atomic where the target's atoms are known.
inline PartialIsometry build_T1(const PresentationOracle& oracle,
                                const std::vector<AtomApprox>& atoms, int k) {
  Exponent p = oracle.exponent();
  if (auto dim = oracle.atomic_dimension())
    if (atoms.size() < *dim)
      throw domain_error("fewer atoms than the atomic dimension: " +
                         std::to_string(atoms.size()) + " < " + std::to_string(*dim));
  PartialIsometry out;
  out.precision = k;
  out.source_atoms = atoms.size();
  for (size_t i = 0; i < atoms.size(); ++i) {
    const AtomApprox& a = atoms[i];
    const ApproxVector* vec = a.limit_vec ? &*a.limit_vec : (a.vec ? &*a.vec : nullptr);
    if (!vec) throw domain_error("atom candidate without a materialized vector");
    DyadicInterval mass = a.limit_mass_p ? *a.limit_mass_p : a.norm_p;
    DyadicInterval nrm = interval_root(mass, p, k + 4);
    if (!(nrm.lo.to_rational() > 0))
      throw domain_error("atom candidate norm not bounded away from zero");
    RationalInterval inv{Rational(1) / nrm.hi.to_rational(),
                         Rational(1) / nrm.lo.to_rational()};
    out.images.emplace(GenKey::atom(static_cast<unsigned long>(i)),
                       scale(ComplexInterval::real(inv), *vec));
  }
  return out;
}

namespace detail {

// Measure-algebra mass transport: cells are the depth-d nodes with positive
// projected mass in lexicographic order; a dyadic interval of the source maps
// to the cells filling the proportional window of the cumulative mass. A cut
// landing inside a cell splits the cell's indicator at the exact rational
// point carrying the right mass fraction, so neighbouring images meet in a
// single (null) point. Cells whose labels are not a single constant piece
// fall back to a scalar theta^{1/p} weight, reported as granularity.
class MassTransport {
 public:
  MassTransport(const PresentationOracle& oracle, const ProjectionOracle& po, int depth,
                int stage, int k)
      : oracle_(oracle), po_(po), depth_(depth), stage_(stage), k_(k) {
    collect(NodePath{});
    total_ = RationalInterval::point(Rational(0));
    for (auto& c : cells_) total_ = total_ + c.mass;
    if (!(total_.lo > 0)) throw domain_error("no projected mass to transport");
    long grid = k_ + 4;
    inv_root_ = RationalInterval{
        pow_lower(Rational(1) / total_.hi, Rational(p().den(), p().num()), grid).to_rational(),
        pow_upper(Rational(1) / total_.lo, Rational(p().den(), p().num()), grid).to_rational()};
  }

  const RationalInterval& total_mass() const { return total_; }
  Rational granularity() const { return granularity_; }

  // normalized image of the indicator of [pos 2^-level, (pos+1) 2^-level]
  ApproxVector cell_image(int level, unsigned long pos) {
    Rational lo_cut = (Rational(pos) * total_.mid()) / rat_ipow(Rational(2), level);
    Rational hi_cut = (Rational(pos + 1) * total_.mid()) / rat_ipow(Rational(2), level);
    ApproxVector acc = ApproxVector::zero(dim());
    Rational cum(0);
    for (auto& c : cells_) {
      Rational m = c.mass.mid();
      Rational next = cum + m;
      if (next > lo_cut && cum < hi_cut) {
        bool starts_inside = lo_cut <= cum;
        bool ends_inside = next <= hi_cut;
        ApproxVector vec = po_.proj_vector(c.path, k_);
        if (starts_inside && ends_inside) {
          acc = acc + vec;
        } else {
          Rational off_lo = starts_inside ? Rational(0) : (lo_cut - cum) / m;
          Rational off_hi = ends_inside ? Rational(1) : (hi_cut - cum) / m;
          acc = acc + cell_slice(vec, off_lo, off_hi, m);
        }
      }
      cum = next;
    }
    return scale(ComplexInterval::real(inv_root_), acc);
  }

 private:
  struct Cell {
    NodePath path;
    RationalInterval mass;
  };

  const Exponent p() const { return oracle_.exponent(); }
  Dim dim() const {
    auto d = oracle_.atomic_dimension();
    return d ? Dim::finite(*d) : Dim::omega();
  }

  void collect(const NodePath& n) {
    RationalInterval m = po_.proj_mass_p(n, k_ + 6);
    if (!(m.hi > 0)) return;
    if (static_cast<int>(n.length()) >= depth_) {
      cells_.push_back({n, std::move(m)});
      return;
    }
    auto kids = oracle_.children(n, stage_);
    if (kids.empty()) {
      // stage-starved or terminal with mass: keep it as a coarse cell
      cells_.push_back({n, std::move(m)});
      return;
    }
    std::sort(kids.begin(), kids.end());
    for (const NodePath& c : kids) collect(c);
  }

  // the sub-vector of a cell carrying the mass fraction [off_lo, off_hi]
  ApproxVector cell_slice(const ApproxVector& vec, const Rational& off_lo,
                          const Rational& off_hi, const Rational& cell_mass) {
    auto pieces = vec.steps.nonzero_pieces();
    if (vec.atoms.empty() && pieces.size() == 1) {
      // constant value: mass fraction equals length fraction, split exactly
      auto& [a, b, val] = pieces[0];
      Rational left = a + off_lo * (b - a);
      Rational right = a + off_hi * (b - a);
      ApproxVector out(vec.dim);
      if (left < right)
        out.steps = StepFunction<ComplexInterval>::indicator(left, right, val);
      return out;
    }
    RationalInterval weight = pow_interval(RationalInterval{off_hi - off_lo, off_hi - off_lo},
                                           Rational(p().den(), p().num()), k_ + 4);
    granularity_ += cell_mass;
    return scale(ComplexInterval::real(weight), vec);
  }

  const PresentationOracle& oracle_;
  const ProjectionOracle& po_;
  int depth_;
  int stage_;
  int k_;
  std::vector<Cell> cells_;
  RationalInterval total_{Rational(0), Rational(0)};
  RationalInterval inv_root_{Rational(1), Rational(1)};
  Rational granularity_{0};
};

}  // namespace detail

// T2: the continuous factor is carried over by mass transport on the projected
// disintegration; isometric on dyadic indicators up to the reported interval
// widths and granularity.
inline PartialIsometry build_T2(const PresentationOracle& oracle, const ProjectionOracle& po,
                                int depth, int stage, int k, int max_level) {
  detail::MassTransport transport(oracle, po, depth, stage, k);
  PartialIsometry out;
  out.depth = depth;
  out.precision = k;
  out.max_level = max_level;
  for (int level = 0; level <= max_level; ++level)
    for (unsigned long pos = 0; pos < (1UL << level); ++pos)
      out.images.emplace(GenKey::cell(level, pos), transport.cell_image(level, pos));
  out.granularity = transport.granularity();
  return out;
}

// T(v, f) = T1(v) + T2(f): the generator maps are disjoint by construction,
// so gluing is a union plus a collision check.
inline PartialIsometry glue(const PartialIsometry& t1, const PartialIsometry& t2) {
  PartialIsometry out = t2;
  out.source_atoms = t1.source_atoms;
  out.precision = std::min(t1.precision == 0 ? t2.precision : t1.precision, t2.precision);
  for (auto& [g, img] : t1.images)
    if (!out.images.emplace(g, img).second)
      throw domain_error("generator collision at " + g.str());
  return out;
}

struct IsometryReport {
  int samples = 0;
  Rational tolerance{0};
  Rational max_deviation{0};
  bool all_within = true;
  bool scaling_exact = true;
  std::vector<std::string> failures;
};

namespace detail {

struct SampleRng {
  unsigned long long state;
  explicit SampleRng(unsigned long long seed) : state(seed ^ 0x5bf03635ca1f7b1cULL) {}
  unsigned long long next() {
    unsigned long long z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  long range(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<unsigned long long>(hi - lo + 1));
  }
};

inline HybridVector random_sample(SampleRng& rng, unsigned long atoms, int level) {
  HybridVector v(Dim::omega());
  for (unsigned long i = 0; i < atoms; ++i)
    if (rng.range(0, 2) == 0)
      v.set_atom(i, GaussianRational{Rational(rng.range(-8, 8), 8),
                                     Rational(rng.range(-8, 8), 8)});
  long cells = 1L << level;
  std::vector<Rational> cuts;
  std::vector<GaussianRational> vals;
  cuts.push_back(Rational(0));
  for (long j = 0; j < cells; ++j) {
    cuts.push_back(Rational(j + 1, cells));
    vals.push_back(rng.range(0, 2) == 0
                       ? GaussianRational()
                       : GaussianRational{Rational(rng.range(-8, 8), 8),
                                          Rational(rng.range(-8, 8), 8)});
  }
  v.steps = StepFunction<GaussianRational>(std::move(cuts), std::move(vals));
  return v;
}

}  // namespace detail

// Norm preservation on seeded random rational vectors of the standard
// presentation, plus exactness of scaling at the coefficient level.
inline IsometryReport verify_isometry(const PartialIsometry& T, const Exponent& p, int samples,
                                      unsigned long long seed, int k, const Rational& tolerance) {
  IsometryReport rep;
  rep.samples = samples;
  rep.tolerance = tolerance;
  detail::SampleRng rng(seed);
  for (int s = 0; s < samples; ++s) {
    HybridVector v = detail::random_sample(rng, T.source_atoms, T.max_level);
    ApproxVector tv = T.apply(v);
    RationalInterval nv = RationalInterval::of(norm(v, p, k));
    RationalInterval ntv = RationalInterval::of(norm(tv, p, k));
    Rational dev = std::max(Rational(nv.hi - ntv.lo),
                            std::max(Rational(ntv.hi - nv.lo), Rational(0)));
    rep.max_deviation = std::max(rep.max_deviation, dev);
    if (dev > tolerance) {
      rep.all_within = false;
      rep.failures.push_back("sample " + std::to_string(s));
    }
    ApproxVector doubled = T.apply(scale(GaussianRational(Rational(2)), v));
    ApproxVector scaled_img = scale(ComplexInterval::exact(GaussianRational(Rational(2))), tv);
    if (!(doubled == scaled_img)) rep.scaling_exact = false;
  }
  return rep;
}

}  // namespace lpdis
