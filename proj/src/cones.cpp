#include "sph/cones.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <sstream>

namespace sph {

namespace {

bool lex_less(const RatVector& a, const RatVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) != b(i)) return a(i) < b(i);
  return false;
}

Rat dot(const RatVector& a, const RatVector& b) { return a.dot(b); }

// Double description: incremental intersection of halfspaces, with the
// lineality space factored out explicitly and combinatorial adjacency for
// the pointed part.
struct DDRay {
  RatVector v;
  std::vector<int> active;  // sorted indices of tight constraints
};

struct DDState {
  std::vector<RatVector> lineality;
  std::vector<DDRay> rays;
  int next_index = 0;
};

std::vector<int> intersect_sorted(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

bool subset_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

void add_inequality(DDState& st, const RatVector& h) {
  const int idx = st.next_index++;
  // If h is nonzero on the lineality space, split one lineality vector off
  // as a new extreme ray; all prior constraints vanish on it.
  for (size_t i = 0; i < st.lineality.size(); ++i) {
    Rat hv = dot(h, st.lineality[i]);
    if (hv == 0) continue;
    RatVector l0 = st.lineality[i];
    if (hv < 0) {
      l0 = -l0;
      hv = -hv;
    }
    st.lineality.erase(st.lineality.begin() + i);
    for (RatVector& l : st.lineality) {
      Rat c = dot(h, l) / hv;
      if (c != 0) l -= c * l0;
    }
    for (DDRay& r : st.rays) {
      Rat c = dot(h, r.v) / hv;
      if (c != 0) r.v = primitive(RatVector(r.v - c * l0));
      r.active.push_back(idx);
    }
    DDRay nr;
    nr.v = primitive(l0);
    for (int k = 0; k < idx; ++k) nr.active.push_back(k);
    st.rays.push_back(std::move(nr));
    return;
  }

  std::vector<Rat> val(st.rays.size());
  for (size_t i = 0; i < st.rays.size(); ++i) val[i] = dot(h, st.rays[i].v);
  std::vector<DDRay> next;
  for (size_t i = 0; i < st.rays.size(); ++i) {
    if (val[i] > 0) {
      next.push_back(st.rays[i]);
    } else if (val[i] == 0) {
      DDRay r = st.rays[i];
      r.active.push_back(idx);
      next.push_back(std::move(r));
    }
  }
  for (size_t p = 0; p < st.rays.size(); ++p) {
    if (val[p] <= 0) continue;
    for (size_t n = 0; n < st.rays.size(); ++n) {
      if (val[n] >= 0) continue;
      std::vector<int> common =
          intersect_sorted(st.rays[p].active, st.rays[n].active);
      bool adjacent = true;
      for (size_t o = 0; o < st.rays.size(); ++o) {
        if (o == p || o == n) continue;
        if (subset_sorted(common, st.rays[o].active)) {
          adjacent = false;
          break;
        }
      }
      if (!adjacent) continue;
      DDRay r;
      r.v = primitive(RatVector(val[p] * st.rays[n].v - val[n] * st.rays[p].v));
      r.active = std::move(common);
      r.active.push_back(idx);
      next.push_back(std::move(r));
    }
  }
  st.rays = std::move(next);
}

struct GeneratorData {
  std::vector<RatVector> lineality;  // canonical RREF rows, primitive
  std::vector<RatVector> rays;       // primitive, reduced mod lineality, sorted
};

GeneratorData dd_solve(Eigen::Index ambient,
                       const std::vector<RatVector>& inequalities,
                       const std::vector<RatVector>& equalities) {
  DDState st;
  for (Eigen::Index i = 0; i < ambient; ++i) {
    RatVector e = RatVector::Zero(ambient);
    e(i) = 1;
    st.lineality.push_back(e);
  }
  for (const RatVector& e : equalities) {
    if (e.isZero(Rat(0))) continue;
    add_inequality(st, e);
    add_inequality(st, RatVector(-e));
  }
  for (const RatVector& h : inequalities) {
    if (h.isZero(Rat(0))) continue;
    add_inequality(st, h);
  }

  GeneratorData out;
  if (!st.lineality.empty()) {
    RatMatrix m(static_cast<Eigen::Index>(st.lineality.size()), ambient);
    for (size_t i = 0; i < st.lineality.size(); ++i)
      m.row(static_cast<Eigen::Index>(i)) = st.lineality[i].transpose();
    RationalSubspace lin = RationalSubspace::from_rows(m);
    for (Eigen::Index i = 0; i < lin.dim(); ++i)
      out.lineality.push_back(primitive(lin.basis_vector(i)));
    // Reduce rays modulo the lineality pivots for a canonical representative.
    for (DDRay& r : st.rays) {
      RatVector v = r.v;
      for (Eigen::Index i = 0; i < lin.dim(); ++i) {
        Eigen::Index piv = lin.pivot_columns()[i];
        if (v(piv) != 0) v -= v(piv) * lin.basis_vector(i);
      }
      if (!v.isZero(Rat(0))) out.rays.push_back(primitive(v));
    }
  } else {
    for (DDRay& r : st.rays) out.rays.push_back(primitive(r.v));
  }
  std::sort(out.rays.begin(), out.rays.end(), lex_less);
  out.rays.erase(std::unique(out.rays.begin(), out.rays.end()),
                 out.rays.end());
  return out;
}

}  // namespace

RationalCone RationalCone::from_halfspaces(
    Eigen::Index ambient, const std::vector<RatVector>& inequalities,
    const std::vector<RatVector>& equalities) {
  RationalCone c;
  c.ambient_ = ambient;
  GeneratorData prim = dd_solve(ambient, inequalities, equalities);
  c.lineality_ = prim.lineality;
  c.rays_ = prim.rays;
  // Canonical halfspaces = canonical generators of the dual.
  GeneratorData dual = dd_solve(ambient, c.rays_, c.lineality_);
  c.inequalities_ = dual.rays;
  c.equalities_ = dual.lineality;
  return c;
}

RationalCone RationalCone::from_generators(
    Eigen::Index ambient, const std::vector<RatVector>& rays,
    const std::vector<RatVector>& lineality) {
  GeneratorData dual = dd_solve(ambient, rays, lineality);
  RationalCone c;
  c.ambient_ = ambient;
  c.inequalities_ = dual.rays;
  c.equalities_ = dual.lineality;
  GeneratorData prim = dd_solve(ambient, c.inequalities_, c.equalities_);
  c.lineality_ = prim.lineality;
  c.rays_ = prim.rays;
  return c;
}

RationalCone RationalCone::zero(Eigen::Index ambient) {
  return from_generators(ambient, {});
}

RationalCone RationalCone::full(Eigen::Index ambient) {
  return from_halfspaces(ambient, {});
}

Eigen::Index RationalCone::dim() const {
  return ambient_ - static_cast<Eigen::Index>(equalities_.size());
}

bool RationalCone::operator==(const RationalCone& o) const {
  return ambient_ == o.ambient_ && rays_ == o.rays_ &&
         lineality_ == o.lineality_;
}

RationalCone::Position RationalCone::contains(const RatVector& x) const {
  for (const RatVector& e : equalities_)
    if (dot(e, x) != 0) return Position::outside;
  bool tight = false;
  for (const RatVector& h : inequalities_) {
    Rat v = dot(h, x);
    if (v < 0) return Position::outside;
    if (v == 0) tight = true;
  }
  return tight ? Position::boundary : Position::interior;
}

RationalSubspace RationalCone::span() const {
  if (equalities_.empty()) return RationalSubspace::full(ambient_);
  RatMatrix m(static_cast<Eigen::Index>(equalities_.size()), ambient_);
  for (size_t i = 0; i < equalities_.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = equalities_[i].transpose();
  return kernel(m);
}

RationalCone dual_cone(const RationalCone& c) {
  // The synchronized canonical descriptions make duality a swap.
  return RationalCone::from_generators(c.ambient_dim(), c.inequalities(),
                                       c.equalities());
}

std::vector<RatVector> extreme_rays(const RationalCone& c) { return c.rays(); }

RationalCone face(const RationalCone& c, const RatVector& f) {
  for (const RatVector& l : c.lineality())
    if (dot(f, l) != 0)
      throw std::invalid_argument("face functional nonzero on lineality");
  for (const RatVector& r : c.rays())
    if (dot(f, r) < 0)
      throw std::invalid_argument("face functional negative on the cone");
  std::vector<RatVector> eqs = c.equalities();
  eqs.push_back(f);
  return RationalCone::from_halfspaces(c.ambient_dim(), c.inequalities(), eqs);
}

bool is_face_of(const RationalCone& c, const RationalCone& candidate) {
  if (c.ambient_dim() != candidate.ambient_dim()) return false;
  for (const RatVector& r : candidate.rays())
    if (c.contains(r) == RationalCone::Position::outside) return false;
  for (const RatVector& l : candidate.lineality()) {
    if (c.contains(l) == RationalCone::Position::outside) return false;
    if (c.contains(RatVector(-l)) == RationalCone::Position::outside)
      return false;
  }
  RatVector f = RatVector::Zero(c.ambient_dim());
  for (const RatVector& h : c.inequalities()) {
    bool tight = true;
    for (const RatVector& r : candidate.rays())
      if (dot(h, r) != 0) {
        tight = false;
        break;
      }
    if (tight)
      for (const RatVector& l : candidate.lineality())
        if (dot(h, l) != 0) {
          tight = false;
          break;
        }
    if (tight) f += h;
  }
  return face(c, f) == candidate;
}

namespace {

Eigen::Index rank_of(const std::vector<RatVector>& vs, Eigen::Index ambient) {
  if (vs.empty()) return 0;
  RatMatrix m(static_cast<Eigen::Index>(vs.size()), ambient);
  for (size_t i = 0; i < vs.size(); ++i)
    m.row(static_cast<Eigen::Index>(i)) = vs[i].transpose();
  return static_cast<Eigen::Index>(rref_in_place(m).size());
}

// Pulling triangulation of a pointed cone given by extreme rays: recurse on
// the facets not containing the lexicographically smallest ray.
void triangulate_pointed(Eigen::Index ambient, const std::vector<RatVector>& rays,
                         std::vector<std::vector<RatVector>>& out) {
  if (rays.empty()) {
    out.push_back({});
    return;
  }
  if (rank_of(rays, ambient) == static_cast<Eigen::Index>(rays.size())) {
    out.push_back(rays);
    return;
  }
  RationalCone c = RationalCone::from_generators(ambient, rays);
  const RatVector& r0 = c.rays().front();  // rays are sorted: lex-min
  for (const RatVector& h : c.inequalities()) {
    if (dot(h, r0) == 0) continue;
    RationalCone f = face(c, h);
    std::vector<std::vector<RatVector>> sub;
    triangulate_pointed(ambient, f.rays(), sub);
    for (auto& simplex : sub) {
      simplex.push_back(r0);
      std::sort(simplex.begin(), simplex.end(), lex_less);
      out.push_back(std::move(simplex));
    }
  }
}

bool lattice_basis_extendable(const std::vector<RatVector>& gens,
                              Eigen::Index ambient) {
  // Generators extend to a lattice basis iff the gcd of all maximal minors
  // of the integer generator matrix is 1.
  const Eigen::Index k = static_cast<Eigen::Index>(gens.size());
  if (k == 0) return true;
  RatMatrix m(k, ambient);
  for (Eigen::Index i = 0; i < k; ++i) m.row(i) = gens[i].transpose();
  std::vector<Eigen::Index> cols(ambient);
  for (Eigen::Index i = 0; i < ambient; ++i) cols[i] = i;
  std::vector<Eigen::Index> pick(k);
  Int g = 0;
  std::function<void(Eigen::Index, Eigen::Index)> rec = [&](Eigen::Index start,
                                                            Eigen::Index depth) {
    if (depth == k) {
      RatMatrix sub(k, k);
      for (Eigen::Index j = 0; j < k; ++j) sub.col(j) = m.col(pick[j]);
      Rat det = Eigen::FullPivLU<RatMatrix>(sub).determinant();
      g = gcd(g, det.get_num());
      return;
    }
    for (Eigen::Index c = start; c < ambient; ++c) {
      pick[depth] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(0, 0);
  return g == 1 || g == -1;
}

std::string cone_key(const RationalCone& c) {
  std::ostringstream os;
  for (const RatVector& l : c.lineality()) {
    os << "L";
    for (Eigen::Index i = 0; i < l.size(); ++i) os << ":" << l(i).get_str();
  }
  for (const RatVector& r : c.rays()) {
    os << "R";
    for (Eigen::Index i = 0; i < r.size(); ++i) os << ":" << r(i).get_str();
  }
  return os.str();
}

}  // namespace

Fan simplicial_subdivision(const RationalCone& support) {
  const Eigen::Index n = support.ambient_dim();
  Fan fan;
  fan.support = support;

  std::vector<std::vector<RatVector>> simplices;
  triangulate_pointed(n, support.rays(), simplices);

  const std::vector<RatVector>& lin = support.lineality();
  const size_t k = lin.size();
  for (const auto& simplex : simplices) {
    // Cross with the orthant fan of the lineality space.
    for (size_t mask = 0; mask < (size_t{1} << k); ++mask) {
      std::vector<RatVector> gens = simplex;
      for (size_t i = 0; i < k; ++i)
        gens.push_back((mask >> i) & 1 ? RatVector(-lin[i]) : lin[i]);
      if (gens.empty()) continue;  // zero-dimensional support
      fan.cones.push_back(RationalCone::from_generators(n, gens));
      fan.smooth.push_back(lattice_basis_extendable(gens, n));
    }
  }
  if (fan.cones.empty()) {
    fan.cones.push_back(support);  // support == {0}
    fan.smooth.push_back(true);
  }
  verify_fan(fan);
  std::ostringstream os;
  os << "cones=" << fan.cones.size() << " dim=" << support.dim()
     << " verified=exact";
  fan.certification = os.str();
  return fan;
}

void verify_fan(const Fan& fan) {
  const Eigen::Index d = fan.support.dim();
  for (const RationalCone& c : fan.cones) {
    if (!c.is_simplicial() && d > 0)
      throw std::runtime_error("fan cone is not simplicial");
    if (c.dim() != d)
      throw std::runtime_error("fan cone has wrong dimension");
    for (const RatVector& r : c.rays())
      if (fan.support.contains(r) == RationalCone::Position::outside)
        throw std::runtime_error("fan cone leaves the support");
  }
  // Pairwise intersections are common faces.
  for (size_t i = 0; i < fan.cones.size(); ++i)
    for (size_t j = i + 1; j < fan.cones.size(); ++j) {
      std::vector<RatVector> ineqs = fan.cones[i].inequalities();
      ineqs.insert(ineqs.end(), fan.cones[j].inequalities().begin(),
                   fan.cones[j].inequalities().end());
      std::vector<RatVector> eqs = fan.cones[i].equalities();
      eqs.insert(eqs.end(), fan.cones[j].equalities().begin(),
                 fan.cones[j].equalities().end());
      RationalCone inter = RationalCone::from_halfspaces(
          fan.support.ambient_dim(), ineqs, eqs);
      if (!is_face_of(fan.cones[i], inter) ||
          !is_face_of(fan.cones[j], inter))
        throw std::runtime_error("fan cones do not meet in a common face");
    }
  // Union certificate: every facet not on the support boundary is shared by
  // exactly two cones.
  std::map<std::string, int> facet_count;
  std::map<std::string, RationalCone> facet_by_key;
  for (const RationalCone& c : fan.cones)
    for (const RatVector& h : c.inequalities()) {
      RationalCone f = face(c, h);
      if (f.dim() != d - 1) continue;
      std::string key = cone_key(f);
      facet_count[key] += 1;
      facet_by_key.emplace(key, f);
    }
  for (const auto& [key, count] : facet_count) {
    const RationalCone& f = facet_by_key.at(key);
    bool boundary = false;
    for (const RatVector& h : fan.support.inequalities()) {
      bool tight = true;
      for (const RatVector& r : f.rays())
        if (dot(h, r) != 0) {
          tight = false;
          break;
        }
      for (const RatVector& l : f.lineality())
        if (tight && dot(h, l) != 0) tight = false;
      if (tight) {
        boundary = true;
        break;
      }
    }
    const int expected = boundary ? 1 : 2;
    if (count != expected)
      throw std::runtime_error(
          "fan union certificate failed: facet shared by " +
          std::to_string(count) + " cones, expected " +
          std::to_string(expected));
  }
}

CompressionSubcones compression_subcones(Eigen::Index d,
                                         const std::vector<RatRowVector>& S,
                                         const std::vector<int>& I_indices) {
  std::vector<bool> in_I(S.size(), false);
  for (int i : I_indices) {
    if (i < 0 || i >= static_cast<int>(S.size()))
      throw std::invalid_argument("I index out of range");
    in_I[i] = true;
  }
  std::vector<RatVector> ineqs, eqs, all_eqs;
  for (size_t i = 0; i < S.size(); ++i) {
    RatVector v = S[i].transpose();
    all_eqs.push_back(v);
    if (in_I[i])
      eqs.push_back(v);
    else
      ineqs.push_back(RatVector(-v));
  }
  CompressionSubcones out;
  if (eqs.empty())
    out.a_I = RationalSubspace::full(d);
  else {
    RatMatrix m(static_cast<Eigen::Index>(eqs.size()), d);
    for (size_t i = 0; i < eqs.size(); ++i)
      m.row(static_cast<Eigen::Index>(i)) = eqs[i].transpose();
    out.a_I = kernel(m);
  }
  out.a_I_cone = RationalCone::from_halfspaces(d, ineqs, eqs);
  out.edge = RationalCone::from_halfspaces(d, {}, all_eqs);
  return out;
}

ToricLimit toric_limit(const Fan& fan, const RatVector& X,
                       const std::vector<RatRowVector>& psi) {
  bool found = false;
  for (const RationalCone& c : fan.cones)
    if (c.contains(X) != RationalCone::Position::outside) {
      found = true;
      break;
    }
  if (!found) throw ChartMismatch("direction outside every fan cone");
  ToricLimit out;
  out.exists = true;
  out.rate = 0;
  bool have_rate = false;
  for (size_t j = 0; j < psi.size(); ++j) {
    Rat v = (psi[j] * X)(0, 0);
    if (v > 0) out.exists = false;
    if (v < 0) {
      out.limit_pattern.push_back(static_cast<int>(j));
      Rat a = abs(v);
      if (!have_rate || a < out.rate) {
        out.rate = a;
        have_rate = true;
      }
    }
  }
  if (!out.exists) out.limit_pattern.clear();
  return out;
}

}  // namespace sph
