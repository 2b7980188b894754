#include "sph/sphstruct.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>

namespace sph {

namespace {

RatMatrix stack(const std::vector<const RationalSubspace*>& parts,
                Eigen::Index ambient) {
  Eigen::Index rows = 0;
  for (const auto* p : parts) rows += p->dim();
  RatMatrix m(rows, ambient);
  Eigen::Index r = 0;
  for (const auto* p : parts) {
    m.middleRows(r, p->dim()) = p->basis();
    r += p->dim();
  }
  return m;
}

// True iff the parts intersect pairwise trivially and sum to `total`.
bool is_direct_sum(const std::vector<const RationalSubspace*>& parts,
                   const RationalSubspace& total) {
  Eigen::Index dims = 0;
  for (const auto* p : parts) dims += p->dim();
  if (dims != total.dim()) return false;
  RatMatrix m = stack(parts, total.ambient_dim());
  return static_cast<Eigen::Index>(RationalSubspace::from_rows(m).dim()) ==
         dims;
}

}  // namespace

ParabolicDatum make_parabolic(const StructuredLieAlgebra& g,
                              const RationalSubspace& m,
                              const RationalSubspace& a,
                              const RationalSubspace& n) {
  ParabolicDatum P;
  P.m = m;
  P.a = a;
  P.n = n;
  P.p = sum(sum(m, a), n);
  if (!is_direct_sum({&m, &a, &n}, P.p))
    throw std::invalid_argument("p = m ⊕ a ⊕ n is not direct");
  if (!g.is_subalgebra(P.p))
    throw std::invalid_argument("p is not a subalgebra");
  if (!g.normalizes(P.p, n))
    throw std::invalid_argument("[p, n] not contained in n");
  P.roots = root_decomposition(g, a);
  Eigen::Index covered = 0;
  for (size_t i = 0; i < P.roots.size(); ++i) {
    const RootSpace& rs = P.roots[i];
    if (rs.root.is_zero()) {
      if (intersection(rs.space, n).dim() != 0)
        throw std::invalid_argument("n meets the zero weight space");
      continue;
    }
    if (n.contains(rs.space)) {
      P.positive.push_back(static_cast<int>(i));
      covered += rs.space.dim();
    } else if (intersection(rs.space, n).dim() != 0) {
      throw std::invalid_argument("n is not a sum of root spaces");
    }
  }
  if (covered != n.dim())
    throw std::invalid_argument("n is not spanned by root spaces");
  return P;
}

bool check_open_orbit(const StructuredLieAlgebra& g, const RationalSubspace& h,
                      const ParabolicDatum& P) {
  return sum(P.p, h).dim() == g.dim();
}

namespace {

// Derived-series-stable subalgebra (the semisimple part for reductive l).
RationalSubspace stable_derived(const StructuredLieAlgebra& g,
                                const RationalSubspace& l) {
  RationalSubspace cur = l;
  for (;;) {
    RationalSubspace next = g.bracket_space(cur, cur);
    if (next == cur) return cur;
    if (next.dim() == 0) return next;
    cur = next;
  }
}

// Minimal ideals of a semisimple subalgebra s (split via bracket closure and
// form-orthogonal complements).
std::vector<RationalSubspace> simple_ideals(const StructuredLieAlgebra& g,
                                            const RationalSubspace& s) {
  std::vector<RationalSubspace> out;
  RationalSubspace rest = s;
  while (rest.dim() > 0) {
    RationalSubspace ideal =
        RationalSubspace::from_vectors({rest.basis_vector(0)},
                                       rest.ambient_dim());
    for (;;) {
      RationalSubspace next = sum(ideal, g.bracket_space(rest, ideal));
      if (next == ideal) break;
      ideal = next;
    }
    out.push_back(ideal);
    rest = orth_complement(ideal, rest, g.form());
  }
  return out;
}

bool negative_definite_on(const StructuredLieAlgebra& g,
                          const RationalSubspace& v) {
  RatMatrix k = -(v.basis() * g.form() * v.basis().transpose());
  // Sylvester criterion on -kappa.
  for (Eigen::Index i = 1; i <= k.rows(); ++i) {
    Rat det = Eigen::FullPivLU<RatMatrix>(k.topLeftCorner(i, i)).determinant();
    if (det <= 0) return false;
  }
  return true;
}

struct ConditionReport {
  bool ok = true;
  std::string detail;
  void fail(const std::string& what) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

ConditionReport verify_conditions(const StructuredLieAlgebra& g,
                                  const RationalSubspace& h,
                                  const ParabolicDatum& P,
                                  SphericalDatum& d) {
  ConditionReport rep;
  d.l = kernel(g.ad(d.generic_X));
  std::vector<RatVector> u_gens;
  d.u_roots.clear();
  for (size_t i = 0; i < P.roots.size(); ++i) {
    const RootSpace& rs = P.roots[i];
    if (rs.root.is_zero()) continue;
    if (rs.root.eval(d.generic_X) > 0) {
      d.u_roots.push_back(static_cast<int>(i));
      for (Eigen::Index j = 0; j < rs.space.dim(); ++j)
        u_gens.push_back(rs.space.basis_vector(j));
    }
  }
  d.u = RationalSubspace::from_vectors(u_gens, g.dim());

  if (!P.n.contains(d.u)) rep.fail("u not contained in n");
  if (!d.l.contains(P.m) || !d.l.contains(P.a))
    rep.fail("l does not contain m ⊕ a");
  RationalSubspace q = sum(d.l, d.u);
  if (!g.is_subalgebra(q)) rep.fail("q not a subalgebra");
  if (sum(q, h).dim() != g.dim()) rep.fail("q + h != g");
  d.lh = intersection(d.l, h);
  if (intersection(q, h) != d.lh) rep.fail("q ∩ h != l ∩ h");

  RationalSubspace s = stable_derived(g, d.l);
  if (s.dim() > 0) {
    for (const RationalSubspace& ideal : simple_ideals(g, s))
      if (!negative_definite_on(g, ideal) && !d.lh.contains(ideal)) {
        rep.fail("noncompact ideal of l not inside l ∩ h");
        break;
      }
  }
  return rep;
}

}  // namespace

SphericalDatum construct_adapted_parabolic(const StructuredLieAlgebra& g,
                                           const RationalSubspace& h,
                                           const ParabolicDatum& P,
                                           int skip_generic) {
  if (!g.is_subalgebra(h))
    throw std::invalid_argument("h is not a subalgebra");
  if (!check_open_orbit(g, h, P))
    throw std::invalid_argument("p + h != g: orbit not open");

  SphericalDatum d{g, h, P};

  RationalSubspace cand =
      intersection(P.a, g.form_orthogonal(sum(h, P.n)));
  const Eigen::Index cd = cand.dim();

  // A candidate is generic when the only roots vanishing on it are those
  // vanishing on the whole candidate space.
  std::vector<bool> vanishes_on_cand(P.roots.size(), true);
  for (size_t i = 0; i < P.roots.size(); ++i)
    for (Eigen::Index j = 0; j < cd && vanishes_on_cand[i]; ++j)
      if (P.roots[i].root.eval(cand.basis_vector(j)) != 0)
        vanishes_on_cand[i] = false;

  bool saw_generic = false;
  std::string last_failure;
  const long cap = 32;
  std::vector<long> coeff(static_cast<size_t>(cd), 0);
  for (long shell = 0; shell <= cap; ++shell) {
    if (cd == 0 && shell > 0) break;
    // Lexicographic walk over the box [-shell, shell]^cd.
    std::fill(coeff.begin(), coeff.end(), -shell);
    for (;;) {
      long sup = 0;
      for (long c : coeff) sup = std::max(sup, std::abs(c));
      if (sup == shell || cd == 0) {
        RatVector X = RatVector::Zero(g.dim());
        for (Eigen::Index j = 0; j < cd; ++j)
          X += rat(coeff[static_cast<size_t>(j)]) * cand.basis_vector(j);
        bool generic = true, dominant = true;
        for (size_t i = 0; i < P.roots.size(); ++i) {
          if (P.roots[i].root.is_zero()) continue;
          Rat v = P.roots[i].root.eval(X);
          if (v == 0 && !vanishes_on_cand[i]) generic = false;
        }
        for (int i : P.positive)
          if (P.roots[static_cast<size_t>(i)].root.eval(X) < 0)
            dominant = false;
        if (generic && dominant) {
          saw_generic = true;
          d.generic_X = X;
          ConditionReport rep = verify_conditions(g, h, P, d);
          if (rep.ok) {
            if (skip_generic == 0) {
              d.lh_perp = orth_complement(d.lh, d.l, g.form());
              d.aH = intersection(P.a, h);
              d.aZ = orth_complement(d.aH, P.a, g.form());
              if (!is_direct_sum({&d.aH, &d.aZ}, P.a))
                throw AdaptedParabolicUnverified(
                    "form degenerate on a_H: no orthogonal splitting of a");
              return d;
            }
            --skip_generic;
          } else {
            last_failure = rep.detail;
          }
        }
      }
      // advance lexicographically
      Eigen::Index pos = cd - 1;
      while (pos >= 0) {
        if (coeff[static_cast<size_t>(pos)] < shell) {
          ++coeff[static_cast<size_t>(pos)];
          for (Eigen::Index k = pos + 1; k < cd; ++k)
            coeff[static_cast<size_t>(k)] = -shell;
          break;
        }
        --pos;
      }
      if (pos < 0) break;
      if (cd == 0) break;
    }
    if (cd == 0) break;
  }
  if (saw_generic)
    throw AdaptedParabolicUnverified("generic candidates found but none verify: " +
                                     last_failure);
  throw NoGenericElement("no generic element within sup-norm 32");
}

namespace {

// Projects v onto its weight components w.r.t. the root decomposition.
std::vector<std::pair<size_t, RatVector>> weight_components(
    const std::vector<RootSpace>& roots, const RatVector& v) {
  const Eigen::Index n = v.size();
  RatMatrix basis(n, n);
  std::vector<size_t> owner(static_cast<size_t>(n));
  Eigen::Index col = 0;
  for (size_t i = 0; i < roots.size(); ++i)
    for (Eigen::Index j = 0; j < roots[i].space.dim(); ++j) {
      basis.col(col) = roots[i].space.basis_vector(j);
      owner[static_cast<size_t>(col)] = i;
      ++col;
    }
  RatVector coords = Eigen::FullPivLU<RatMatrix>(basis).solve(v);
  std::vector<std::pair<size_t, RatVector>> out;
  for (size_t i = 0; i < roots.size(); ++i) {
    RatVector comp = RatVector::Zero(n);
    bool nonzero = false;
    for (Eigen::Index c = 0; c < n; ++c)
      if (owner[static_cast<size_t>(c)] == i && coords(c) != 0) {
        comp += coords(c) * basis.col(c);
        nonzero = true;
      }
    if (nonzero) out.push_back({i, comp});
  }
  return out;
}

}  // namespace

void t_map(SphericalDatum& d) {
  const StructuredLieAlgebra& g = d.g;
  if (!is_direct_sum({&d.h, &d.lh_perp, &d.u}, RationalSubspace::full(g.dim())))
    throw DecompositionFailure("g != h ⊕ (l∩h)^⊥ ⊕ u");
  RatMatrix basis(g.dim(), g.dim());
  basis.topRows(d.h.dim()) = d.h.basis();
  basis.middleRows(d.h.dim(), d.lh_perp.dim()) = d.lh_perp.basis();
  basis.bottomRows(d.u.dim()) = d.u.basis();
  Eigen::FullPivLU<RatMatrix> lu(RatMatrix(basis.transpose()));

  d.T_table.clear();
  for (int ui : d.u_roots) {
    const RootSpace& pos = d.P.roots[static_cast<size_t>(ui)];
    LinearFunctional alpha = pos.root;
    // Find g^{-alpha}.
    const RootSpace* neg = nullptr;
    for (const RootSpace& rs : d.P.roots)
      if (rs.root == -alpha) {
        neg = &rs;
        break;
      }
    if (!neg) throw DecompositionFailure("missing opposite root space");
    for (Eigen::Index j = 0; j < neg->space.dim(); ++j) {
      TEntry e;
      e.alpha = alpha;
      e.x_minus_alpha = neg->space.basis_vector(j);
      RatVector coords = lu.solve(e.x_minus_alpha);
      RatVector proj = RatVector::Zero(g.dim());
      for (Eigen::Index k = d.h.dim(); k < g.dim(); ++k)
        proj += coords(k) * basis.row(k).transpose();
      e.t_value = -proj;
      if (!d.h.contains(RatVector(e.x_minus_alpha + e.t_value)))
        throw DecompositionFailure("X_{-a} + T(X_{-a}) not in h");
      for (auto& [ri, comp] : weight_components(d.P.roots, e.t_value)) {
        const LinearFunctional& beta = d.P.roots[ri].root;
        bool in_sigma_u =
            std::find(d.u_roots.begin(), d.u_roots.end(), static_cast<int>(ri)) !=
            d.u_roots.end();
        if (!in_sigma_u && beta.eval(d.generic_X) != 0)
          throw DecompositionFailure(
              "T component neither in u nor in the centralizer of X");
        e.components.push_back({beta, comp});
      }
      d.T_table.push_back(std::move(e));
    }
  }
}

LinearFunctional restrict_to_aZ(const SphericalDatum& d,
                                const LinearFunctional& on_a,
                                bool require_vanishing) {
  if (require_vanishing)
    for (Eigen::Index i = 0; i < d.aH.dim(); ++i)
      if (on_a.eval(d.aH.basis_vector(i)) != 0)
        throw MonoidElementNotOnAH("functional nonzero on a_H");
  RatRowVector coords(d.aZ.dim());
  for (Eigen::Index i = 0; i < d.aZ.dim(); ++i)
    coords(i) = on_a.eval(d.aZ.basis_vector(i));
  return LinearFunctional(d.aZ, coords);
}

void spherical_roots(SphericalDatum& d) {
  d.monoid_gens.clear();
  for (const TEntry& e : d.T_table)
    for (const auto& [beta, comp] : e.components) {
      LinearFunctional gen = restrict_to_aZ(d, e.alpha + beta, true);
      if (gen.is_zero())
        throw MonoidElementNotOnAH("monoid generator restricts to zero");
      if (std::find(d.monoid_gens.begin(), d.monoid_gens.end(), gen) ==
          d.monoid_gens.end())
        d.monoid_gens.push_back(gen);
    }

  const Eigen::Index dz = d.aZ.dim();
  d.S.clear();
  if (!d.monoid_gens.empty()) {
    std::vector<RatVector> gen_vecs;
    for (const auto& gph : d.monoid_gens)
      gen_vecs.push_back(gph.coords.transpose());
    RationalCone mcone = RationalCone::from_generators(dz, gen_vecs);
    if (!mcone.lineality().empty())
      throw DecompositionFailure("monoid cone is not pointed");
    for (const RatVector& ray : mcone.rays()) {
      // Minimal monoid element on the ray: the generators on the ray are
      // c_i * ray; the smallest c_i wins and is automatically irreducible.
      bool have = false;
      Rat cmin = 0;
      for (const RatVector& gv : gen_vecs) {
        Rat c = 0;
        bool on_ray = true;
        for (Eigen::Index k = 0; k < dz; ++k) {
          if (ray(k) != 0) {
            c = gv(k) / ray(k);
            break;
          }
        }
        for (Eigen::Index k = 0; k < dz; ++k)
          if (gv(k) != c * ray(k)) on_ray = false;
        if (on_ray && c > 0 && (!have || c < cmin)) {
          have = true;
          cmin = c;
        }
      }
      if (!have)
        throw MonoidElementNotOnAH("extreme ray carries no generator");
      d.S.push_back(LinearFunctional(d.aZ, RatRowVector(cmin * ray.transpose())));
    }
    std::sort(d.S.begin(), d.S.end(),
              [](const LinearFunctional& x, const LinearFunctional& y) {
                for (Eigen::Index i = 0; i < x.coords.size(); ++i)
                  if (x.coords(i) != y.coords(i)) return x.coords(i) < y.coords(i);
                return false;
              });
  }
  std::vector<RatVector> hs;
  for (const auto& s : d.S) hs.push_back(RatVector(-s.coords.transpose()));
  d.compression_cone = RationalCone::from_halfspaces(dz, hs);
}

void rho_q_and_unimodularity(SphericalDatum& d) {
  const StructuredLieAlgebra& g = d.g;
  RatRowVector acc = RatRowVector::Zero(d.P.a.dim());
  for (int ui : d.u_roots) {
    const RootSpace& rs = d.P.roots[static_cast<size_t>(ui)];
    acc += Rat(rs.space.dim()) * rs.root.coords;
  }
  d.rhoQ_on_a = LinearFunctional(d.P.a, RatRowVector(acc / Rat(2)));
  d.rhoQ_vanishes_on_aH = true;
  for (Eigen::Index i = 0; i < d.aH.dim(); ++i)
    if (d.rhoQ_on_a.eval(d.aH.basis_vector(i)) != 0)
      d.rhoQ_vanishes_on_aH = false;
  d.rhoQ = restrict_to_aZ(d, d.rhoQ_on_a, false);

  // Trace of the h-action on g/h.
  bool trace_free = true;
  for (Eigen::Index i = 0; i < d.h.dim(); ++i) {
    RatVector x = d.h.basis_vector(i);
    Rat tr_g = g.ad(x).trace();
    // Trace of ad(x) restricted to h.
    Rat tr_h = 0;
    for (Eigen::Index j = 0; j < d.h.dim(); ++j)
      tr_h += d.h.coordinates(g.bracket(x, d.h.basis_vector(j)))(j);
    if (tr_g - tr_h != 0) trace_free = false;
  }
  d.unimodular = d.rhoQ_vanishes_on_aH && trace_free;

  // Existence of X ∈ a_H^⊥ with alpha(X) > 0 for all alpha ∈ Σ_u.
  const Eigen::Index dz = d.aZ.dim();
  std::vector<LinearFunctional> sigma_u;
  for (int ui : d.u_roots)
    sigma_u.push_back(restrict_to_aZ(d, d.P.roots[static_cast<size_t>(ui)].root,
                                     false));
  if (sigma_u.empty()) {
    d.exists_positive_X = true;
  } else {
    std::vector<RatVector> hs;
    for (const auto& f : sigma_u) hs.push_back(f.coords.transpose());
    RationalCone dcone = RationalCone::from_halfspaces(dz, hs);
    RatVector x0 = RatVector::Zero(dz);
    for (const RatVector& r : dcone.rays()) x0 += r;
    d.exists_positive_X = true;
    for (const auto& f : sigma_u)
      if ((f.coords * x0)(0, 0) <= 0) d.exists_positive_X = false;
  }
}

SphericalDatum analyze_structure(const StructuredLieAlgebra& g,
                                 const RationalSubspace& h,
                                 const ParabolicDatum& P, int skip_generic) {
  SphericalDatum d = construct_adapted_parabolic(g, h, P, skip_generic);
  t_map(d);
  spherical_roots(d);
  rho_q_and_unimodularity(d);
  return d;
}

namespace {

nlohmann::json subspace_json(const RationalSubspace& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < s.ambient_dim(); ++j)
      row.push_back(to_string(s.basis()(i, j)));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json functional_json(const LinearFunctional& f) {
  nlohmann::json c = nlohmann::json::array();
  for (Eigen::Index i = 0; i < f.coords.size(); ++i)
    c.push_back(to_string(f.coords(i)));
  return c;
}

nlohmann::json vector_json(const RatVector& v) {
  nlohmann::json c = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) c.push_back(to_string(v(i)));
  return c;
}

}  // namespace

std::string spherical_datum_to_json(const SphericalDatum& d) {
  nlohmann::json doc;
  doc["h"] = subspace_json(d.h);
  doc["l"] = subspace_json(d.l);
  doc["u"] = subspace_json(d.u);
  doc["lh"] = subspace_json(d.lh);
  doc["aH"] = subspace_json(d.aH);
  doc["aZ"] = subspace_json(d.aZ);
  doc["generic_X"] = vector_json(d.generic_X);
  nlohmann::json table = nlohmann::json::array();
  for (const TEntry& e : d.T_table) {
    nlohmann::json entry;
    entry["alpha"] = functional_json(e.alpha);
    entry["x_minus_alpha"] = vector_json(e.x_minus_alpha);
    entry["t_value"] = vector_json(e.t_value);
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& [beta, comp] : e.components)
      comps.push_back({{"beta", functional_json(beta)},
                       {"component", vector_json(comp)}});
    entry["components"] = comps;
    table.push_back(entry);
  }
  doc["T_table"] = table;
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& f : d.monoid_gens) gens.push_back(functional_json(f));
  doc["monoid_gens"] = gens;
  nlohmann::json roots = nlohmann::json::array();
  for (const auto& f : d.S) roots.push_back(functional_json(f));
  doc["spherical_roots"] = roots;
  nlohmann::json cone = nlohmann::json::array();
  for (const RatVector& r : d.compression_cone.rays())
    cone.push_back(vector_json(r));
  doc["compression_cone_rays"] = cone;
  doc["rhoQ"] = functional_json(d.rhoQ);
  doc["unimodular"] = d.unimodular;
  doc["exists_positive_X"] = d.exists_positive_X;
  return doc.dump(2);
}

}  // namespace sph
