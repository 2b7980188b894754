#include "sph/envalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>

namespace sph {

namespace {

int mono_degree(const Monomial& m) {
  int d = 0;
  for (int e : m) d += e;
  return d;
}

void add_term(std::map<Monomial, Rat>& terms, const Monomial& m,
              const Rat& c) {
  auto it = terms.find(m);
  if (it == terms.end()) {
    if (c != 0) terms.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms.erase(it);
}

}  // namespace

int PBWElement::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, mono_degree(m));
  return d;
}

PBWElement operator+(const PBWElement& a, const PBWElement& b) {
  PBWElement r = a;
  r.truncated = a.truncated || b.truncated;
  for (const auto& [m, c] : b.terms) add_term(r.terms, m, c);
  return r;
}

PBWElement operator-(const PBWElement& a, const PBWElement& b) {
  PBWElement r = a;
  r.truncated = a.truncated || b.truncated;
  for (const auto& [m, c] : b.terms) add_term(r.terms, m, -c);
  return r;
}

PBWElement operator*(const Rat& s, const PBWElement& a) {
  PBWElement r;
  r.truncated = a.truncated;
  if (s == 0) return r;
  for (const auto& [m, c] : a.terms) r.terms.emplace(m, s * c);
  return r;
}

PBWAlgebra::PBWAlgebra(const StructuredLieAlgebra& g,
                       std::vector<RatVector> gens, int degree_cap)
    : g_(&g), gens_(std::move(gens)), cap_(degree_cap) {
  if (cap_ < 1) throw std::invalid_argument("degree cap must be positive");
  const Eigen::Index k = num_gens();
  RatMatrix span(g.dim(), k);
  for (Eigen::Index i = 0; i < k; ++i) span.col(i) = gens_[i];
  Eigen::FullPivLU<RatMatrix> lu(span);
  if (lu.rank() != k)
    throw std::invalid_argument("PBW generators not independent");
  br_.assign(k, std::vector<RatVector>(k));
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      RatVector b = g.bracket(gens_[i], gens_[j]);
      RatVector coords = lu.solve(b);
      if (RatVector(span * coords) != b)
        throw std::invalid_argument(
            "generators do not span a subalgebra");
      br_[i][j] = coords;
    }
}

PBWElement PBWAlgebra::one() const {
  PBWElement e;
  e.terms.emplace(Monomial(static_cast<size_t>(num_gens()), 0), Rat(1));
  return e;
}

PBWElement PBWAlgebra::gen(Eigen::Index i) const {
  Monomial m(static_cast<size_t>(num_gens()), 0);
  m[static_cast<size_t>(i)] = 1;
  return monomial(m);
}

PBWElement PBWAlgebra::monomial(const Monomial& m, const Rat& c) const {
  if (static_cast<Eigen::Index>(m.size()) != num_gens())
    throw std::invalid_argument("monomial length mismatch");
  if (mono_degree(m) > cap_) throw CapExceeded("monomial beyond cap");
  PBWElement e;
  if (c != 0) e.terms.emplace(m, c);
  return e;
}

PBWElement PBWAlgebra::from_vector(const RatVector& x) const {
  RatMatrix span(g_->dim(), num_gens());
  for (Eigen::Index i = 0; i < num_gens(); ++i) span.col(i) = gens_[i];
  Eigen::FullPivLU<RatMatrix> lu(span);
  RatVector coords = lu.solve(x);
  if (RatVector(span * coords) != x)
    throw std::invalid_argument("vector outside the generator span");
  PBWElement e;
  for (Eigen::Index i = 0; i < num_gens(); ++i)
    if (coords(i) != 0) {
      Monomial m(static_cast<size_t>(num_gens()), 0);
      m[static_cast<size_t>(i)] = 1;
      e.terms.emplace(m, coords(i));
    }
  return e;
}

void PBWAlgebra::mono_times_gen(const Monomial& m, Eigen::Index j,
                                const Rat& c, std::map<Monomial, Rat>& out,
                                Ctx& ctx) const {
  // Largest generator index present in m that must commute past b_j.
  Eigen::Index k = -1;
  for (Eigen::Index i = num_gens() - 1; i > j; --i)
    if (m[static_cast<size_t>(i)] > 0) {
      k = i;
      break;
    }
  if (k < 0) {
    if (mono_degree(m) + 1 > cap_) {
      ctx.truncated = true;
      return;
    }
    Monomial m2 = m;
    ++m2[static_cast<size_t>(j)];
    add_term(out, m2, c);
    return;
  }
  Monomial rest = m;
  --rest[static_cast<size_t>(k)];
  // m·b_j = (rest·b_j)·b_k + rest·[b_k, b_j].
  std::map<Monomial, Rat> tmp;
  mono_times_gen(rest, j, c, tmp, ctx);
  terms_times_gen(tmp, k, out, ctx);
  const RatVector& br = br_[static_cast<size_t>(k)][static_cast<size_t>(j)];
  for (Eigen::Index i = 0; i < num_gens(); ++i)
    if (br(i) != 0) mono_times_gen(rest, i, c * br(i), out, ctx);
}

void PBWAlgebra::terms_times_gen(const std::map<Monomial, Rat>& in,
                                 Eigen::Index j, std::map<Monomial, Rat>& out,
                                 Ctx& ctx) const {
  for (const auto& [m, c] : in)
    if (c != 0) mono_times_gen(m, j, c, out, ctx);
}

PBWElement PBWAlgebra::mul(const PBWElement& a, const PBWElement& b) const {
  PBWElement r;
  r.truncated = a.truncated || b.truncated;
  Ctx ctx;
  for (const auto& [mb, cb] : b.terms) {
    std::map<Monomial, Rat> cur;
    for (const auto& [ma, ca] : a.terms) cur.emplace(ma, ca * cb);
    for (Eigen::Index i = 0; i < num_gens(); ++i)
      for (int rep = 0; rep < mb[static_cast<size_t>(i)]; ++rep) {
        std::map<Monomial, Rat> next;
        terms_times_gen(cur, i, next, ctx);
        cur = std::move(next);
      }
    for (const auto& [m, c] : cur) add_term(r.terms, m, c);
  }
  r.truncated = r.truncated || ctx.truncated;
  return r;
}

std::vector<Monomial> PBWAlgebra::monomials_up_to(int d) const {
  std::vector<Monomial> out;
  Monomial cur(static_cast<size_t>(num_gens()), 0);
  // Depth-first enumeration, then graded-lex sort for determinism.
  std::function<void(size_t, int)> rec = [&](size_t pos, int left) {
    if (pos == cur.size()) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[pos] = e;
      rec(pos + 1, left - e);
    }
    cur[pos] = 0;
  };
  rec(0, d);
  std::sort(out.begin(), out.end(), [](const Monomial& x, const Monomial& y) {
    int dx = mono_degree(x), dy = mono_degree(y);
    if (dx != dy) return dx < dy;
    return x < y;
  });
  return out;
}

PBWAlgebra::RightIdeal PBWAlgebra::right_ideal(
    const std::vector<RatVector>& xs) const {
  RightIdeal ideal;
  ideal.index = monomials_up_to(cap_);
  for (size_t i = 0; i < ideal.index.size(); ++i)
    ideal.column.emplace(ideal.index[i], static_cast<Eigen::Index>(i));
  std::vector<PBWElement> rows_elems;
  std::vector<Monomial> left = monomials_up_to(cap_ - 1);
  for (const RatVector& x : xs) {
    PBWElement gx = from_vector(x);
    for (const Monomial& m : left) {
      PBWElement e = mul(monomial(m), gx);
      if (e.truncated)
        throw CapExceeded("ideal generator product exceeds the cap");
      if (!e.is_zero()) rows_elems.push_back(std::move(e));
    }
  }
  RatMatrix rows(static_cast<Eigen::Index>(rows_elems.size()),
                 static_cast<Eigen::Index>(ideal.index.size()));
  rows.setZero();
  for (size_t r = 0; r < rows_elems.size(); ++r)
    for (const auto& [m, c] : rows_elems[r].terms)
      rows(static_cast<Eigen::Index>(r), ideal.column.at(m)) = c;
  ideal.pivots = rref_in_place(rows);
  ideal.rref = rows.topRows(static_cast<Eigen::Index>(ideal.pivots.size()));
  return ideal;
}

PBWElement PBWAlgebra::reduce(const PBWElement& u,
                              const RightIdeal& ideal) const {
  RatRowVector v =
      RatRowVector::Zero(static_cast<Eigen::Index>(ideal.index.size()));
  for (const auto& [m, c] : u.terms) v(ideal.column.at(m)) = c;
  for (Eigen::Index i = 0;
       i < static_cast<Eigen::Index>(ideal.pivots.size()); ++i)
    v -= v(ideal.pivots[static_cast<size_t>(i)]) * ideal.rref.row(i);
  PBWElement r;
  r.truncated = u.truncated;
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (v(j) != 0) r.terms.emplace(ideal.index[static_cast<size_t>(j)], v(j));
  return r;
}

bool PBWAlgebra::in_ideal(const PBWElement& u, const RightIdeal& ideal) const {
  return reduce(u, ideal).is_zero();
}

void PBWAlgebra::set_weights(std::vector<std::optional<RatRowVector>> weights) {
  if (static_cast<Eigen::Index>(weights.size()) != num_gens())
    throw std::invalid_argument("one weight per generator required");
  weights_ = std::move(weights);
}

RatRowVector PBWAlgebra::monomial_weight(const Monomial& m) const {
  if (weights_.empty())
    throw std::logic_error("generator weights not configured");
  Eigen::Index dz = -1;
  for (const auto& w : weights_)
    if (w) dz = w->size();
  if (dz < 0) dz = 0;
  RatRowVector w = RatRowVector::Zero(dz);
  for (size_t i = 0; i < m.size(); ++i)
    if (m[i] != 0) {
      if (!weights_[i])
        throw std::logic_error("monomial touches a weightless generator");
      w += Rat(m[i]) * *weights_[i];
    }
  return w;
}

PBWElement filter_out(const PBWElement& e, const std::vector<int>& gens) {
  PBWElement r;
  r.truncated = e.truncated;
  for (const auto& [m, c] : e.terms) {
    bool keep = true;
    for (int i : gens)
      if (m[static_cast<size_t>(i)] > 0) keep = false;
    if (keep) r.terms.emplace(m, c);
  }
  return r;
}

PBWElement convert(const PBWAlgebra& from, const PBWElement& e,
                   const PBWAlgebra& to) {
  PBWElement r;
  r.truncated = e.truncated;
  for (const auto& [m, c] : e.terms) {
    PBWElement term = c * to.one();
    for (size_t i = 0; i < m.size(); ++i)
      for (int rep = 0; rep < m[i]; ++rep)
        term = to.mul(
            term, to.from_vector(from.generator_vector(
                      static_cast<Eigen::Index>(i))));
    r = r + term;
  }
  return r;
}

RatRowVector aZ_weight(const SphericalDatum& d, const RatVector& v) {
  if (v.isZero(Rat(0)))
    throw std::invalid_argument("zero vector has no well-defined weight");
  Eigen::Index lead = 0;
  while (v(lead) == 0) ++lead;
  RatRowVector w(d.aZ.dim());
  for (Eigen::Index i = 0; i < d.aZ.dim(); ++i) {
    RatVector b = d.g.bracket(d.aZ.basis_vector(i), v);
    Rat lambda = b(lead) / v(lead);
    if (RatVector(b - lambda * v) != RatVector(RatVector::Zero(v.size())))
      throw std::invalid_argument("not an a_Z weight vector");
    w(i) = lambda;
  }
  return w;
}

PBWElement casimir(const PBWAlgebra& A) {
  const StructuredLieAlgebra& g = A.lie();
  const Eigen::Index k = A.num_gens();
  if (k != g.dim())
    throw std::invalid_argument("casimir needs the full enveloping algebra");
  RatMatrix gram(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      gram(i, j) = g.form_value(A.generator_vector(i), A.generator_vector(j));
  Eigen::FullPivLU<RatMatrix> lu(gram);
  if (lu.rank() != k) throw DegenerateForm("invariant form is degenerate");
  RatMatrix ginv = lu.inverse();
  PBWElement c;
  for (Eigen::Index i = 0; i < k; ++i) {
    RatVector dual = RatVector::Zero(g.dim());
    for (Eigen::Index j = 0; j < k; ++j)
      dual += ginv(j, i) * A.generator_vector(j);
    c = c + A.mul(A.gen(i), A.from_vector(dual));
  }
  if (c.truncated) throw CapExceeded("casimir exceeds the degree cap");
  // Centrality up to the cap.
  for (Eigen::Index i = 0; i < k; ++i) {
    PBWElement comm = A.mul(c, A.gen(i)) - A.mul(A.gen(i), c);
    if (comm.truncated) throw CapExceeded("centrality check exceeds the cap");
    if (!comm.is_zero())
      throw std::runtime_error("casimir is not central");
  }
  return c;
}

PBWElement hc_gamma0(const PBWAlgebra& A, const PBWElement& z,
                     const std::vector<int>& drop,
                     const std::vector<int>& forbid) {
  PBWElement r;
  r.truncated = z.truncated;
  for (const auto& [m, c] : z.terms) {
    bool has_drop = false;
    for (int i : drop)
      if (m[static_cast<size_t>(i)] > 0) has_drop = true;
    if (has_drop) continue;
    for (int i : forbid)
      if (m[static_cast<size_t>(i)] > 0)
        throw std::runtime_error(
            "element not in U(a)Z(m) + U(g)n: opposite-nilradical residue");
    r.terms.emplace(m, c);
  }
  return r;
}

bool membership_U_I(const PBWAlgebra& A, const PBWElement& u,
                    const RationalSubspace& hI) {
  std::vector<RatVector> xs;
  for (Eigen::Index i = 0; i < hI.dim(); ++i)
    xs.push_back(hI.basis_vector(i));
  PBWAlgebra::RightIdeal ideal = A.right_ideal(xs);
  for (const RatVector& x : xs) {
    PBWElement p = A.mul(A.from_vector(x), u);
    if (p.truncated) throw CapExceeded("X.u exceeds the degree cap");
    if (!A.in_ideal(p, ideal)) return false;
  }
  return true;
}

PBWElement mu_I(const PBWAlgebra& A, const PBWElement& uS,
                const SphericalDatum& d, const DegenerationDatum& dd) {
  if (uS.is_zero()) return uS;
  RatVector X = interior_direction(d, dd.I);
  bool have_max = false;
  Rat maxval = 0;
  std::vector<std::pair<RatRowVector, Rat>> weight_values;
  for (const auto& [m, c] : uS.terms) {
    RatRowVector w = A.monomial_weight(m);
    Rat val = (w * X)(0, 0);
    // (i)(a): weights are non-positive on the compression cone.
    for (const RatVector& ray : d.compression_cone.rays())
      if ((w * ray)(0, 0) > 0)
        throw std::runtime_error("weight positive on the compression cone");
    for (const RatVector& lin : d.compression_cone.lineality())
      if ((w * lin)(0, 0) != 0)
        throw std::runtime_error("weight nonzero on the edge");
    if (!have_max || val > maxval) {
      maxval = val;
      have_max = true;
    }
    weight_values.push_back({w, val});
  }
  if (maxval != 0)
    throw MaxWeightNotZero("maximal a_I-weight of u_S is not zero");
  PBWElement r;
  r.truncated = uS.truncated;
  size_t idx = 0;
  for (const auto& [m, c] : uS.terms) {
    const Rat& val = weight_values[idx++].second;
    if (val == 0)
      r.terms.emplace(m, c);
    else if (val > 0)
      throw MaxWeightNotZero("discarded component not strictly negative");
  }
  if (!membership_U_I(A, r, dd.hI))
    throw std::runtime_error("mu_I image fails U(g)h_I membership");
  return r;
}

CentralityReport aS_centrality_check(const PBWAlgebra& A_b,
                                     const std::vector<RatVector>& aS_basis,
                                     const std::vector<RatVector>& bH_basis) {
  CentralityReport rep;
  if (aS_basis.empty()) return rep;  // vacuous
  PBWAlgebra::RightIdeal ideal = A_b.right_ideal(bH_basis);
  std::vector<Monomial> monos = A_b.monomials_up_to(A_b.cap() - 1);
  for (const RatVector& x : aS_basis) {
    PBWElement gx = A_b.from_vector(x);
    for (const Monomial& m : monos) {
      PBWElement u = A_b.monomial(m);
      PBWElement comm = A_b.mul(gx, u) - A_b.mul(u, gx);
      if (comm.truncated) throw CapExceeded("commutator exceeds the cap");
      ++rep.checked;
      if (!A_b.in_ideal(comm, ideal)) {
        rep.ok = false;
        rep.detail += "noncentral monomial found; ";
      }
    }
  }
  return rep;
}

std::string pbw_to_json(const PBWElement& e) {
  nlohmann::json doc;
  doc["truncated"] = e.truncated;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : e.terms)
    terms.push_back({m, to_string(c)});
  doc["terms"] = terms;
  return doc.dump(2);
}

}  // namespace sph
