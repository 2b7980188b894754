#include "sph/degen.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace sph {

namespace {

// Strictly positive rational functional on the pointed cone spanned by
// `gens` (sum of the extreme rays of the dual cone).
RatRowVector positive_functional(const std::vector<LinearFunctional>& gens) {
  const Eigen::Index n = gens.empty() ? 0 : gens[0].coords.size();
  std::vector<RatVector> vecs;
  for (const auto& gph : gens) vecs.push_back(gph.coords.transpose());
  RationalCone cone = RationalCone::from_generators(n, vecs);
  if (!cone.lineality().empty())
    throw DegenerationInvariantViolation("monoid cone is not pointed");
  RationalCone dual = dual_cone(cone);
  RatRowVector w = RatRowVector::Zero(n);
  for (const RatVector& r : dual.rays()) w += r.transpose();
  return w;
}

Int floor_rat(const Rat& q) {
  Int num = q.get_num(), den = q.get_den(), f;
  mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return f;
}

bool in_span_rec(const RatRowVector& gamma,
                 const std::vector<RatRowVector>& gens, size_t k,
                 const RatRowVector& w) {
  if (gamma.isZero(Rat(0))) return true;
  if (k == gens.size()) return false;
  Rat num = (w * gamma.transpose())(0, 0);
  Rat den = (w * gens[k].transpose())(0, 0);
  long cap = den > 0 ? floor_rat(num / den).get_si() : 0;
  for (long c = 0; c <= cap; ++c)
    if (in_span_rec(RatRowVector(gamma - rat(c) * gens[k]), gens, k + 1, w))
      return true;
  return false;
}

}  // namespace

bool in_monoid_span(const LinearFunctional& gamma,
                    const std::vector<LinearFunctional>& gens) {
  if (gamma.is_zero()) return true;
  if (gens.empty()) return false;
  RatRowVector w = positive_functional(gens);
  std::vector<RatRowVector> rows;
  for (const auto& gph : gens) rows.push_back(gph.coords);
  return in_span_rec(gamma.coords, rows, 0, w);
}

RatVector aZ_to_ambient(const SphericalDatum& d, const RatVector& coords) {
  return d.aZ.basis().transpose() * coords;
}

RationalSubspace initial_subspace(const StructuredLieAlgebra& g,
                                  const RatVector& X,
                                  const RationalSubspace& V) {
  if (X.isZero(Rat(0))) return V;
  std::vector<RootSpace> spaces =
      root_decomposition(g, RationalSubspace::from_vectors({X}, g.dim()));
  // Order the eigenbasis by descending eigenvalue of ad(X).
  std::sort(spaces.begin(), spaces.end(),
            [&](const RootSpace& a, const RootSpace& b) {
              return a.root.eval(X) > b.root.eval(X);
            });
  const Eigen::Index n = g.dim();
  RatMatrix M(n, n);
  std::vector<Rat> col_grade(static_cast<size_t>(n));
  Eigen::Index col = 0;
  for (const RootSpace& rs : spaces) {
    Rat grade = rs.root.eval(X);
    for (Eigen::Index j = 0; j < rs.space.dim(); ++j) {
      M.col(col) = rs.space.basis_vector(j);
      col_grade[static_cast<size_t>(col)] = grade;
      ++col;
    }
  }
  Eigen::FullPivLU<RatMatrix> lu(M);
  RatMatrix R(V.dim(), n);
  for (Eigen::Index i = 0; i < V.dim(); ++i)
    R.row(i) = lu.solve(V.basis_vector(i)).transpose();
  rref_in_place(R);
  RatMatrix out(V.dim(), n);
  for (Eigen::Index i = 0; i < V.dim(); ++i) {
    Eigen::Index lead = -1;
    for (Eigen::Index c = 0; c < n; ++c)
      if (R(i, c) != 0) {
        lead = c;
        break;
      }
    RatVector truncated = RatVector::Zero(n);
    if (lead >= 0)
      for (Eigen::Index c = lead; c < n; ++c)
        if (col_grade[static_cast<size_t>(c)] ==
            col_grade[static_cast<size_t>(lead)])
          truncated(c) = R(i, c);
    out.row(i) = (M * truncated).transpose();
  }
  RationalSubspace result = RationalSubspace::from_rows(out);
  if (result.dim() != V.dim())
    throw DegenerationInvariantViolation(
        "leading components failed to stay independent");
  return result;
}

DegenerationDatum h_I_explicit(const SphericalDatum& d,
                               const std::vector<int>& I) {
  DegenerationDatum dd;
  dd.I = I;
  std::vector<LinearFunctional> gens;
  for (int i : I) gens.push_back(d.S[static_cast<size_t>(i)]);

  std::vector<RatVector> span_vecs;
  for (Eigen::Index i = 0; i < d.lh.dim(); ++i)
    span_vecs.push_back(d.lh.basis_vector(i));
  for (const TEntry& e : d.T_table) {
    TEntry trunc;
    trunc.alpha = e.alpha;
    trunc.x_minus_alpha = e.x_minus_alpha;
    trunc.t_value = RatVector::Zero(d.g.dim());
    for (const auto& [beta, comp] : e.components) {
      LinearFunctional gen = restrict_to_aZ(d, e.alpha + beta, true);
      if (in_monoid_span(gen, gens)) {
        trunc.components.push_back({beta, comp});
        trunc.t_value += comp;
      }
    }
    span_vecs.push_back(trunc.x_minus_alpha + trunc.t_value);
    dd.TI_table.push_back(std::move(trunc));
  }
  dd.hI = RationalSubspace::from_vectors(span_vecs, d.g.dim());

  // a_I = joint kernel of I inside a_Z.
  RatMatrix cond(static_cast<Eigen::Index>(I.size()), d.aZ.dim());
  for (size_t k = 0; k < I.size(); ++k)
    cond.row(static_cast<Eigen::Index>(k)) =
        d.S[static_cast<size_t>(I[k])].coords;
  dd.a_I = kernel(cond);
  RatMatrix amb = dd.a_I.basis() * d.aZ.basis();
  dd.a_I_ambient = RationalSubspace::from_rows(amb);
  dd.hI_hat = sum(dd.hI, dd.a_I_ambient);

  if (dd.hI.dim() != d.h.dim())
    throw DegenerationInvariantViolation("dim h_I != dim h");
  if (!d.g.is_subalgebra(dd.hI))
    throw DegenerationInvariantViolation("h_I is not a subalgebra");
  if (!d.g.normalizes(dd.a_I_ambient, dd.hI))
    throw DegenerationInvariantViolation("a_I does not normalize h_I");
  if (!dd.hI.contains(d.lh))
    throw DegenerationInvariantViolation("h_I does not contain l ∩ h");
  return dd;
}

RatVector interior_direction(const SphericalDatum& d,
                             const std::vector<int>& I) {
  std::vector<RatRowVector> rows;
  for (const auto& s : d.S) rows.push_back(s.coords);
  CompressionSubcones cs = compression_subcones(d.aZ.dim(), rows, I);
  RatVector x = RatVector::Zero(d.aZ.dim());
  for (const RatVector& r : cs.a_I_cone.rays()) x += r;
  return x;
}

ConsistencyReport degeneration_consistency(const SphericalDatum& d,
                                           const DegenerationDatum& dd,
                                           const std::vector<RatVector>& samples) {
  std::vector<RatRowVector> rows;
  for (const auto& s : d.S) rows.push_back(s.coords);
  CompressionSubcones cs = compression_subcones(d.aZ.dim(), rows, dd.I);
  ConsistencyReport rep;
  for (const RatVector& x : samples) {
    if (cs.a_I_cone.contains(x) != RationalCone::Position::interior)
      throw NotInInteriorCone("sample not strictly inside a_I^{--}");
    RationalSubspace lim = initial_subspace(d.g, aZ_to_ambient(d, x), d.h);
    ++rep.samples_checked;
    if (lim != dd.hI) {
      rep.ok = false;
      rep.detail += "limit mismatch at sample " +
                    std::to_string(rep.samples_checked) + "; ";
    }
  }
  return rep;
}

DegenerateSpaceReport verify_degenerate_space(const SphericalDatum& d,
                                              const DegenerationDatum& dd) {
  DegenerateSpaceReport rep;
  rep.open_orbit = check_open_orbit(d.g, dd.hI, d.P);
  if (!rep.open_orbit) return rep;
  rep.degenerate = analyze_structure(d.g, dd.hI, d.P);
  rep.adapted = rep.degenerate.l == d.l && rep.degenerate.u == d.u &&
                rep.degenerate.aZ == d.aZ;
  std::vector<RatVector> hs;
  for (int i : dd.I)
    hs.push_back(RatVector(-d.S[static_cast<size_t>(i)].coords.transpose()));
  rep.cone_matches = rep.degenerate.compression_cone ==
                     RationalCone::from_halfspaces(d.aZ.dim(), hs);
  std::vector<RatVector> lin = rep.degenerate.compression_cone.lineality();
  rep.edge_matches =
      RationalSubspace::from_vectors(lin, d.aZ.dim()) == dd.a_I;
  return rep;
}

BetaFunctionals beta_functionals(const SphericalDatum& d,
                                 const std::vector<int>& I,
                                 const std::vector<LinearFunctional>& F,
                                 bool F_available) {
  if (I.size() == d.S.size())
    throw EmptyIndexSet("S \\ I is empty: beta_tilde undefined for I = S");
  BetaFunctionals bf;
  for (size_t i = 0; i < d.S.size(); ++i)
    if (std::find(I.begin(), I.end(), static_cast<int>(i)) == I.end())
      bf.tilde_terms.push_back(d.S[i]);
  bf.full_terms = bf.tilde_terms;
  for (const auto& f : F) bf.full_terms.push_back(f);
  bf.f_complete = F_available;
  return bf;
}

Rat BetaFunctionals::beta_tilde(const RatVector& X) const {
  Rat best = tilde_terms.front().eval(X);
  for (size_t i = 1; i < tilde_terms.size(); ++i)
    best = std::max(best, tilde_terms[i].eval(X));
  return best;
}

Rat BetaFunctionals::beta(const RatVector& X) const {
  Rat best = full_terms.front().eval(X);
  for (size_t i = 1; i < full_terms.size(); ++i)
    best = std::max(best, full_terms[i].eval(X));
  return best;
}

double degeneration_numeric_gap(const StructuredLieAlgebra& g,
                                const RatVector& X, const RationalSubspace& V,
                                const RationalSubspace& expected, double t) {
  if (V.dim() != expected.dim()) return 1.0;
  if (V.dim() == 0) return 0.0;
  const Eigen::Index n = g.dim();
  Eigen::MatrixXd A(n, V.dim()), B(n, expected.dim());
  if (X.isZero(Rat(0))) {
    for (Eigen::Index i = 0; i < V.dim(); ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        A(j, i) = to_double(V.basis()(i, j));
  } else {
    std::vector<RootSpace> spaces =
        root_decomposition(g, RationalSubspace::from_vectors({X}, n));
    RatMatrix M(n, n);
    std::vector<double> grade(static_cast<size_t>(n));
    Eigen::Index col = 0;
    for (const RootSpace& rs : spaces)
      for (Eigen::Index j = 0; j < rs.space.dim(); ++j) {
        M.col(col) = rs.space.basis_vector(j);
        grade[static_cast<size_t>(col)] = to_double(rs.root.eval(X));
        ++col;
      }
    Eigen::FullPivLU<RatMatrix> lu(M);
    for (Eigen::Index i = 0; i < V.dim(); ++i) {
      RatVector c = lu.solve(V.basis_vector(i));
      double gmax = -1e300;
      for (Eigen::Index k = 0; k < n; ++k)
        if (c(k) != 0) gmax = std::max(gmax, grade[static_cast<size_t>(k)]);
      // e^{t ad X} v, rescaled by e^{-t gmax} so entries stay finite.
      Eigen::VectorXd amb = Eigen::VectorXd::Zero(n);
      for (Eigen::Index k = 0; k < n; ++k)
        if (c(k) != 0) {
          double w = std::exp(t * (grade[static_cast<size_t>(k)] - gmax));
          for (Eigen::Index j = 0; j < n; ++j)
            amb(j) += w * to_double(M(j, k)) * to_double(c(k));
        }
      A.col(i) = amb;
    }
  }
  for (Eigen::Index i = 0; i < expected.dim(); ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      B(j, i) = to_double(expected.basis()(i, j));
  Eigen::HouseholderQR<Eigen::MatrixXd> qa(A), qb(B);
  Eigen::MatrixXd Qa =
      qa.householderQ() * Eigen::MatrixXd::Identity(n, V.dim());
  Eigen::MatrixXd Qb =
      qb.householderQ() * Eigen::MatrixXd::Identity(n, expected.dim());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qa.transpose() * Qb);
  double smin = svd.singularValues().minCoeff();
  smin = std::min(1.0, std::max(-1.0, smin));
  return std::sqrt(std::max(0.0, 1.0 - smin * smin));
}

std::string degeneration_to_json(const DegenerationDatum& dd) {
  nlohmann::json doc;
  doc["I"] = dd.I;
  auto rows = [](const RationalSubspace& s) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < s.ambient_dim(); ++j)
        row.push_back(to_string(s.basis()(i, j)));
      out.push_back(row);
    }
    return out;
  };
  doc["hI"] = rows(dd.hI);
  doc["hI_hat"] = rows(dd.hI_hat);
  doc["a_I"] = rows(dd.a_I_ambient);
  nlohmann::json table = nlohmann::json::array();
  for (const TEntry& e : dd.TI_table) {
    nlohmann::json entry;
    nlohmann::json tv = nlohmann::json::array();
    for (Eigen::Index i = 0; i < e.t_value.size(); ++i)
      tv.push_back(to_string(e.t_value(i)));
    entry["t_value"] = tv;
    entry["kept_components"] = e.components.size();
    table.push_back(entry);
  }
  doc["TI_table"] = table;
  return doc.dump(2);
}

}  // namespace sph
