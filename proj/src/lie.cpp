#include "sph/lie.hpp"

#include <json.hpp>

namespace sph {

StructuredLieAlgebra::StructuredLieAlgebra(
    Eigen::Index dim, std::vector<std::string> labels,
    std::vector<std::vector<RatVector>> structure_constants, RatMatrix form,
    std::optional<RatMatrix> involution)
    : dim_(dim),
      labels_(std::move(labels)),
      c_(std::move(structure_constants)),
      form_(std::move(form)),
      theta_(std::move(involution)) {
  if (dim_ <= 0) throw std::invalid_argument("dim must be positive");
  if (static_cast<Eigen::Index>(labels_.size()) != dim_)
    throw std::invalid_argument("label count mismatch");
  if (static_cast<Eigen::Index>(c_.size()) != dim_)
    throw std::invalid_argument("structure constant shape mismatch");
  for (const auto& row : c_) {
    if (static_cast<Eigen::Index>(row.size()) != dim_)
      throw std::invalid_argument("structure constant shape mismatch");
    for (const auto& v : row)
      if (v.size() != dim_)
        throw std::invalid_argument("structure constant shape mismatch");
  }
  if (form_.rows() != dim_ || form_.cols() != dim_)
    throw std::invalid_argument("form shape mismatch");
  ad_.resize(dim_);
  for (Eigen::Index i = 0; i < dim_; ++i) {
    ad_[i].resize(dim_, dim_);
    for (Eigen::Index j = 0; j < dim_; ++j) ad_[i].col(j) = c_[i][j];
  }
  validate();
}

void StructuredLieAlgebra::validate() const {
  for (Eigen::Index i = 0; i < dim_; ++i)
    for (Eigen::Index j = 0; j < dim_; ++j)
      if (c_[i][j] != RatVector(-c_[j][i]))
        throw std::invalid_argument("structure constants not antisymmetric");
  for (Eigen::Index i = 0; i < dim_; ++i)
    for (Eigen::Index j = i + 1; j < dim_; ++j)
      for (Eigen::Index k = j + 1; k < dim_; ++k) {
        RatVector jac = ad_[i] * c_[j][k] + ad_[j] * (ad_[k] * basis_vector(i)) +
                        ad_[k] * c_[i][j];
        if (!jac.isZero(Rat(0)))
          throw std::invalid_argument("Jacobi identity fails");
      }
  if (form_ != RatMatrix(form_.transpose()))
    throw std::invalid_argument("form not symmetric");
  for (Eigen::Index i = 0; i < dim_; ++i) {
    // kappa([x,y],z) + kappa(y,[x,z]) = 0  <=>  ad(x)^T K + K ad(x) = 0.
    RatMatrix inv = ad_[i].transpose() * form_ + form_ * ad_[i];
    if (!inv.isZero(Rat(0)))
      throw std::invalid_argument("form not ad-invariant");
  }
  if (theta_) {
    if (theta_->rows() != dim_ || theta_->cols() != dim_)
      throw std::invalid_argument("theta shape mismatch");
    if (RatMatrix(*theta_ * *theta_) != RatMatrix::Identity(dim_, dim_))
      throw std::invalid_argument("theta is not an involution");
    if (RatMatrix(theta_->transpose() * form_ * *theta_) != form_)
      throw std::invalid_argument("theta does not preserve the form");
  }
}

RatVector StructuredLieAlgebra::bracket(const RatVector& x,
                                        const RatVector& y) const {
  if (x.size() != dim_ || y.size() != dim_)
    throw std::invalid_argument("bracket dimension mismatch");
  return ad(x) * y;
}

RatMatrix StructuredLieAlgebra::ad(const RatVector& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("ad dimension mismatch");
  RatMatrix m = RatMatrix::Zero(dim_, dim_);
  for (Eigen::Index i = 0; i < dim_; ++i)
    if (x(i) != 0) m += x(i) * ad_[i];
  return m;
}

RatVector StructuredLieAlgebra::basis_vector(Eigen::Index i) const {
  RatVector v = RatVector::Zero(dim_);
  v(i) = 1;
  return v;
}

RationalSubspace StructuredLieAlgebra::bracket_space(
    const RationalSubspace& v, const RationalSubspace& w) const {
  RatMatrix rows(v.dim() * w.dim(), dim_);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < v.dim(); ++i)
    for (Eigen::Index j = 0; j < w.dim(); ++j)
      rows.row(r++) =
          bracket(v.basis_vector(i), w.basis_vector(j)).transpose();
  return RationalSubspace::from_rows(rows);
}

bool StructuredLieAlgebra::is_subalgebra(const RationalSubspace& v) const {
  return v.contains(bracket_space(v, v));
}

bool StructuredLieAlgebra::is_abelian(const RationalSubspace& v) const {
  return bracket_space(v, v).dim() == 0;
}

bool StructuredLieAlgebra::normalizes(const RationalSubspace& n,
                                      const RationalSubspace& v) const {
  return v.contains(bracket_space(n, v));
}

Rat StructuredLieAlgebra::form_value(const RatVector& x,
                                     const RatVector& y) const {
  return (x.transpose() * form_ * y)(0, 0);
}

RationalSubspace StructuredLieAlgebra::form_orthogonal(
    const RationalSubspace& v) const {
  if (v.dim() == 0) return RationalSubspace::full(dim_);
  return kernel(RatMatrix(v.basis() * form_));
}

namespace {

// Builds an algebra from a faithful matrix representation of the basis:
// brackets via commutators, form via trace form, involution -transpose.
StructuredLieAlgebra from_matrices(const std::vector<RatMatrix>& basis,
                                   std::vector<std::string> labels) {
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index n = basis[0].rows();
  // Flatten basis matrices column-wise and solve for coordinates.
  RatMatrix flat(n * n, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    flat.col(i) = Eigen::Map<const RatVector>(basis[i].data(), n * n);
  Eigen::FullPivLU<RatMatrix> lu(flat);
  if (lu.rank() != dim)
    throw std::invalid_argument("representation basis not independent");
  auto coords = [&](const RatMatrix& m) -> RatVector {
    RatVector rhs = Eigen::Map<const RatVector>(m.data(), n * n);
    return lu.solve(rhs);
  };
  std::vector<std::vector<RatVector>> c(dim, std::vector<RatVector>(dim));
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      c[i][j] = coords(basis[i] * basis[j] - basis[j] * basis[i]);
  RatMatrix form(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      form(i, j) = (basis[i] * basis[j]).trace();
  RatMatrix theta(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    theta.col(i) = coords(RatMatrix(-basis[i].transpose()));
  return StructuredLieAlgebra(dim, std::move(labels), std::move(c),
                              std::move(form), theta);
}

}  // namespace

StructuredLieAlgebra sln(int n) {
  if (n < 2 || n > 4) throw std::invalid_argument("sln supports 2 <= n <= 4");
  std::vector<RatMatrix> basis;
  std::vector<std::string> labels;
  for (int i = 0; i < n - 1; ++i) {
    RatMatrix h = RatMatrix::Zero(n, n);
    h(i, i) = 1;
    h(i + 1, i + 1) = -1;
    basis.push_back(h);
    labels.push_back("H" + std::to_string(i + 1));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      RatMatrix e = RatMatrix::Zero(n, n);
      e(i, j) = 1;
      basis.push_back(e);
      labels.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
    }
  return from_matrices(basis, std::move(labels));
}

StructuredLieAlgebra sl2() {
  // Basis (H, E, F) with [H,E]=2E, [H,F]=-2F, [E,F]=H.
  RatMatrix h(2, 2), e(2, 2), f(2, 2);
  h << 1, 0, 0, -1;
  e << 0, 1, 0, 0;
  f << 0, 0, 1, 0;
  return from_matrices({h, e, f}, {"H", "E", "F"});
}

StructuredLieAlgebra sl2_times_sl2() {
  auto embed = [](const RatMatrix& m, int block) {
    RatMatrix r = RatMatrix::Zero(4, 4);
    r.block(2 * block, 2 * block, 2, 2) = m;
    return r;
  };
  RatMatrix h(2, 2), e(2, 2), f(2, 2);
  h << 1, 0, 0, -1;
  e << 0, 1, 0, 0;
  f << 0, 0, 1, 0;
  return from_matrices({embed(h, 0), embed(e, 0), embed(f, 0), embed(h, 1),
                        embed(e, 1), embed(f, 1)},
                       {"H1", "E1", "F1", "H2", "E2", "F2"});
}

StructuredLieAlgebra abelian(Eigen::Index dim) {
  std::vector<std::vector<RatVector>> c(
      dim, std::vector<RatVector>(dim, RatVector::Zero(dim)));
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < dim; ++i)
    labels.push_back("A" + std::to_string(i + 1));
  return StructuredLieAlgebra(dim, std::move(labels), std::move(c),
                              RatMatrix::Identity(dim, dim),
                              RatMatrix::Identity(dim, dim));
}

namespace {

Rat rat_from_json(const nlohmann::json& v) {
  if (v.is_string()) return rat_from_string(v.get<std::string>());
  if (v.is_number_integer()) return rat(v.get<long>());
  throw std::invalid_argument("rational entries must be integers or strings");
}

RatMatrix matrix_from_json(const nlohmann::json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  if (r == 0) return RatMatrix(0, 0);
  const Eigen::Index c = static_cast<Eigen::Index>(rows[0].size());
  RatMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c)
      throw std::invalid_argument("ragged matrix in JSON");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rat_from_json(rows[i][j]);
  }
  return m;
}

}  // namespace

StructuredLieAlgebra lie_algebra_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  const Eigen::Index dim = doc.at("dim").get<Eigen::Index>();
  std::vector<std::string> labels;
  if (doc.contains("labels"))
    labels = doc["labels"].get<std::vector<std::string>>();
  else
    for (Eigen::Index i = 0; i < dim; ++i)
      labels.push_back("e" + std::to_string(i));
  std::vector<std::vector<RatVector>> c(
      dim, std::vector<RatVector>(dim, RatVector::Zero(dim)));
  for (const auto& entry : doc.at("brackets")) {
    const Eigen::Index i = entry.at(0).get<Eigen::Index>();
    const Eigen::Index j = entry.at(1).get<Eigen::Index>();
    if (i < 0 || i >= dim || j < 0 || j >= dim)
      throw std::invalid_argument("bracket index out of range");
    for (const auto& term : entry.at(2)) {
      const Eigen::Index k = term.at(0).get<Eigen::Index>();
      if (k < 0 || k >= dim)
        throw std::invalid_argument("bracket index out of range");
      c[i][j](k) = rat_from_json(term.at(1));
      c[j][i](k) = -c[i][j](k);
    }
  }
  RatMatrix form = matrix_from_json(doc.at("form"));
  std::optional<RatMatrix> theta;
  if (doc.contains("theta") && !doc["theta"].is_null())
    theta = matrix_from_json(doc["theta"]);
  return StructuredLieAlgebra(dim, std::move(labels), std::move(c),
                              std::move(form), std::move(theta));
}

std::string lie_algebra_to_json(const StructuredLieAlgebra& g) {
  nlohmann::json doc;
  doc["dim"] = g.dim();
  doc["labels"] = g.labels();
  nlohmann::json brackets = nlohmann::json::array();
  for (Eigen::Index i = 0; i < g.dim(); ++i)
    for (Eigen::Index j = i + 1; j < g.dim(); ++j) {
      RatVector v = g.ad_basis(i).col(j);
      if (v.isZero(Rat(0))) continue;
      nlohmann::json terms = nlohmann::json::array();
      for (Eigen::Index k = 0; k < g.dim(); ++k)
        if (v(k) != 0) terms.push_back({k, to_string(v(k))});
      brackets.push_back({i, j, terms});
    }
  doc["brackets"] = brackets;
  auto matrix_json = [](const RatMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        row.push_back(to_string(m(i, j)));
      rows.push_back(row);
    }
    return rows;
  };
  doc["form"] = matrix_json(g.form());
  if (g.involution()) doc["theta"] = matrix_json(*g.involution());
  return doc.dump(2);
}

}  // namespace sph
