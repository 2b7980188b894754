#pragma once

#include <stdexcept>
#include <vector>

#include "sph/rational.hpp"

namespace sph {

// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<Eigen::Index> rref_in_place(RatMatrix& m) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r)
      if (m(r, col) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    m.row(piv).swap(m.row(row));
    m.row(row) /= m(row, col);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (r != row && m(r, col) != 0) m.row(r) -= m(r, col) * m.row(row);
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

// Subspace of Q^n with the unique reduced-row-echelon basis as canonical form;
// subspace equality is syntactic equality of representations.
class RationalSubspace {
 public:
  RationalSubspace() : ambient_(0) {}

  explicit RationalSubspace(Eigen::Index ambient_dim)
      : ambient_(ambient_dim), basis_(0, ambient_dim) {}

  // Rows of `span` generate the subspace.
  static RationalSubspace from_rows(const RatMatrix& span) {
    RationalSubspace s(span.cols());
    RatMatrix m = span;
    std::vector<Eigen::Index> piv = rref_in_place(m);
    s.basis_ = m.topRows(static_cast<Eigen::Index>(piv.size()));
    s.pivots_ = std::move(piv);
    return s;
  }

  static RationalSubspace from_vectors(const std::vector<RatVector>& vs,
                                       Eigen::Index ambient_dim) {
    RatMatrix m(static_cast<Eigen::Index>(vs.size()), ambient_dim);
    for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) = vs[i].transpose();
    return from_rows(m);
  }

  static RationalSubspace full(Eigen::Index ambient_dim) {
    RatMatrix id = RatMatrix::Identity(ambient_dim, ambient_dim);
    return from_rows(id);
  }

  Eigen::Index ambient_dim() const { return ambient_; }
  Eigen::Index dim() const { return basis_.rows(); }
  const RatMatrix& basis() const { return basis_; }
  RatVector basis_vector(Eigen::Index i) const {
    return basis_.row(i).transpose();
  }
  const std::vector<Eigen::Index>& pivot_columns() const { return pivots_; }

  bool operator==(const RationalSubspace& o) const {
    return ambient_ == o.ambient_ && basis_.rows() == o.basis_.rows() &&
           basis_ == o.basis_;
  }
  bool operator!=(const RationalSubspace& o) const { return !(*this == o); }

  bool contains(const RatVector& v) const {
    check_dim(v.size());
    RatVector r = v;
    for (Eigen::Index i = 0; i < basis_.rows(); ++i)
      r -= r(pivots_[i]) * basis_.row(i).transpose();
    return r.isZero(Rat(0));
  }

  bool contains(const RationalSubspace& o) const {
    for (Eigen::Index i = 0; i < o.dim(); ++i)
      if (!contains(o.basis_vector(i))) return false;
    return true;
  }

  // Coordinates of v in the echelon basis; throws if v is outside.
  RatVector coordinates(const RatVector& v) const {
    check_dim(v.size());
    RatVector c(dim());
    RatVector r = v;
    for (Eigen::Index i = 0; i < basis_.rows(); ++i) {
      c(i) = r(pivots_[i]);
      r -= c(i) * basis_.row(i).transpose();
    }
    if (!r.isZero(Rat(0)))
      throw std::invalid_argument("vector outside subspace");
    return c;
  }

 private:
  void check_dim(Eigen::Index n) const {
    if (n != ambient_) throw std::invalid_argument("ambient dim mismatch");
  }

  Eigen::Index ambient_;
  RatMatrix basis_;
  std::vector<Eigen::Index> pivots_;
};

inline RationalSubspace sum(const RationalSubspace& a,
                            const RationalSubspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("ambient dim mismatch");
  RatMatrix m(a.dim() + b.dim(), a.ambient_dim());
  m.topRows(a.dim()) = a.basis();
  m.bottomRows(b.dim()) = b.basis();
  return RationalSubspace::from_rows(m);
}

// Exact kernel of m (as a subspace of Q^cols, row-vector convention).
inline RationalSubspace kernel(const RatMatrix& m) {
  RatMatrix r = m;
  std::vector<Eigen::Index> piv = rref_in_place(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (Eigen::Index c : piv) is_pivot[c] = true;
  RatMatrix basis(m.cols() - static_cast<Eigen::Index>(piv.size()), m.cols());
  Eigen::Index row = 0;
  for (Eigen::Index free_col = 0; free_col < m.cols(); ++free_col) {
    if (is_pivot[free_col]) continue;
    basis.row(row).setZero();
    basis(row, free_col) = 1;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(piv.size()); ++i)
      basis(row, piv[i]) = -r(i, free_col);
    ++row;
  }
  return RationalSubspace::from_rows(basis);
}

inline RationalSubspace intersection(const RationalSubspace& a,
                                     const RationalSubspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("ambient dim mismatch");
  if (a.dim() == 0 || b.dim() == 0)
    return RationalSubspace(a.ambient_dim());
  // x in both spans: x = A^T u = B^T v; solve [A^T | -B^T] (u,v)^T = 0.
  RatMatrix m(a.ambient_dim(), a.dim() + b.dim());
  m.leftCols(a.dim()) = a.basis().transpose();
  m.rightCols(b.dim()) = -b.basis().transpose();
  RationalSubspace ker = kernel(m);
  RatMatrix vecs(ker.dim(), a.ambient_dim());
  for (Eigen::Index i = 0; i < ker.dim(); ++i)
    vecs.row(i) =
        (a.basis().transpose() * ker.basis().row(i).head(a.dim()).transpose())
            .transpose();
  return RationalSubspace::from_rows(vecs);
}

// {w in W : form(w, v) = 0 for all v in V ∩ W}.
inline RationalSubspace orth_complement(const RationalSubspace& v,
                                        const RationalSubspace& w,
                                        const RatMatrix& form) {
  RationalSubspace vw = intersection(v, w);
  if (vw.dim() == 0) return w;
  // Conditions on coordinates c (w.r.t. W's basis): (VW B_form W^T) c = 0.
  RatMatrix cond = vw.basis() * form * w.basis().transpose();
  RationalSubspace ker = kernel(cond);
  RatMatrix vecs = ker.basis() * w.basis();
  return RationalSubspace::from_rows(vecs);
}

}  // namespace sph
