#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sph/rational.hpp"
#include "sph/subspace.hpp"

namespace sph {

// Finite-dimensional Lie algebra over Q given by structure constants
// [e_i, e_j] = sum_k c[i][j][k] e_k, with an invariant symmetric bilinear
// form and an optional involution. Antisymmetry, the Jacobi identity,
// invariance of the form and the involution axioms are verified exactly at
// construction.
class StructuredLieAlgebra {
 public:
  // Empty placeholder (dimension 0); every real algebra goes through the
  // validating constructor.
  StructuredLieAlgebra() : dim_(0), form_(0, 0) {}

  StructuredLieAlgebra(Eigen::Index dim, std::vector<std::string> labels,
                       std::vector<std::vector<RatVector>> structure_constants,
                       RatMatrix form,
                       std::optional<RatMatrix> involution = std::nullopt);

  Eigen::Index dim() const { return dim_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const RatMatrix& form() const { return form_; }
  const std::optional<RatMatrix>& involution() const { return theta_; }

  RatVector bracket(const RatVector& x, const RatVector& y) const;
  RatMatrix ad(const RatVector& x) const;
  const RatMatrix& ad_basis(Eigen::Index i) const { return ad_[i]; }

  RatVector basis_vector(Eigen::Index i) const;

  // [V, W] as a subspace.
  RationalSubspace bracket_space(const RationalSubspace& v,
                                 const RationalSubspace& w) const;
  bool is_subalgebra(const RationalSubspace& v) const;
  bool is_abelian(const RationalSubspace& v) const;
  // [x, V] ⊆ V for all x in normalizer candidates n.
  bool normalizes(const RationalSubspace& n, const RationalSubspace& v) const;

  Rat form_value(const RatVector& x, const RatVector& y) const;

  // {x in g : form(x, v) = 0 for all v in V}.
  RationalSubspace form_orthogonal(const RationalSubspace& v) const;

 private:
  void validate() const;

  Eigen::Index dim_;
  std::vector<std::string> labels_;
  std::vector<std::vector<RatVector>> c_;
  std::vector<RatMatrix> ad_;
  RatMatrix form_;
  std::optional<RatMatrix> theta_;
};

// Built-in algebras, all with the trace form of the defining representation
// and the involution x -> -x^T.
StructuredLieAlgebra sl2();
StructuredLieAlgebra sl2_times_sl2();
StructuredLieAlgebra sln(int n);  // 2 <= n <= 4
// Abelian algebra of the given dimension with the standard inner product
// (no roots; models Z = A).
StructuredLieAlgebra abelian(Eigen::Index dim);

// JSON interchange: {"dim", "labels", "brackets": [[i, j, [[k, "p/q"], ...]],
// ...], "form": [[...]], "theta": optional}. Indices 0-based; rationals as
// "p/q" strings or integers.
StructuredLieAlgebra lie_algebra_from_json(const std::string& text);
std::string lie_algebra_to_json(const StructuredLieAlgebra& g);

}  // namespace sph
