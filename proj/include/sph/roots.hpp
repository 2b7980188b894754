#pragma once

#include <stdexcept>
#include <vector>

#include "sph/lie.hpp"

namespace sph {

// Functional on a subspace (typically a torus a or the quotient model a_Z),
// stored by its values on the subspace's canonical echelon basis.
struct LinearFunctional {
  RationalSubspace ambient;
  RatRowVector coords;

  LinearFunctional() = default;
  LinearFunctional(RationalSubspace amb, RatRowVector c)
      : ambient(std::move(amb)), coords(std::move(c)) {
    if (coords.size() != ambient.dim())
      throw std::invalid_argument("functional coordinate size mismatch");
  }

  static LinearFunctional zero(const RationalSubspace& amb) {
    return LinearFunctional(amb, RatRowVector::Zero(amb.dim()));
  }

  bool is_zero() const { return coords.isZero(Rat(0)); }

  // Value on a vector of the ambient algebra lying in `ambient`.
  Rat eval(const RatVector& x) const {
    return (coords * ambient.coordinates(x))(0, 0);
  }

  bool operator==(const LinearFunctional& o) const {
    return ambient == o.ambient && coords.size() == o.coords.size() &&
           coords == o.coords;
  }
  bool operator!=(const LinearFunctional& o) const { return !(*this == o); }

  LinearFunctional operator+(const LinearFunctional& o) const {
    return LinearFunctional(ambient, coords + o.coords);
  }
  LinearFunctional operator-() const {
    return LinearFunctional(ambient, -coords);
  }
  LinearFunctional operator-(const LinearFunctional& o) const {
    return LinearFunctional(ambient, coords - o.coords);
  }
  friend LinearFunctional operator*(const Rat& s, const LinearFunctional& f) {
    return LinearFunctional(f.ambient, s * f.coords);
  }
};

struct NonSemisimpleAction : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootSpace {
  LinearFunctional root;   // functional on the torus subspace a
  RationalSubspace space;  // g^alpha
};

// Exact characteristic polynomial det(xI - m), coefficients low to high.
std::vector<Rat> characteristic_polynomial(const RatMatrix& m);

// All rational roots with algebraic multiplicities; second return is the
// degree left unfactored (0 iff the polynomial splits over Q).
std::vector<std::pair<Rat, int>> rational_roots(const std::vector<Rat>& poly,
                                                int* unfactored_degree);

// Simultaneous eigenspace decomposition of g under ad(a), a abelian acting
// semisimply with rational eigenvalues. Throws NonSemisimpleAction otherwise.
// The zero root is always present (its space contains a); output is sorted
// deterministically by root coordinates.
std::vector<RootSpace> root_decomposition(const StructuredLieAlgebra& g,
                                          const RationalSubspace& a);

}  // namespace sph
