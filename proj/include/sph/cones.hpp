#pragma once

#include <string>
#include <vector>

#include "sph/roots.hpp"

namespace sph {

// Convex rational polyhedral cone, kept with synchronized generator and
// halfspace descriptions. Generators split into a lineality basis and
// primitive extreme rays (reduced modulo the lineality space); halfspaces
// split into inequalities a.x >= 0 and equalities e.x = 0. Both sides are
// canonical, so cone equality is equality of representations.
class RationalCone {
 public:
  RationalCone() = default;

  static RationalCone from_generators(Eigen::Index ambient,
                                      const std::vector<RatVector>& rays,
                                      const std::vector<RatVector>& lineality = {});
  static RationalCone from_halfspaces(Eigen::Index ambient,
                                      const std::vector<RatVector>& inequalities,
                                      const std::vector<RatVector>& equalities = {});
  static RationalCone zero(Eigen::Index ambient);
  static RationalCone full(Eigen::Index ambient);

  Eigen::Index ambient_dim() const { return ambient_; }
  const std::vector<RatVector>& rays() const { return rays_; }
  const std::vector<RatVector>& lineality() const { return lineality_; }
  const std::vector<RatVector>& inequalities() const { return inequalities_; }
  const std::vector<RatVector>& equalities() const { return equalities_; }

  Eigen::Index dim() const;
  bool is_simplicial() const {
    return lineality_.empty() &&
           dim() == static_cast<Eigen::Index>(rays_.size());
  }
  bool operator==(const RationalCone& o) const;
  bool operator!=(const RationalCone& o) const { return !(*this == o); }

  enum class Position { interior, boundary, outside };
  // `interior` means relative interior.
  Position contains(const RatVector& x) const;

  // Linear span of the cone.
  RationalSubspace span() const;

 private:
  Eigen::Index ambient_ = 0;
  std::vector<RatVector> rays_;
  std::vector<RatVector> lineality_;
  std::vector<RatVector> inequalities_;
  std::vector<RatVector> equalities_;
};

RationalCone dual_cone(const RationalCone& c);
std::vector<RatVector> extreme_rays(const RationalCone& c);
// f must be nonnegative on c (i.e. lie in the dual cone); returns c ∩ {f=0}.
RationalCone face(const RationalCone& c, const RatVector& f);
bool is_face_of(const RationalCone& c, const RationalCone& candidate);

struct Fan {
  RationalCone support;
  std::vector<RationalCone> cones;       // all simplicial, dim == dim support
  std::vector<bool> smooth;              // generators extend to a lattice basis
  std::string certification;             // human-readable verification summary
};

// Deterministic pulling (lexicographic stellar) triangulation of the support.
// A lineality space is handled by crossing an orthant fan of the lineality
// with the triangulated pointed part. Unimodular refinement is not performed;
// the smooth flag reports it.
Fan simplicial_subdivision(const RationalCone& support);

// Exact fan verification: simpliciality, support containment, pairwise
// intersections are common faces, and interior facets shared by exactly two
// cones. Throws std::runtime_error on failure with a description.
void verify_fan(const Fan& fan);

struct CompressionSubcones {
  RationalSubspace a_I;      // {alpha = 0 for alpha in I} inside a_Z coords
  RationalCone a_I_cone;     // {alpha = 0 on I, alpha <= 0 on S \ I}
  RationalCone edge;         // a_Z^- ∩ -a_Z^-
};

// S given by coordinate rows of functionals on the a_Z model space (dim d).
CompressionSubcones compression_subcones(Eigen::Index d,
                                         const std::vector<RatRowVector>& S,
                                         const std::vector<int>& I_indices);

struct ToricLimit {
  bool exists = false;
  std::vector<int> limit_pattern;  // chart coordinates tending to 0
  Rat rate;                        // min |psi(X)| over nonzero entries
};

struct ChartMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// psi are the chart functionals; X must lie in some cone of the fan.
ToricLimit toric_limit(const Fan& fan, const RatVector& X,
                       const std::vector<RatRowVector>& psi);

}  // namespace sph
