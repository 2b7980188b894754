#pragma once

#include "sph/sphstruct.hpp"

namespace sph {

struct NotInInteriorCone : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyIndexSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerationInvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Boundary degeneration h_I for a subset I of the spherical roots.
struct DegenerationDatum {
  std::vector<int> I;            // indices into datum.S
  RationalSubspace hI;           // the degenerate subalgebra
  RationalSubspace a_I;          // {X : alpha(X) = 0, alpha in I}, a_Z coords
  RationalSubspace a_I_ambient;  // the same space inside g
  RationalSubspace hI_hat;       // hI + a_I
  std::vector<TEntry> TI_table;  // T with components kept iff alpha+beta in <I>
};

// Explicit construction: hI = (l ∩ h) + span{X_{-alpha} + T_I(X_{-alpha})},
// where T_I keeps a component of weight beta iff the restriction of
// alpha + beta lies in the monoid generated by {S_i : i in I}. Verifies the
// invariants (subalgebra, dim hI = dim h, [a_I, hI] ⊆ hI, hI ⊇ l ∩ h).
DegenerationDatum h_I_explicit(const SphericalDatum& d,
                               const std::vector<int>& I);

// lim_{t -> +inf} e^{t ad X} V in the Grassmannian: echelonize V in a basis
// ordered by descending ad(X)-eigenvalue and keep each row's leading
// (maximal-grade) component. ad(X) must be semisimple with rational spectrum.
RationalSubspace initial_subspace(const StructuredLieAlgebra& g,
                                  const RatVector& X,
                                  const RationalSubspace& V);

// Decides gamma ∈ N_0-span{gens} by exact bounded search (the monoid cone
// must be pointed so coefficients are bounded).
bool in_monoid_span(const LinearFunctional& gamma,
                    const std::vector<LinearFunctional>& gens);

RatVector aZ_to_ambient(const SphericalDatum& d, const RatVector& coords);

// A point in the relative interior of a_I^{--} (a_Z coordinates): the sum of
// the extreme rays of {alpha = 0 on I, alpha <= 0 on S \ I}.
RatVector interior_direction(const SphericalDatum& d,
                             const std::vector<int>& I);

struct ConsistencyReport {
  bool ok = true;
  int samples_checked = 0;
  std::string detail;
};

// Asserts initial_subspace(h, X) == hI for every sample (a_Z coordinates);
// throws NotInInteriorCone if a sample is not strictly inside a_I^{--}.
ConsistencyReport degeneration_consistency(const SphericalDatum& d,
                                           const DegenerationDatum& dd,
                                           const std::vector<RatVector>& samples);

struct DegenerateSpaceReport {
  bool open_orbit = false;       // P . H_I open
  bool adapted = false;          // same Q = L U and same a_Z model
  bool cone_matches = false;     // compression cone of Z_I = {alpha<=0, alpha in I}
  bool edge_matches = false;     // edge of Z_I equals a_I
  SphericalDatum degenerate;
  bool ok() const {
    return open_orbit && adapted && cone_matches && edge_matches;
  }
};

// Re-runs the structure analysis on (g, hI, P) and compares against the
// predicted data of the boundary degeneration.
DegenerateSpaceReport verify_degenerate_space(const SphericalDatum& d,
                                              const DegenerationDatum& dd);

// Piecewise-linear majorants: beta_tilde(X) = max_{alpha in S \ I} alpha(X)
// and beta(X) = max over F ∪ (S \ I); F comes from the enveloping-algebra
// weight set when available (f_complete marks whether it was supplied).
struct BetaFunctionals {
  std::vector<LinearFunctional> tilde_terms;  // S \ I
  std::vector<LinearFunctional> full_terms;   // F ∪ (S \ I)
  bool f_complete = false;

  Rat beta_tilde(const RatVector& X) const;  // X in the ambient algebra, in a_Z
  Rat beta(const RatVector& X) const;
};

BetaFunctionals beta_functionals(const SphericalDatum& d,
                                 const std::vector<int>& I,
                                 const std::vector<LinearFunctional>& F = {},
                                 bool F_available = false);

// Diagnostic-only numerical cross-check: applies e^{t ad X} to V in scaled
// floating point and returns the largest principal-angle gap to `expected`.
double degeneration_numeric_gap(const StructuredLieAlgebra& g,
                                const RatVector& X, const RationalSubspace& V,
                                const RationalSubspace& expected, double t);

std::string degeneration_to_json(const DegenerationDatum& dd);

}  // namespace sph
