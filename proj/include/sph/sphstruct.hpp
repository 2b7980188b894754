#pragma once

#include "sph/cones.hpp"
#include "sph/lie.hpp"
#include "sph/roots.hpp"

namespace sph {

struct NoGenericElement : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AdaptedParabolicUnverified : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DecompositionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MonoidElementNotOnAH : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal parabolic p = m ⊕ a ⊕ n with the root decomposition under a.
struct ParabolicDatum {
  RationalSubspace m, a, n, p;
  std::vector<RootSpace> roots;          // of g under a
  std::vector<int> positive;             // indices into roots with space ⊆ n
};

ParabolicDatum make_parabolic(const StructuredLieAlgebra& g,
                              const RationalSubspace& m,
                              const RationalSubspace& a,
                              const RationalSubspace& n);

bool check_open_orbit(const StructuredLieAlgebra& g, const RationalSubspace& h,
                      const ParabolicDatum& P);

struct TEntry {
  LinearFunctional alpha;    // root of a with g^alpha ⊆ u
  RatVector x_minus_alpha;   // basis vector of g^{-alpha}
  RatVector t_value;         // T(X_{-alpha}) ∈ lh_perp ⊕ u
  // weight components of t_value: (beta, X_{alpha,beta}) with beta ∈ Σ_u∪{0}
  std::vector<std::pair<LinearFunctional, RatVector>> components;
};

struct SphericalDatum {
  StructuredLieAlgebra g;
  RationalSubspace h;
  ParabolicDatum P;

  RatVector generic_X;             // selected generic element of a∩(h+n)^⊥
  RationalSubspace l, u;           // adapted parabolic q = l ⊕ u
  RationalSubspace lh;             // l ∩ h
  RationalSubspace lh_perp;        // (l∩h)^{⊥_l}
  std::vector<int> u_roots;        // indices into P.roots with space ⊆ u

  RationalSubspace aH;             // a ∩ h
  RationalSubspace aZ;             // a_H^{⊥_a}, the model of a_Z

  std::vector<TEntry> T_table;

  std::vector<LinearFunctional> monoid_gens;  // functionals on aZ
  std::vector<LinearFunctional> S;            // spherical roots on aZ
  RationalCone compression_cone;              // in aZ coordinates

  LinearFunctional rhoQ;           // on aZ
  LinearFunctional rhoQ_on_a;      // the unrestricted half sum on a
  bool rhoQ_vanishes_on_aH = false;
  bool unimodular = false;
  bool exists_positive_X = false;  // X ∈ a_H^⊥ with alpha(X)>0 on Σ_u
};

// Stage 1: generic-element search (integer lattice of a∩(h+n)^{⊥_κ} in
// increasing sup-norm, cap 32) and verification of the adapted-parabolic
// conditions. skip_generic skips the first k verifying elements, for
// invariance checks.
SphericalDatum construct_adapted_parabolic(const StructuredLieAlgebra& g,
                                           const RationalSubspace& h,
                                           const ParabolicDatum& P,
                                           int skip_generic = 0);

// Stage 2: the T-map table from the triple decomposition g = h ⊕ lh_perp ⊕ u.
void t_map(SphericalDatum& d);

// Stage 3: monoid generators, spherical roots, compression cone.
void spherical_roots(SphericalDatum& d);

// Stage 4: half sum on u, unimodularity report.
void rho_q_and_unimodularity(SphericalDatum& d);

// All four stages.
SphericalDatum analyze_structure(const StructuredLieAlgebra& g,
                                 const RationalSubspace& h,
                                 const ParabolicDatum& P, int skip_generic = 0);

// Restriction of a functional on a to the aZ model; throws
// MonoidElementNotOnAH if require_vanishing and it is nonzero on aH.
LinearFunctional restrict_to_aZ(const SphericalDatum& d,
                                const LinearFunctional& on_a,
                                bool require_vanishing);

std::string spherical_datum_to_json(const SphericalDatum& d);

}  // namespace sph
