#pragma once

#include <map>
#include <optional>

#include "sph/degen.hpp"

namespace sph {

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateForm : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MaxWeightNotZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exponent vector over the ordered generator list of a PBWAlgebra.
using Monomial = std::vector<int>;

struct PBWElement {
  bool truncated = false;  // some product overflowed the degree cap
  std::map<Monomial, Rat> terms;

  bool is_zero() const { return terms.empty(); }
  int degree() const;
  // Equality of normal forms; the truncation flag is bookkeeping.
  bool operator==(const PBWElement& o) const { return terms == o.terms; }
  bool operator!=(const PBWElement& o) const { return !(*this == o); }
};

PBWElement operator+(const PBWElement& a, const PBWElement& b);
PBWElement operator-(const PBWElement& a, const PBWElement& b);
PBWElement operator*(const Rat& s, const PBWElement& a);

// Bounded-degree enveloping algebra of a subalgebra of g spanned by an
// ordered generator list (the PBW basis order). Products are straightened
// into increasing-index normal form; monomials beyond the degree cap are
// dropped and flagged.
class PBWAlgebra {
 public:
  PBWAlgebra(const StructuredLieAlgebra& g, std::vector<RatVector> gens,
             int degree_cap);

  int cap() const { return cap_; }
  const StructuredLieAlgebra& lie() const { return *g_; }
  Eigen::Index num_gens() const {
    return static_cast<Eigen::Index>(gens_.size());
  }
  const RatVector& generator_vector(Eigen::Index i) const { return gens_[i]; }

  PBWElement one() const;
  PBWElement gen(Eigen::Index i) const;
  PBWElement monomial(const Monomial& m, const Rat& c = Rat(1)) const;
  // x must lie in the span of the generators.
  PBWElement from_vector(const RatVector& x) const;

  PBWElement mul(const PBWElement& a, const PBWElement& b) const;

  // All monomials of degree <= d in deterministic (graded lex) order.
  std::vector<Monomial> monomials_up_to(int d) const;

  // Right ideal U(.)·span{xs} truncated at the cap, as an exact row space
  // over the monomial coordinates; gives canonical reduction and membership.
  struct RightIdeal {
    std::vector<Monomial> index;        // column <-> monomial
    std::map<Monomial, Eigen::Index> column;
    RatMatrix rref;
    std::vector<Eigen::Index> pivots;
  };
  RightIdeal right_ideal(const std::vector<RatVector>& xs) const;
  PBWElement reduce(const PBWElement& u, const RightIdeal& ideal) const;
  bool in_ideal(const PBWElement& u, const RightIdeal& ideal) const;

  // a_Z-weight per generator (each generator must be an ad-weight vector);
  // enables the weight decomposition used by mu_I. Generators without a
  // well-defined weight (isotropy directions, filtered out before any weight
  // computation) may carry std::nullopt.
  void set_weights(std::vector<std::optional<RatRowVector>> weights);
  RatRowVector monomial_weight(const Monomial& m) const;

 private:
  struct Ctx {
    bool truncated = false;
  };
  void mono_times_gen(const Monomial& m, Eigen::Index j, const Rat& c,
                      std::map<Monomial, Rat>& out, Ctx& ctx) const;
  void terms_times_gen(const std::map<Monomial, Rat>& in, Eigen::Index j,
                       std::map<Monomial, Rat>& out, Ctx& ctx) const;

  const StructuredLieAlgebra* g_;
  std::vector<RatVector> gens_;
  int cap_;
  std::vector<std::vector<RatVector>> br_;  // [g_i, g_j] in generator coords
  std::vector<std::optional<RatRowVector>> weights_;
};

// Drops every monomial with a positive exponent on one of the listed
// generator indices. When those generators are trailing in the PBW order and
// span an isotropy subalgebra, this is the canonical reduction modulo the
// right ideal they generate.
PBWElement filter_out(const PBWElement& e, const std::vector<int>& gens);

// Re-expresses an element in another PBW order over the same Lie algebra
// (each generator of `from` must lie in the span of `to`'s generators).
PBWElement convert(const PBWAlgebra& from, const PBWElement& e,
                   const PBWAlgebra& to);

// Weight of v under the a_Z model torus (throws if v is not a joint weight
// vector of ad(a_Z)).
RatRowVector aZ_weight(const SphericalDatum& d, const RatVector& v);

// Casimir element Σ x_i x^i over κ-dual bases; verified central up to the
// cap. A must be the full enveloping algebra of g.
PBWElement casimir(const PBWAlgebra& A);

// Unnormalized Harish-Chandra projection: normal form of z with the
// nilradical block ordered last, then monomials touching `drop` (nilradical)
// indices removed. Throws if the remainder touches `forbid` (opposite
// nilradical) indices, which would mean z was not in U(a)Z(m) ⊕ U(g)n.
PBWElement hc_gamma0(const PBWAlgebra& A, const PBWElement& z,
                     const std::vector<int>& drop,
                     const std::vector<int>& forbid);

// True iff X·u ∈ U(g)·hI for every basis vector X of hI.
bool membership_U_I(const PBWAlgebra& A, const PBWElement& u,
                    const RationalSubspace& hI);

// Degeneration morphism: the 0-weight component of uS along a_I^{--}.
// Verifies the maximal weight is 0 (MaxWeightNotZero otherwise), that all
// weights of uS are <= 0 on the compression cone, that the discarded
// components have strictly negative weight on a_I^{--}, and that the result
// satisfies membership_U_I for hI.
PBWElement mu_I(const PBWAlgebra& A, const PBWElement& uS,
                const SphericalDatum& d, const DegenerationDatum& dd);

struct CentralityReport {
  bool ok = true;
  int checked = 0;
  std::string detail;
};

// Verifies [X, u] ∈ U(b)·bH for X in aS_basis and all monomials u up to
// cap - 1 (S(a_S) centralizes U_S(b) modulo the isotropy ideal).
CentralityReport aS_centrality_check(const PBWAlgebra& A_b,
                                     const std::vector<RatVector>& aS_basis,
                                     const std::vector<RatVector>& bH_basis);

std::string pbw_to_json(const PBWElement& e);

}  // namespace sph
