#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sph/cterm.hpp"
#include "sph/degen.hpp"
#include "sph/envalg.hpp"
#include "sph/rapidfit.hpp"

namespace sph {

// A built-in example: the algebra, the isotropy subspace, the parabolic
// seed, and frozen reference values for verification.
struct ExampleSetup {
  std::string name;
  StructuredLieAlgebra g;
  RationalSubspace h;
  ParabolicDatum P;

  std::size_t expected_S_count = 0;
  std::optional<RationalSubspace> expected_h_empty;  // h_I for I = {}
  std::optional<Rat> expected_rho_at_generic;
  bool expected_unimodular = true;
  Eigen::MatrixXd lattice_rows;  // integrality lattice in a_Z coordinates
  bool has_eigenfunction_oracle = false;
  bool has_orbit_chart = false;
};

std::vector<std::string> example_names();
ExampleSetup make_example(const std::string& name);

// Zonal eigenfunction oracle on the rank-one curved example: value and
// derivative with respect to the ray parameter, by high-order periodic
// quadrature for small t and exact-ODE continuation beyond. Absolute
// accuracy ~1e-10 on [0.25, 15].
struct OracleValue {
  double value = 0.0;
  double deriv = 0.0;
};
OracleValue spherical_function_oracle(double lambda, double t);
std::vector<double> spherical_function_samples(double lambda,
                                               const std::vector<double>& t);

// Transport system for the rank-one example along the antidominant ray,
// based at ray parameter t0 (t0 >= 0.5 keeps the inhomogeneity regular).
TransportSystem hyperbolic_transport(double lambda, double t0);

// End-to-end constant term of the oracle eigenfunction: spectral data, tail
// limits, closed-form ray polynomial, recovery cross-check and decay rate.
// The remainder exponent in this normalization is 4 (the radial equation's
// coefficient ring expands in e^{-4t}); rate.epsilon is fitted on the
// phase-separated vector remainder and must land within 10% of it.
struct SphericalCtermResult {
  ExpPolynomial fI;
  RateFit rate;
  double freq_err = 0.0;    // max | |Im mu| - lambda | over the two channels
  double re_err = 0.0;      // max | Re mu - rhoQ(X) |
  bool two_unitary = false; // exactly two neutral channels found
  bool pass = false;
};
SphericalCtermResult spherical_constant_term(double lambda, double t0 = 1.0,
                                             double t_max = 5.0,
                                             double dt = 0.05);

// Open-orbit factorization families for the rank-one split example: the
// curve exp(s X) g0 is factored against the isotropy group, producing the
// unipotent, sign and normalized torus families of the convergence claim.
struct OrbitFamilies {
  DecayFamily u;
  DecayFamily m;
  DecayFamily ab;
  Eigen::Matrix2d m_limit;
};
OrbitFamilies so11_orbit_families(const Eigen::Matrix2d& g0,
                                  const std::vector<double>& grid);

// Interior sample directions of a_I^{--} (relative interior points of the
// compression subcone), deterministic, at least `count` of them.
std::vector<RatVector> interior_samples(const SphericalDatum& d,
                                        const DegenerationDatum& dd,
                                        int count);

struct PipelineOptions {
  double tol = 1e-8;
  int degree_cap = 4;
  std::uint64_t seed = 12345;
  std::string out_dir;  // empty: no files written
};

struct RunReport {
  std::string json;  // full structured report; deterministic per config
  bool all_pass = false;
  std::vector<std::string> failures;
  std::vector<std::pair<std::string, double>> timings_ms;  // not in the JSON
};

// Executes the requested stages ("analyze", "degenerate", "fan", "cterm",
// "report"; "verify" = all) on a built-in example and returns the report.
RunReport run_example(const std::string& name,
                      const std::vector<std::string>& stages,
                      const PipelineOptions& opt);

// Same for a user-supplied JSON input:
// {"algebra": {...}, "h": [[...]], "parabolic": {"m": [...], "a": [...],
//  "n": [...]}}; only the exact-arithmetic stages are available.
RunReport run_input(const std::string& json_text,
                    const std::vector<std::string>& stages,
                    const PipelineOptions& opt);

}  // namespace sph
