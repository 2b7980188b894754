#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sph {

using Cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;

struct ClusterAmbiguity : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GapViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TailBoundUnreachable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DirectionDependence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonUnitaryCharacter : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct OrderOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoDecay : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// First-order linear transport system along a model torus: a commuting
// family X -> Gamma(X) of matrices on the dual functional space, an
// inhomogeneity Psi evaluated along rays with a declared exponential decay
// envelope, the reference growth functional rhoQ, and the sampling cone.
struct TransportSystem {
  Eigen::Index dim_a = 0;  // dimension of the torus direction space
  Eigen::Index dim_U = 0;  // size of the matrices
  std::vector<CMatrix> gamma_basis;  // Gamma on the standard basis of R^dim_a

  // Psi(X, s) = inhomogeneity at the point (base point)*exp(sX); may be
  // empty for homogeneous systems. The declared envelope promises
  // |Psi(X, s)| <= psi_scale * exp((psi_envelope . X) * s).
  std::function<CVector(const Eigen::VectorXd&, double)> psi;
  double psi_scale = 0.0;
  Eigen::RowVectorXd psi_envelope;

  Eigen::RowVectorXd rhoQ;  // reference functional on the direction space
  Eigen::RowVectorXd beta;  // decay-margin functional (optional, may be empty)
  std::vector<Eigen::VectorXd> cone_rays;  // generators of the sampling cone
  CVector pairing;  // vector representing the evaluation functional <., 1>

  CMatrix gamma(const Eigen::VectorXd& X) const;
  bool has_psi() const { return static_cast<bool>(psi); }
  // Checks shapes, pairwise commutation of the basis matrices (relative
  // 1e-10) and finiteness; throws std::invalid_argument.
  void validate() const;
};

enum class ExponentClass { Qplus, Qzero, Qminus };

struct JointExponent {
  CRowVector lambda;   // functional on the direction space
  ExponentClass cls = ExponentClass::Qzero;
  CMatrix projector;   // joint spectral projector
};

struct SpectralDatum {
  std::vector<JointExponent> exponents;
  double delta = 0.5;  // decay margin actually certified, in (0, 1/2]
  double tol = 1e-8;
};

// Joint generalized eigenvalue decomposition of the commuting family:
// clusters the spectrum of each basis matrix (agglomerative, relative tol),
// builds single-matrix spectral projectors by Hermite interpolation, forms
// joint projectors as products, and classifies each exponent against rhoQ
// over the cone rays and interior sample points. Throws ClusterAmbiguity
// when two exponents within the clustering tolerance land in different
// classes, and std::runtime_error when the projector identities
// (resolution of identity, orthogonality, commutation) fail beyond 1e-9.
SpectralDatum joint_spectrum(const TransportSystem& system, double tol = 1e-8);

// Spectral projector of A onto the eigenvalues whose real parts form the
// k-th group (groups sorted by increasing real part, gap >= nu required).
struct ProjectorBound {
  double norm = 0.0;
  double bound = 0.0;
  bool pass = false;
};
ProjectorBound projector_bound_check(const CMatrix& A, int k, double nu = 1.0);

// Variation-of-constants evaluation
//   Phi(t) = exp(t Gamma(X)) Phi0 + int_0^t exp((t-s) Gamma(X)) Psi(X, s) ds
// by adaptive Simpson quadrature with Richardson correction.
CVector solve_transport(const TransportSystem& system, const CVector& phi0,
                        const Eigen::VectorXd& X, double t,
                        double quad_tol = 1e-10);

// Truncated-tail limit for one exponent channel:
//   E_lambda Phi0 + int_0^infty E_lambda exp(-s Gamma(X)) Psi(X, s) ds,
// with the truncation point chosen from the declared Psi envelope so the
// analytic tail bound is below tail_tol. Throws TailBoundUnreachable when
// the envelope does not dominate the channel exponent.
CVector phi_lambda_infty(const TransportSystem& system,
                         const SpectralDatum& spectral, std::size_t lam,
                         const CVector& phi0, const Eigen::VectorXd& X,
                         double tail_tol = 1e-10);

// Recomputes phi_lambda_infty with a second interior direction and throws
// DirectionDependence if the results differ by more than dir_tol.
CVector phi_lambda_infty_checked(const TransportSystem& system,
                                 const SpectralDatum& spectral,
                                 std::size_t lam, const CVector& phi0,
                                 const Eigen::VectorXd& X1,
                                 const Eigen::VectorXd& X2,
                                 double dir_tol = 1e-6);

// Exponential polynomial t -> sum_j p_j(t) exp(mu_j t); canonical ordering
// by (Re mu, Im mu), exponents pairwise distinct.
struct ExpPolynomial {
  struct Term {
    Cplx exponent;
    std::vector<Cplx> coeffs;  // p(t) = coeffs[0] + coeffs[1] t + ...
  };
  std::vector<Term> terms;

  Cplx evaluate(double t) const;
  // Merge duplicate exponents, drop negligible terms, sort canonically.
  void canonicalize(double tol = 1e-12);
  int order() const;  // total number of (exponent, power) channels
};

// Constant-term value at the base point: the evaluation pairing summed over
// the neutral-growth (Qzero) channels of the tail limits.
Cplx constant_term(const TransportSystem& system, const SpectralDatum& spectral,
                   const CVector& phi0, const Eigen::VectorXd& X);

// Closed-form exponential polynomial of the constant term along the ray X,
// assembled from the Jordan data of Gamma(X) on each Qzero channel.
// Verifies |Re lambda(X) - rhoQ(X)| <= 1e-8 (1 + |rhoQ(X)|) per channel and
// throws NonUnitaryCharacter otherwise.
ExpPolynomial constant_term_ray(const TransportSystem& system,
                                const SpectralDatum& spectral,
                                const CVector& phi0, const Eigen::VectorXd& X);

// Exponential-polynomial recovery from samples on a uniform grid by the
// matrix-pencil method: model order selected by singular-value threshold
// 1e-8, repeated pencil roots promoted to polynomial factors, coefficients
// by least squares. Throws OrderOverflow when the detected order exceeds
// model_order_max and IllConditioned when the residual stays above 1e-6
// relative.
ExpPolynomial expfit(const std::vector<double>& t, const std::vector<Cplx>& y,
                     int model_order_max);

// Log-linear fit of |exp(-t rhoQX) (f - fI)| on the tail half of the grid.
// infinite is set when the difference is at working precision (exact match);
// otherwise epsilon > 0 with r_squared >= 0.99 is required and NoDecay is
// thrown when the slope is nonnegative.
struct RateFit {
  double epsilon = 0.0;
  double C = 0.0;
  double r_squared = 0.0;
  bool infinite = false;
};
RateFit approximation_rate(const std::vector<double>& t,
                           const std::vector<Cplx>& f, const ExpPolynomial& fI,
                           double rhoQX);

// Exponential sum with functional exponents on the full direction space;
// the symbolic model used for staging constant terms across nested index
// sets.
struct FunctionalExpSum {
  struct Term {
    CRowVector mu;
    Cplx coeff;
  };
  std::vector<Term> terms;
  Cplx evaluate(const Eigen::VectorXd& X) const;  // at exp(X)
};

// Keeps exactly the terms whose real part matches rhoQ on every ray of the
// given cone (the neutral-growth channels for that face).
FunctionalExpSum functional_constant_term(const FunctionalExpSum& f,
                                          const Eigen::RowVectorXd& rhoQ,
                                          const std::vector<Eigen::VectorXd>& rays,
                                          double tol = 1e-10);

// Checks the tower property: taking the constant term through the
// intermediate cone (J) and then the final cone (I) agrees with going to I
// directly, evaluated on the provided sample points.
struct TransitivityReport {
  double max_diff = 0.0;
  bool pass = false;
};
TransitivityReport transitivity_check(const FunctionalExpSum& f,
                                      const Eigen::RowVectorXd& rhoQ,
                                      const std::vector<Eigen::VectorXd>& rays_I,
                                      const std::vector<Eigen::VectorXd>& rays_J,
                                      const std::vector<Eigen::VectorXd>& samples,
                                      double tol = 1e-8);

// True iff every constant term has sup-norm <= tol * scale on the grid.
bool discrete_series_test(const std::vector<ExpPolynomial>& constant_terms,
                          const std::vector<double>& grid, double scale,
                          double tol = 1e-6);

// Distance of Re(lambda) - rhoQ to the lattice spanned by the given basis
// rows, for every exponent.
struct IntegralityReport {
  bool pass = false;
  double max_dist = 0.0;
};
IntegralityReport integrality_check(const SpectralDatum& spectral,
                                    const Eigen::MatrixXd& lattice_rows,
                                    const Eigen::RowVectorXd& rhoQ,
                                    double tol = 1e-6);

std::string spectral_to_json(const SpectralDatum& s);
std::string exppoly_to_json(const ExpPolynomial& p);

}  // namespace sph
