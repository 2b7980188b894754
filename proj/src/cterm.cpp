#include "sph/cterm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace sph {

namespace {

constexpr double kPi = 3.14159265358979323846;

double op_norm(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

// ---- eigenvalue clustering ------------------------------------------------

struct Cluster {
  Cplx center;
  int mult = 0;
};

// Single-linkage clustering of complex values with an absolute threshold.
std::vector<Cluster> cluster_values(const std::vector<Cplx>& vals,
                                    double thr) {
  const int n = static_cast<int>(vals.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(vals[i] - vals[j]) <= thr) parent[find(i)] = find(j);
  std::map<int, Cluster> acc;
  for (int i = 0; i < n; ++i) {
    Cluster& c = acc[find(i)];
    c.center += vals[i];
    c.mult += 1;
  }
  std::vector<Cluster> out;
  for (auto& [root, c] : acc) {
    c.center /= static_cast<double>(c.mult);
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (a.center.real() != b.center.real())
      return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
  });
  return out;
}

// ---- Hermite-interpolation spectral projectors ----------------------------

// Polynomial (degree < n) equal to 1 + O((z - c_k)^{m_k}) at cluster k and
// O((z - c_j)^{m_j}) at every other cluster, evaluated at A. Computed in a
// shifted/scaled variable for conditioning.
CMatrix hermite_projector(const CMatrix& A, const std::vector<Cluster>& cl,
                          std::size_t k) {
  const int n =
      std::accumulate(cl.begin(), cl.end(), 0,
                      [](int s, const Cluster& c) { return s + c.mult; });
  Cplx mu(0, 0);
  for (const auto& c : cl) mu += c.center * static_cast<double>(c.mult);
  mu /= static_cast<double>(n);
  double sigma = 1e-300;
  for (const auto& c : cl) sigma = std::max(sigma, std::abs(c.center - mu));
  if (sigma < 1e-12) sigma = 1.0;

  CMatrix V = CMatrix::Zero(n, n);
  CVector rhs = CVector::Zero(n);
  int row = 0;
  for (std::size_t j = 0; j < cl.size(); ++j) {
    const Cplx w = (cl[j].center - mu) / sigma;
    for (int r = 0; r < cl[j].mult; ++r, ++row) {
      for (int i = r; i < n; ++i) {
        double fall = 1.0;
        for (int q = 0; q < r; ++q) fall *= static_cast<double>(i - q);
        V(row, i) = fall * std::pow(w, i - r);
      }
      if (r == 0 && j == k) rhs(row) = Cplx(1, 0);
    }
  }
  const CVector a = V.fullPivLu().solve(rhs);

  const CMatrix W =
      (A - mu * CMatrix::Identity(A.rows(), A.cols())) / sigma;
  CMatrix P = CMatrix::Zero(A.rows(), A.cols());
  for (int i = n - 1; i >= 0; --i)
    P = W * P + a(i) * CMatrix::Identity(A.rows(), A.cols());
  return P;
}

std::vector<Cluster> matrix_clusters(const CMatrix& A, double tol) {
  Eigen::ComplexEigenSolver<CMatrix> es(A, /*computeEigenvectors=*/false);
  std::vector<Cplx> vals(es.eigenvalues().data(),
                         es.eigenvalues().data() + A.rows());
  double scale = 1.0;
  for (const Cplx& v : vals) scale = std::max(scale, std::abs(v));
  return cluster_values(vals, tol * scale);
}

// ---- adaptive Simpson quadrature ------------------------------------------

using VecFn = std::function<CVector(double)>;

CVector simpson_rec(const VecFn& f, double a, double b, const CVector& fa,
                    const CVector& fm, const CVector& fb, const CVector& whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const CVector flm = f(lm), frm = f(rm);
  const double h = b - a;
  const CVector left = (h / 12.0) * (fa + 4.0 * flm + fm);
  const CVector right = (h / 12.0) * (fm + 4.0 * frm + fb);
  const CVector sum = left + right;
  const CVector err = (sum - whole) / 15.0;
  if (err.norm() <= tol || h < 1e-14) return sum + err;  // Richardson step
  if (depth > 40) throw QuadratureFailure("adaptive Simpson depth exceeded");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

CVector adaptive_simpson(const VecFn& f, double a, double b, double tol) {
  if (b <= a) return f(a) * 0.0;
  const CVector fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const CVector whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0);
}

Cplx pair_with_one(const TransportSystem& sys, const CVector& v) {
  return (sys.pairing.transpose() * v)(0);
}

Cplx lambda_at(const CRowVector& lambda, const Eigen::VectorXd& X) {
  Cplx s(0, 0);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) s += lambda(i) * X(i);
  return s;
}

}  // namespace

// ---- TransportSystem -------------------------------------------------------

CMatrix TransportSystem::gamma(const Eigen::VectorXd& X) const {
  CMatrix g = CMatrix::Zero(dim_U, dim_U);
  for (Eigen::Index i = 0; i < dim_a; ++i) g += X(i) * gamma_basis[i];
  return g;
}

void TransportSystem::validate() const {
  if (static_cast<Eigen::Index>(gamma_basis.size()) != dim_a)
    throw std::invalid_argument("gamma basis size mismatch");
  for (const CMatrix& g : gamma_basis) {
    if (g.rows() != dim_U || g.cols() != dim_U)
      throw std::invalid_argument("gamma matrix shape mismatch");
    if (!g.allFinite()) throw std::invalid_argument("gamma not finite");
  }
  for (std::size_t i = 0; i < gamma_basis.size(); ++i)
    for (std::size_t j = i + 1; j < gamma_basis.size(); ++j) {
      const CMatrix& a = gamma_basis[i];
      const CMatrix& b = gamma_basis[j];
      const double comm = (a * b - b * a).norm();
      if (comm > 1e-10 * std::max(1e-300, a.norm() * b.norm()))
        throw std::invalid_argument("transport family does not commute");
    }
  if (rhoQ.size() != dim_a)
    throw std::invalid_argument("rhoQ dimension mismatch");
  if (has_psi() && psi_envelope.size() != dim_a)
    throw std::invalid_argument("psi envelope dimension mismatch");
  if (pairing.size() != dim_U)
    throw std::invalid_argument("pairing dimension mismatch");
  if (cone_rays.empty())
    throw std::invalid_argument("sampling cone has no rays");
  for (const auto& r : cone_rays)
    if (r.size() != dim_a)
      throw std::invalid_argument("cone ray dimension mismatch");
}

// ---- joint spectrum --------------------------------------------------------

SpectralDatum joint_spectrum(const TransportSystem& system, double tol) {
  system.validate();
  const Eigen::Index n = system.dim_U;
  const CMatrix id = CMatrix::Identity(n, n);

  // Per-basis-direction clusters and single-matrix projectors.
  std::vector<std::vector<Cluster>> clusters(system.dim_a);
  std::vector<std::vector<CMatrix>> projs(system.dim_a);
  for (Eigen::Index i = 0; i < system.dim_a; ++i) {
    clusters[i] = matrix_clusters(system.gamma_basis[i], tol);
    for (std::size_t c = 0; c < clusters[i].size(); ++c)
      projs[i].push_back(hermite_projector(system.gamma_basis[i], clusters[i],
                                           c));
  }

  // Joint projectors: products over one cluster choice per direction.
  std::vector<JointExponent> exps;
  std::vector<std::size_t> choice(system.dim_a, 0);
  std::function<void(Eigen::Index, const CMatrix&)> walk =
      [&](Eigen::Index i, const CMatrix& acc) {
        if (acc.norm() < 0.5) return;  // empty joint eigenspace
        if (i == system.dim_a) {
          if (std::abs(acc.trace()) < 0.5) return;
          JointExponent e;
          e.lambda = CRowVector(system.dim_a);
          for (Eigen::Index j = 0; j < system.dim_a; ++j)
            e.lambda(j) = clusters[j][choice[j]].center;
          e.projector = acc;
          exps.push_back(std::move(e));
          return;
        }
        for (std::size_t c = 0; c < clusters[i].size(); ++c) {
          choice[i] = c;
          walk(i + 1, acc * projs[i][c]);
        }
      };
  walk(0, id);

  // Projector identities.
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& e : exps) sum += e.projector;
  if ((sum - id).norm() > 1e-9 * n)
    throw std::runtime_error("spectral projectors do not resolve identity");
  for (std::size_t a = 0; a < exps.size(); ++a) {
    for (std::size_t b = 0; b < exps.size(); ++b) {
      const CMatrix prod = exps[a].projector * exps[b].projector;
      const CMatrix target = (a == b) ? exps[a].projector : CMatrix::Zero(n, n);
      if ((prod - target).norm() > 1e-9 * n)
        throw std::runtime_error("spectral projectors not idempotent/orthogonal");
    }
    for (const CMatrix& g : system.gamma_basis)
      if ((exps[a].projector * g - g * exps[a].projector).norm() >
          1e-9 * std::max(1.0, g.norm()))
        throw std::runtime_error("spectral projector does not commute");
  }

  // Classification samples: cone rays, pairwise sums, and the barycenter.
  std::vector<Eigen::VectorXd> samples = system.cone_rays;
  for (std::size_t i = 0; i < system.cone_rays.size(); ++i)
    for (std::size_t j = i + 1; j < system.cone_rays.size(); ++j)
      samples.push_back(system.cone_rays[i] + system.cone_rays[j]);
  Eigen::VectorXd bary = Eigen::VectorXd::Zero(system.dim_a);
  for (const auto& r : system.cone_rays) bary += r;
  samples.push_back(bary);

  for (auto& e : exps) {
    bool some_above = false, all_equal = true;
    for (const auto& X : samples) {
      const double re = lambda_at(e.lambda, X).real();
      const double rho = system.rhoQ.dot(X);
      const double thr = tol * (1.0 + std::abs(rho));
      if (re > rho + thr) some_above = true;
      if (std::abs(re - rho) > thr) all_equal = false;
    }
    e.cls = some_above ? ExponentClass::Qplus
                       : (all_equal ? ExponentClass::Qzero
                                    : ExponentClass::Qminus);
  }

  // Refuse when near-identical exponents land in different classes.
  double lscale = 1.0;
  for (const auto& e : exps) lscale = std::max(lscale, e.lambda.norm());
  for (std::size_t a = 0; a < exps.size(); ++a)
    for (std::size_t b = a + 1; b < exps.size(); ++b)
      if ((exps[a].lambda - exps[b].lambda).norm() <= tol * lscale &&
          exps[a].cls != exps[b].cls)
        throw ClusterAmbiguity(
            "exponents within clustering tolerance classified differently");

  SpectralDatum out;
  out.exponents = std::move(exps);
  out.tol = tol;

  // Largest dyadic decay margin <= 1/2 certified on the cone rays.
  out.delta = 0.5;
  if (system.beta.size() == system.dim_a) {
    double delta = 0.5;
    bool found = false;
    while (delta > 1e-6) {
      bool ok = true;
      for (const auto& e : out.exponents) {
        if (e.cls != ExponentClass::Qminus) continue;
        for (const auto& X : system.cone_rays) {
          const double re = lambda_at(e.lambda, X).real();
          const double lim =
              system.rhoQ.dot(X) + delta * system.beta.dot(X);
          if (re > lim + tol * (1.0 + std::abs(lim))) ok = false;
        }
      }
      if (ok) {
        found = true;
        break;
      }
      delta *= 0.5;
    }
    out.delta = found ? delta : 0.0;
  }
  return out;
}

// ---- projector norm bound --------------------------------------------------

ProjectorBound projector_bound_check(const CMatrix& A, int k, double nu) {
  const int n = static_cast<int>(A.rows());
  Eigen::ComplexEigenSolver<CMatrix> es(A, false);
  std::vector<Cplx> vals(es.eigenvalues().data(),
                         es.eigenvalues().data() + n);

  // Group by real part (gap hypothesis: distinct groups separated by >= nu).
  std::vector<double> reals;
  for (const Cplx& v : vals) reals.push_back(v.real());
  std::sort(reals.begin(), reals.end());
  std::vector<double> groups{reals.front()};
  for (double r : reals) {
    if (r - groups.back() > 0.1 * nu)
      groups.push_back(r);
    else
      groups.back() = std::max(groups.back(), r);
  }
  for (std::size_t i = 1; i < groups.size(); ++i)
    if (groups[i] - groups[i - 1] < nu - 1e-9)
      throw GapViolated("real-part groups closer than the required gap");
  if (k < 0 || k >= static_cast<int>(groups.size()))
    throw std::invalid_argument("group index out of range");

  // Clusters in 2D; the target set is every cluster in real-part group k.
  double scale = 1.0;
  for (const Cplx& v : vals) scale = std::max(scale, std::abs(v));
  std::vector<Cluster> cl = cluster_values(vals, 1e-8 * scale);
  CMatrix P = CMatrix::Zero(n, n);
  // Membership: nearest group center.
  for (std::size_t c = 0; c < cl.size(); ++c) {
    int best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double d = std::abs(cl[c].center.real() - groups[g]);
      if (d < bestd) {
        bestd = d;
        best = static_cast<int>(g);
      }
    }
    if (best == k) P += hermite_projector(A, cl, c);
  }

  ProjectorBound out;
  out.norm = op_norm(P);
  const double C =
      (4.0 / kPi) * std::pow(3.0, n - 1) * std::pow(2.0, n);
  out.bound = C * std::pow(1.0 + op_norm(A), n);
  out.pass = out.norm <= out.bound;
  return out;
}

// ---- transport solving -----------------------------------------------------

CVector solve_transport(const TransportSystem& system, const CVector& phi0,
                        const Eigen::VectorXd& X, double t, double quad_tol) {
  const CMatrix G = system.gamma(X);
  CVector result = (t * G).exp() * phi0;
  if (system.has_psi() && t > 0) {
    VecFn f = [&](double s) -> CVector {
      return ((t - s) * G).exp() * system.psi(X, s);
    };
    result += adaptive_simpson(f, 0.0, t, quad_tol);
  }
  return result;
}

CVector phi_lambda_infty(const TransportSystem& system,
                         const SpectralDatum& spectral, std::size_t lam,
                         const CVector& phi0, const Eigen::VectorXd& X,
                         double tail_tol) {
  const JointExponent& e = spectral.exponents.at(lam);
  CVector out = e.projector * phi0;
  if (!system.has_psi()) return out;

  const CMatrix G = system.gamma(X);
  const double re_lam = lambda_at(e.lambda, X).real();
  const double env = system.psi_envelope.dot(X);
  const double rate = env - re_lam;  // decay rate of the integrand
  if (rate >= -1e-9)
    throw TailBoundUnreachable(
        "inhomogeneity envelope does not dominate the channel exponent");

  // Truncation point with an analytic tail bound below tail_tol; the
  // polynomial factor from nilpotent parts is majorized by (1+T)^dim_U.
  const double margin = 2.0 * std::max(1.0, op_norm(e.projector)) *
                        std::max(system.psi_scale, 1e-300);
  double T = 10.0;
  while (margin * std::pow(1.0 + T, static_cast<double>(system.dim_U)) *
             std::exp(rate * T) / (-rate) >
         tail_tol) {
    T *= 2.0;
    if (T > 1e4)
      throw TailBoundUnreachable("tail bound not reachable at finite range");
  }

  VecFn f = [&](double s) -> CVector {
    return e.projector * ((-s * G).exp() * system.psi(X, s));
  };
  out += adaptive_simpson(f, 0.0, T, tail_tol);
  return out;
}

CVector phi_lambda_infty_checked(const TransportSystem& system,
                                 const SpectralDatum& spectral,
                                 std::size_t lam, const CVector& phi0,
                                 const Eigen::VectorXd& X1,
                                 const Eigen::VectorXd& X2, double dir_tol) {
  const CVector a = phi_lambda_infty(system, spectral, lam, phi0, X1);
  const CVector b = phi_lambda_infty(system, spectral, lam, phi0, X2);
  if ((a - b).norm() > dir_tol * (1.0 + a.norm()))
    throw DirectionDependence("tail limit depends on the interior direction");
  return a;
}

// ---- exponential polynomials ----------------------------------------------

Cplx ExpPolynomial::evaluate(double t) const {
  Cplx s(0, 0);
  for (const Term& term : terms) {
    Cplx p(0, 0);
    double tp = 1.0;
    for (const Cplx& c : term.coeffs) {
      p += c * tp;
      tp *= t;
    }
    s += p * std::exp(term.exponent * t);
  }
  return s;
}

void ExpPolynomial::canonicalize(double tol) {
  // Merge near-identical exponents.
  std::vector<Term> merged;
  for (const Term& t : terms) {
    bool found = false;
    for (Term& m : merged) {
      if (std::abs(m.exponent - t.exponent) <=
          1e-9 * (1.0 + std::abs(m.exponent))) {
        if (m.coeffs.size() < t.coeffs.size()) m.coeffs.resize(t.coeffs.size());
        for (std::size_t i = 0; i < t.coeffs.size(); ++i)
          m.coeffs[i] += t.coeffs[i];
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(t);
  }
  double scale = 0.0;
  for (const Term& t : merged)
    for (const Cplx& c : t.coeffs) scale = std::max(scale, std::abs(c));
  std::vector<Term> kept;
  for (Term& t : merged) {
    while (!t.coeffs.empty() &&
           std::abs(t.coeffs.back()) <= tol * std::max(scale, 1.0))
      t.coeffs.pop_back();
    if (!t.coeffs.empty()) kept.push_back(std::move(t));
  }
  std::sort(kept.begin(), kept.end(), [](const Term& a, const Term& b) {
    if (a.exponent.real() != b.exponent.real())
      return a.exponent.real() < b.exponent.real();
    return a.exponent.imag() < b.exponent.imag();
  });
  terms = std::move(kept);
}

int ExpPolynomial::order() const {
  int n = 0;
  for (const Term& t : terms) n += static_cast<int>(t.coeffs.size());
  return n;
}

// ---- constant term ---------------------------------------------------------

Cplx constant_term(const TransportSystem& system, const SpectralDatum& spectral,
                   const CVector& phi0, const Eigen::VectorXd& X) {
  Cplx f(0, 0);
  for (std::size_t i = 0; i < spectral.exponents.size(); ++i) {
    if (spectral.exponents[i].cls != ExponentClass::Qzero) continue;
    f += pair_with_one(system, phi_lambda_infty(system, spectral, i, phi0, X));
  }
  return f;
}

ExpPolynomial constant_term_ray(const TransportSystem& system,
                                const SpectralDatum& spectral,
                                const CVector& phi0,
                                const Eigen::VectorXd& X) {
  ExpPolynomial out;
  const CMatrix G = system.gamma(X);
  const double rhoX = system.rhoQ.dot(X);
  for (std::size_t i = 0; i < spectral.exponents.size(); ++i) {
    const JointExponent& e = spectral.exponents[i];
    if (e.cls != ExponentClass::Qzero) continue;
    const Cplx lamX = lambda_at(e.lambda, X);
    if (std::abs(lamX.real() - rhoX) > 1e-8 * (1.0 + std::abs(rhoX)))
      throw NonUnitaryCharacter(
          "neutral channel exponent off the reference line");
    CVector v = phi_lambda_infty(system, spectral, i, phi0, X);
    // On the channel, Gamma(X) = lamX + N with N nilpotent:
    // <E exp(tG) v, 1> = exp(lamX t) sum_k t^k/k! <N^k E v, 1>.
    const CMatrix N = G - lamX * CMatrix::Identity(G.rows(), G.cols());
    CVector w = e.projector * v;
    const double wscale = std::max(1.0, w.norm());
    ExpPolynomial::Term term;
    term.exponent = lamX;
    double fact = 1.0;
    for (Eigen::Index k = 0; k < system.dim_U; ++k) {
      if (w.norm() <= 1e-13 * wscale) break;
      term.coeffs.push_back(pair_with_one(system, w) / fact);
      w = e.projector * (N * w);
      fact *= static_cast<double>(k + 1);
    }
    if (!term.coeffs.empty()) out.terms.push_back(std::move(term));
  }
  out.canonicalize();
  return out;
}

// ---- exponential-polynomial recovery (matrix pencil) ----------------------

ExpPolynomial expfit(const std::vector<double>& t, const std::vector<Cplx>& y,
                     int model_order_max) {
  if (t.size() != y.size() || t.size() < 4)
    throw std::invalid_argument("expfit needs matching grids, >= 4 samples");
  const int M = static_cast<int>(t.size());
  const double h = t[1] - t[0];
  for (int j = 1; j < M; ++j)
    if (std::abs((t[j] - t[j - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw std::invalid_argument("expfit requires a uniform grid");

  double ymax = 0.0;
  for (const Cplx& v : y) ymax = std::max(ymax, std::abs(v));
  ExpPolynomial out;
  if (ymax <= 1e-10) return out;  // below threshold: zero model

  const int L = M / 2;
  CMatrix H0(M - L, L), H1(M - L, L);
  for (int i = 0; i < M - L; ++i)
    for (int j = 0; j < L; ++j) {
      H0(i, j) = y[i + j];
      H1(i, j) = y[i + j + 1];
    }
  Eigen::JacobiSVD<CMatrix> svd(H0,
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > 1e-8 * sv(0)) ++r;
  if (r > model_order_max)
    throw OrderOverflow("detected model order exceeds the allowed maximum");
  if (r == 0) return out;

  const CMatrix Ur = svd.matrixU().leftCols(r);
  const CMatrix Vr = svd.matrixV().leftCols(r);
  const CVector sinv = sv.head(r).cast<Cplx>().cwiseInverse();
  const CMatrix Ar = Ur.adjoint() * H1 * Vr * sinv.asDiagonal();
  Eigen::ComplexEigenSolver<CMatrix> es(Ar, false);

  std::vector<Cplx> zs(es.eigenvalues().data(), es.eigenvalues().data() + r);
  for (const Cplx& z : zs)
    if (std::abs(z) < 1e-12)
      throw IllConditioned("pencil root at the origin");
  double zscale = 0.0;
  for (const Cplx& z : zs) zscale = std::max(zscale, std::abs(z));
  const std::vector<Cluster> zc = cluster_values(zs, 1e-6 * zscale);

  // Least squares for the polynomial coefficients in the t coordinates.
  struct Channel {
    Cplx mu;
    int power;
  };
  std::vector<Channel> chans;
  for (const Cluster& c : zc) {
    const Cplx mu = std::log(c.center) / h;
    for (int p = 0; p < c.mult; ++p) chans.push_back({mu, p});
  }
  CMatrix D(M, static_cast<int>(chans.size()));
  Eigen::VectorXd colscale(chans.size());
  for (std::size_t c = 0; c < chans.size(); ++c) {
    for (int j = 0; j < M; ++j)
      D(j, static_cast<int>(c)) =
          std::pow(t[j], chans[c].power) * std::exp(chans[c].mu * t[j]);
    colscale(c) = D.col(static_cast<int>(c)).norm();
    if (colscale(c) < 1e-300) colscale(c) = 1.0;
    D.col(static_cast<int>(c)) /= colscale(c);
  }
  CVector rhs(M);
  for (int j = 0; j < M; ++j) rhs(j) = y[j];
  const CVector coef = D.colPivHouseholderQr().solve(rhs);
  const double resid = (D * coef - rhs).norm() / rhs.norm();
  if (resid > 1e-6)
    throw IllConditioned("exponential fit residual above tolerance");

  std::size_t idx = 0;
  for (const Cluster& c : zc) {
    ExpPolynomial::Term term;
    term.exponent = std::log(c.center) / h;
    term.coeffs.resize(c.mult);
    for (int p = 0; p < c.mult; ++p, ++idx)
      term.coeffs[p] = coef(static_cast<Eigen::Index>(idx)) / colscale(idx);
    out.terms.push_back(std::move(term));
  }
  out.canonicalize();
  return out;
}

// ---- decay-rate fitting ----------------------------------------------------

RateFit approximation_rate(const std::vector<double>& t,
                           const std::vector<Cplx>& f, const ExpPolynomial& fI,
                           double rhoQX) {
  if (t.size() != f.size() || t.size() < 8)
    throw std::invalid_argument("approximation_rate needs >= 8 samples");
  std::vector<double> d(t.size());
  double scale = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double w = std::exp(-rhoQX * t[j]);
    d[j] = std::abs(f[j] - fI.evaluate(t[j])) * w;
    scale = std::max(scale, std::abs(f[j]) * w);
  }
  RateFit out;
  double dmax = 0.0;
  for (double v : d) dmax = std::max(dmax, v);
  if (dmax <= 1e-12 * std::max(scale, 1.0)) {
    out.infinite = true;
    out.epsilon = std::numeric_limits<double>::infinity();
    out.r_squared = 1.0;
    return out;
  }
  // Log-linear regression on the tail half.
  const std::size_t start = t.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(t.size() - start);
  for (std::size_t j = start; j < t.size(); ++j) {
    const double x = t[j];
    const double yv = std::log(std::max(d[j], 1e-300));
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
    syy += yv * yv;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  const double ssr = syy - intercept * sy - slope * sxy;
  const double sst = syy - sy * sy / n;
  out.epsilon = -slope;
  out.C = std::exp(intercept);
  out.r_squared = sst > 0 ? 1.0 - ssr / sst : 1.0;
  if (out.epsilon <= 0) throw NoDecay("no exponential decay detected");
  return out;
}

// ---- functional staging and transitivity ----------------------------------

Cplx FunctionalExpSum::evaluate(const Eigen::VectorXd& X) const {
  Cplx s(0, 0);
  for (const Term& t : terms) s += t.coeff * std::exp(lambda_at(t.mu, X));
  return s;
}

FunctionalExpSum functional_constant_term(
    const FunctionalExpSum& f, const Eigen::RowVectorXd& rhoQ,
    const std::vector<Eigen::VectorXd>& rays, double tol) {
  FunctionalExpSum out;
  for (const auto& term : f.terms) {
    bool neutral = true;
    for (const auto& X : rays) {
      const double re = lambda_at(term.mu, X).real();
      const double rho = rhoQ.dot(X);
      if (std::abs(re - rho) > tol * (1.0 + std::abs(rho))) neutral = false;
    }
    if (neutral) out.terms.push_back(term);
  }
  return out;
}

TransitivityReport transitivity_check(
    const FunctionalExpSum& f, const Eigen::RowVectorXd& rhoQ,
    const std::vector<Eigen::VectorXd>& rays_I,
    const std::vector<Eigen::VectorXd>& rays_J,
    const std::vector<Eigen::VectorXd>& samples, double tol) {
  const FunctionalExpSum fI = functional_constant_term(f, rhoQ, rays_I);
  const FunctionalExpSum fJ = functional_constant_term(f, rhoQ, rays_J);
  const FunctionalExpSum fJI = functional_constant_term(fJ, rhoQ, rays_I);
  TransitivityReport rep;
  double scale = 1.0;
  for (const auto& X : samples) {
    rep.max_diff =
        std::max(rep.max_diff, std::abs(fJI.evaluate(X) - fI.evaluate(X)));
    scale = std::max(scale, std::abs(f.evaluate(X)));
  }
  rep.pass = rep.max_diff <= tol * scale;
  return rep;
}

// ---- vanishing and integrality checks -------------------------------------

bool discrete_series_test(const std::vector<ExpPolynomial>& constant_terms,
                          const std::vector<double>& grid, double scale,
                          double tol) {
  for (const ExpPolynomial& fI : constant_terms)
    for (double t : grid)
      if (std::abs(fI.evaluate(t)) > tol * scale) return false;
  return true;
}

IntegralityReport integrality_check(const SpectralDatum& spectral,
                                    const Eigen::MatrixXd& lattice_rows,
                                    const Eigen::RowVectorXd& rhoQ,
                                    double tol) {
  IntegralityReport rep;
  for (const JointExponent& e : spectral.exponents) {
    Eigen::RowVectorXd v(e.lambda.size());
    for (Eigen::Index i = 0; i < e.lambda.size(); ++i)
      v(i) = e.lambda(i).real() - rhoQ(i);
    double dist;
    if (lattice_rows.rows() == 0) {
      dist = v.norm();
    } else {
      // Nearest lattice point by rounding the least-squares coordinates
      // (lattice bases here are near-orthogonal; desk-scale examples only).
      const Eigen::MatrixXd L = lattice_rows;
      const Eigen::VectorXd c =
          (L * L.transpose()).ldlt().solve(L * v.transpose());
      Eigen::VectorXd cr(c.size());
      for (Eigen::Index i = 0; i < c.size(); ++i) cr(i) = std::round(c(i));
      dist = (v - (cr.transpose() * L)).norm();
    }
    rep.max_dist = std::max(rep.max_dist, dist);
  }
  rep.pass = rep.max_dist <= tol;
  return rep;
}

// ---- serialization ---------------------------------------------------------

std::string spectral_to_json(const SpectralDatum& s) {
  nlohmann::json j;
  j["delta"] = s.delta;
  j["tol"] = s.tol;
  j["exponents"] = nlohmann::json::array();
  for (const JointExponent& e : s.exponents) {
    nlohmann::json je;
    je["lambda_re"] = nlohmann::json::array();
    je["lambda_im"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < e.lambda.size(); ++i) {
      je["lambda_re"].push_back(e.lambda(i).real());
      je["lambda_im"].push_back(e.lambda(i).imag());
    }
    je["class"] = e.cls == ExponentClass::Qplus
                      ? "Q+"
                      : (e.cls == ExponentClass::Qzero ? "Q0" : "Q-");
    je["rank"] = std::lround(std::abs(e.projector.trace()));
    j["exponents"].push_back(je);
  }
  return j.dump(2);
}

std::string exppoly_to_json(const ExpPolynomial& p) {
  nlohmann::json j;
  j["terms"] = nlohmann::json::array();
  for (const ExpPolynomial::Term& t : p.terms) {
    nlohmann::json jt;
    jt["exponent_re"] = t.exponent.real();
    jt["exponent_im"] = t.exponent.imag();
    jt["coeffs_re"] = nlohmann::json::array();
    jt["coeffs_im"] = nlohmann::json::array();
    for (const Cplx& c : t.coeffs) {
      jt["coeffs_re"].push_back(c.real());
      jt["coeffs_im"].push_back(c.imag());
    }
    j["terms"].push_back(jt);
  }
  return j.dump(2);
}

}  // namespace sph
