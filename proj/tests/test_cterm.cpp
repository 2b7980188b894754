#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "sph/cterm.hpp"

using namespace sph;

namespace {

TransportSystem make_system(std::vector<CMatrix> gammas,
                            Eigen::RowVectorXd rho,
                            std::vector<Eigen::VectorXd> rays) {
  TransportSystem sys;
  sys.dim_a = static_cast<Eigen::Index>(gammas.size());
  sys.dim_U = gammas.empty() ? 0 : gammas[0].rows();
  sys.gamma_basis = std::move(gammas);
  sys.rhoQ = std::move(rho);
  sys.cone_rays = std::move(rays);
  sys.pairing = CVector::Zero(sys.dim_U);
  if (sys.dim_U > 0) sys.pairing(0) = Cplx(1, 0);
  return sys;
}

Eigen::VectorXd vec1(double x) {
  Eigen::VectorXd v(1);
  v << x;
  return v;
}

Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

Eigen::RowVectorXd row1(double x) {
  Eigen::RowVectorXd v(1);
  v << x;
  return v;
}

Eigen::RowVectorXd row2(double x, double y) {
  Eigen::RowVectorXd v(2);
  v << x, y;
  return v;
}

CMatrix cdiag(std::initializer_list<Cplx> d) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()),
                            static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (const Cplx& v : d) m(i, i) = v, ++i;
  return m;
}

}  // namespace

TEST_CASE("joint spectrum: scalar multiple of the identity") {
  auto sys = make_system({3.0 * CMatrix::Identity(3, 3)}, row1(3.0), {vec1(1)});
  SpectralDatum sp = joint_spectrum(sys);
  REQUIRE(sp.exponents.size() == 1);
  CHECK(sp.exponents[0].cls == ExponentClass::Qzero);
  CHECK(std::abs(sp.exponents[0].lambda(0) - Cplx(3, 0)) < 1e-10);
  CHECK((sp.exponents[0].projector - CMatrix::Identity(3, 3)).norm() < 1e-10);
}

TEST_CASE("joint spectrum: sign classification on a ray") {
  const double r = -1.0;
  auto sys = make_system({cdiag({r + 1.0, r - 1.0})}, row1(r), {vec1(1)});
  SpectralDatum sp = joint_spectrum(sys);
  REQUIRE(sp.exponents.size() == 2);
  int plus = 0, minus = 0;
  for (const auto& e : sp.exponents) {
    if (e.cls == ExponentClass::Qplus) ++plus;
    if (e.cls == ExponentClass::Qminus) ++minus;
  }
  CHECK(plus == 1);
  CHECK(minus == 1);
}

TEST_CASE("joint spectrum: polynomial commuting pair recovery") {
  Eigen::Matrix4d A;
  A << 1, 2, 0, 1,
       0, -1, 1, 0,
       2, 0, 3, 1,
       1, 1, 0, 2;
  const CMatrix Ac = A.cast<Cplx>();
  const CMatrix G1 = Ac;
  const CMatrix G2 = Ac * Ac - Ac;
  auto sys = make_system({G1, G2}, row2(0, 0), {vec2(1, 0), vec2(0, 1)});
  SpectralDatum sp = joint_spectrum(sys);

  Eigen::ComplexEigenSolver<CMatrix> es(Ac, false);
  REQUIRE(sp.exponents.size() == 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const Cplx a = es.eigenvalues()(i);
    bool found = false;
    for (const auto& e : sp.exponents)
      if (std::abs(e.lambda(0) - a) < 1e-6 &&
          std::abs(e.lambda(1) - (a * a - a)) < 1e-6)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("joint spectrum: ambiguity refusal") {
  auto sys = make_system({cdiag({0.0, 2e-8}), cdiag({100.0, 100.0})},
                         row2(0, 100), {vec2(1, 0), vec2(0, 1)});
  CHECK_THROWS_AS(joint_spectrum(sys), ClusterAmbiguity);
}

TEST_CASE("projector bound: normal and Jordan-type matrices") {
  ProjectorBound n = projector_bound_check(cdiag({0.0, 1.0, 2.0}), 1);
  CHECK(n.norm == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(n.pass);

  const double M = 100.0;
  CMatrix J(2, 2);
  J << 0, M, 0, 1;
  ProjectorBound j = projector_bound_check(J, 0);
  CHECK(j.norm == doctest::Approx(std::sqrt(1.0 + M * M)).epsilon(1e-6));
  CHECK(j.pass);

  CHECK_THROWS_AS(projector_bound_check(cdiag({0.0, 0.5}), 0), GapViolated);
}

TEST_CASE("projector bound: random ensemble with integer spectral parts") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);  // dim <= 6
    CMatrix D = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = Cplx(i, unif(rng));
    CMatrix V = CMatrix::Identity(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) V(i, j) += 0.4 * Cplx(unif(rng), unif(rng));
    const CMatrix A = V * D * V.inverse();
    for (int k = 0; k < n; ++k) {
      ProjectorBound b = projector_bound_check(A, k);
      CHECK(b.pass);
    }
  }
}

TEST_CASE("solve_transport: homogeneous, constant, and scalar closed forms") {
  CMatrix G(2, 2);
  G << -1, 1, 0, -2;
  auto sys = make_system({G}, row1(-1), {vec1(1)});
  CVector v0(2);
  v0 << 1, 2;
  CHECK((solve_transport(sys, v0, vec1(1), 1.5) - (1.5 * G).exp() * v0).norm() <
        1e-10);

  auto sys0 = make_system({CMatrix::Zero(2, 2)}, row1(0), {vec1(1)});
  CVector c(2);
  c << 2, -1;
  sys0.psi = [c](const Eigen::VectorXd&, double) { return c; };
  sys0.psi_scale = c.norm();
  sys0.psi_envelope = row1(0);
  CHECK((solve_transport(sys0, v0, vec1(1), 3.0) - (v0 + 3.0 * c)).norm() <
        1e-8);

  // Scalar: gamma = -1, psi = e^{-3 s}.
  const double g = -1.0, m = -3.0, t = 2.0;
  auto ssys = make_system({g * CMatrix::Identity(1, 1)}, row1(g), {vec1(1)});
  ssys.psi = [m](const Eigen::VectorXd&, double s) {
    CVector v(1);
    v << std::exp(m * s);
    return v;
  };
  ssys.psi_scale = 1.0;
  ssys.psi_envelope = row1(m);
  CVector p0(1);
  p0 << 1;
  const double expect =
      std::exp(g * t) + (std::exp(m * t) - std::exp(g * t)) / (m - g);
  CHECK(std::abs(solve_transport(ssys, p0, vec1(1), t)(0) - expect) < 1e-8);

  // Residual: centered finite difference reproduces gamma Phi + Psi.
  const double h = 1e-5;
  const Cplx d = (solve_transport(ssys, p0, vec1(1), t + h)(0) -
                  solve_transport(ssys, p0, vec1(1), t - h)(0)) /
                 (2 * h);
  const Cplx rhs = g * solve_transport(ssys, p0, vec1(1), t)(0) +
                   std::exp(m * t);
  CHECK(std::abs(d - rhs) < 1e-6 * std::abs(rhs));
}

TEST_CASE("phi_lambda_infty: closed form and direction checks") {
  // Homogeneous: the limit is the projected initial value.
  CMatrix G(2, 2);
  G << -1, 0, 0, -5;
  auto hsys = make_system({G}, row1(-1), {vec1(1)});
  SpectralDatum hsp = joint_spectrum(hsys);
  CVector v0(2);
  v0 << 3, 4;
  std::size_t lam0 = 0;
  for (std::size_t i = 0; i < hsp.exponents.size(); ++i)
    if (hsp.exponents[i].cls == ExponentClass::Qzero) lam0 = i;
  CHECK((phi_lambda_infty(hsys, hsp, lam0, v0, vec1(1)) -
         hsp.exponents[lam0].projector * v0)
            .norm() < 1e-12);

  // Scalar closed form: Phi0 + 1/(gamma - m).
  const double g = -1.0, m = -3.0;
  auto ssys = make_system({g * CMatrix::Identity(1, 1)}, row1(g), {vec1(1)});
  ssys.psi = [m](const Eigen::VectorXd&, double s) {
    CVector v(1);
    v << std::exp(m * s);
    return v;
  };
  ssys.psi_scale = 1.0;
  ssys.psi_envelope = row1(m);
  SpectralDatum ssp = joint_spectrum(ssys);
  CVector p0(1);
  p0 << 2;
  CHECK(std::abs(phi_lambda_infty(ssys, ssp, 0, p0, vec1(1))(0) -
                 (2.0 + 1.0 / (g - m))) < 1e-8);

  // Envelope does not dominate: refuse.
  ssys.psi_envelope = row1(g + 0.5);
  CHECK_THROWS_AS(phi_lambda_infty(ssys, ssp, 0, p0, vec1(1)),
                  TailBoundUnreachable);

  // Direction independence holds when gamma(X) - envelope(X) is constant
  // over the rays, fails otherwise.
  auto dsys = make_system(
      {-1.0 * CMatrix::Identity(1, 1), -2.0 * CMatrix::Identity(1, 1)},
      row2(-1, -2), {vec2(1, 0), vec2(0, 1)});
  dsys.psi = [&dsys](const Eigen::VectorXd& X, double s) {
    CVector v(1);
    v << std::exp(dsys.psi_envelope.dot(X) * s);
    return v;
  };
  dsys.psi_scale = 1.0;
  dsys.psi_envelope = row2(-2, -3);
  SpectralDatum dsp = joint_spectrum(dsys);
  CHECK_NOTHROW(phi_lambda_infty_checked(dsys, dsp, 0, p0, vec2(1, 0),
                                         vec2(0, 1)));
  dsys.psi_envelope = row2(-2, -4);
  CHECK_THROWS_AS(
      phi_lambda_infty_checked(dsys, dsp, 0, p0, vec2(1, 0), vec2(0, 1)),
      DirectionDependence);
}

TEST_CASE("constant term: trivial channels and Jordan ray law") {
  // Everything strictly decaying: the constant term vanishes.
  auto dn = make_system({cdiag({-2.0, -3.0})}, row1(-1), {vec1(1)});
  SpectralDatum dnsp = joint_spectrum(dn);
  CVector v0(2);
  v0 << 1, 1;
  CHECK(std::abs(constant_term(dn, dnsp, v0, vec1(1))) < 1e-12);

  // Gamma = rho Id: f_I = f along the ray.
  auto id = make_system({-1.0 * CMatrix::Identity(2, 2)}, row1(-1), {vec1(1)});
  SpectralDatum idsp = joint_spectrum(id);
  ExpPolynomial f = constant_term_ray(id, idsp, v0, vec1(1));
  REQUIRE(f.terms.size() == 1);
  CHECK(std::abs(f.terms[0].exponent - Cplx(-1, 0)) < 1e-10);
  for (double t : {0.0, 0.7, 2.5}) {
    const Cplx direct =
        (id.pairing.transpose() * solve_transport(id, v0, vec1(1), t))(0);
    CHECK(std::abs(f.evaluate(t) - direct) < 1e-9);
  }

  // Jordan block on the neutral line: degree-1 polynomial coefficient.
  CMatrix J(2, 2);
  J << -1, 1, 0, -1;
  auto js = make_system({J}, row1(-1), {vec1(1)});
  SpectralDatum jsp = joint_spectrum(js);
  ExpPolynomial jf = constant_term_ray(js, jsp, v0, vec1(1));
  REQUIRE(jf.terms.size() == 1);
  REQUIRE(jf.terms[0].coeffs.size() == 2);
  for (double t : {0.0, 1.0, 3.0}) {
    const Cplx direct = (js.pairing.transpose() * ((t * J).exp() * v0))(0);
    CHECK(std::abs(jf.evaluate(t) - direct) < 1e-9);
  }

  // A neutral channel that leaves the reference line off the sampling cone.
  auto off = make_system({cdiag({0.0}), cdiag({5.0})}, row2(0, 0),
                         {vec2(1, 0)});
  SpectralDatum offsp = joint_spectrum(off);
  CHECK_THROWS_AS(constant_term_ray(off, offsp, CVector::Ones(1), vec2(0, 1)),
                  NonUnitaryCharacter);
}

TEST_CASE("expfit: generator recovery, confluent term, threshold, roundtrip") {
  std::vector<double> t;
  for (int j = 0; j < 64; ++j) t.push_back(0.05 * j);

  std::vector<Cplx> y1;
  for (double tj : t) y1.push_back(3.0 * std::exp(0.5 * tj));
  ExpPolynomial p1 = expfit(t, y1, 4);
  REQUIRE(p1.terms.size() == 1);
  CHECK(std::abs(p1.terms[0].exponent - Cplx(0.5, 0)) < 1e-8);
  REQUIRE(p1.terms[0].coeffs.size() == 1);
  CHECK(std::abs(p1.terms[0].coeffs[0] - Cplx(3, 0)) < 1e-7);

  std::vector<Cplx> y2;
  for (double tj : t)
    y2.push_back((1.0 + 2.0 * tj) * std::exp(Cplx(0, 1) * tj));
  ExpPolynomial p2 = expfit(t, y2, 4);
  REQUIRE(p2.terms.size() == 1);
  CHECK(std::abs(p2.terms[0].exponent - Cplx(0, 1)) < 1e-6);
  REQUIRE(p2.terms[0].coeffs.size() == 2);
  CHECK(std::abs(p2.terms[0].coeffs[0] - Cplx(1, 0)) < 1e-5);
  CHECK(std::abs(p2.terms[0].coeffs[1] - Cplx(2, 0)) < 1e-5);

  std::vector<Cplx> noise;
  for (double tj : t) noise.push_back(1e-12 * std::sin(17.0 * tj));
  CHECK(expfit(t, noise, 4).terms.empty());

  // Synthesize-then-recover on a three-channel signal.
  ExpPolynomial model;
  model.terms.push_back({Cplx(-1, 2), {Cplx(2, 0)}});
  model.terms.push_back({Cplx(-1, -2), {Cplx(2, 0)}});
  model.terms.push_back({Cplx(-0.3, 0), {Cplx(0.5, 0)}});
  model.canonicalize();
  std::vector<Cplx> y3;
  for (double tj : t) y3.push_back(model.evaluate(tj));
  ExpPolynomial back = expfit(t, y3, 8);
  for (double tj : {0.1, 1.3, 2.9})
    CHECK(std::abs(back.evaluate(tj) - model.evaluate(tj)) < 1e-6);

  CHECK_THROWS_AS(expfit(t, y3, 1), OrderOverflow);
}

TEST_CASE("approximation_rate: exact match, synthetic rate, no decay") {
  std::vector<double> t;
  for (int j = 0; j < 60; ++j) t.push_back(0.2 * j);
  const double rho = 0.5;
  ExpPolynomial fI;
  fI.terms.push_back({Cplx(rho, 0), {Cplx(1, 0)}});

  std::vector<Cplx> exact;
  for (double tj : t) exact.push_back(fI.evaluate(tj));
  CHECK(approximation_rate(t, exact, fI, rho).infinite);

  std::vector<Cplx> pert;
  for (double tj : t)
    pert.push_back(fI.evaluate(tj) + std::exp((rho - 2.0) * tj));
  RateFit r = approximation_rate(t, pert, fI, rho);
  CHECK(r.epsilon == doctest::Approx(2.0).epsilon(0.01));
  CHECK(r.r_squared > 0.99);

  std::vector<Cplx> grow;
  for (double tj : t)
    grow.push_back(fI.evaluate(tj) + 1e-3 * std::exp((rho + 1.0) * tj));
  CHECK_THROWS_AS(approximation_rate(t, grow, fI, rho), NoDecay);
}

TEST_CASE("functional staging and transitivity") {
  // Two-direction staged exponents over rho = (-1, -2).
  const Eigen::RowVectorXd rho = row2(-1, -2);
  FunctionalExpSum f;
  auto crow = [](Cplx a, Cplx b) {
    CRowVector v(2);
    v << a, b;
    return v;
  };
  f.terms.push_back({crow(Cplx(-1, 1), Cplx(-2, 1)), Cplx(1, 0)});   // neutral
  f.terms.push_back({crow(Cplx(-1, 0), Cplx(-3, 0)), Cplx(2, 0)});   // drops on e2
  f.terms.push_back({crow(Cplx(-2, 0), Cplx(-2, 0)), Cplx(3, 0)});   // drops on e1
  f.terms.push_back({crow(Cplx(-3, 0), Cplx(-4, 0)), Cplx(4, 0)});   // decays

  const std::vector<Eigen::VectorXd> rays_I{vec2(1, 0), vec2(0, 1)};
  const std::vector<Eigen::VectorXd> rays_J{vec2(1, 0)};

  FunctionalExpSum fI = functional_constant_term(f, rho, rays_I);
  REQUIRE(fI.terms.size() == 1);
  CHECK(std::abs(fI.terms[0].coeff - Cplx(1, 0)) < 1e-12);
  FunctionalExpSum fJ = functional_constant_term(f, rho, rays_J);
  CHECK(fJ.terms.size() == 2);

  std::vector<Eigen::VectorXd> samples{vec2(0.3, 0.9), vec2(1.5, 0.2),
                                       vec2(2.0, 2.0)};
  TransitivityReport rep = transitivity_check(f, rho, rays_I, rays_J, samples);
  CHECK(rep.pass);
  CHECK(rep.max_diff < 1e-12);
}

TEST_CASE("discrete series surrogate and integrality") {
  std::vector<double> grid{0.0, 1.0, 2.0, 5.0};
  ExpPolynomial zero, osc;
  osc.terms.push_back({Cplx(0, 1), {Cplx(1, 0)}});
  CHECK(discrete_series_test({zero}, grid, 1.0));
  CHECK_FALSE(discrete_series_test({zero, osc}, grid, 1.0));

  auto sys = make_system({cdiag({0.0, 1.0, 2.0})}, row1(0), {vec1(1)});
  SpectralDatum sp = joint_spectrum(sys);
  Eigen::MatrixXd lat(1, 1);
  lat << 1;
  CHECK(integrality_check(sp, lat, row1(0)).pass);

  auto shifted = make_system({cdiag({0.5, 1.5})}, row1(0), {vec1(1)});
  SpectralDatum shsp = joint_spectrum(shifted);
  CHECK_FALSE(integrality_check(shsp, lat, row1(0)).pass);
}

TEST_CASE("cterm serialization") {
  auto sys = make_system({cdiag({-1.0, -2.0})}, row1(-1), {vec1(1)});
  SpectralDatum sp = joint_spectrum(sys);
  CHECK(spectral_to_json(sp).find("\"class\"") != std::string::npos);
  ExpPolynomial p;
  p.terms.push_back({Cplx(-1, 0.5), {Cplx(1, 0), Cplx(0, 2)}});
  CHECK(exppoly_to_json(p).find("\"terms\"") != std::string::npos);
}
