#include <doctest.h>

#include <cmath>

#include "sph/pipeline.hpp"

using namespace sph;

TEST_CASE("eigenfunction oracle: normalization, symmetry, continuation") {
  CHECK(spherical_function_oracle(1.0, 0.0).value == doctest::Approx(1.0));
  CHECK(spherical_function_oracle(0.5, 0.0).value == doctest::Approx(1.0));

  // Even in the spectral parameter.
  for (double t : {0.7, 1.3, 1.9}) {
    const double d = std::abs(spherical_function_oracle(2.0, t).value -
                              spherical_function_oracle(-2.0, t).value);
    CHECK(d <= 1e-10);
  }

  // The quadrature and the differential-equation continuation must agree
  // where both are valid.
  std::vector<double> grid = {1.0, 1.5, 2.0};
  for (double lambda : {0.5, 1.0, 2.0}) {
    std::vector<double> vals = spherical_function_samples(lambda, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(std::abs(vals[i] -
                     spherical_function_oracle(lambda, grid[i]).value) <=
            1e-9);
  }
}

TEST_CASE("hyperbolic transport system validates and has the right spectrum") {
  TransportSystem sys = hyperbolic_transport(1.0, 1.0);
  sys.validate();
  SpectralDatum sp = joint_spectrum(sys);
  REQUIRE(sp.exponents.size() == 2);
  for (const auto& e : sp.exponents) {
    CHECK(e.cls == ExponentClass::Qzero);
    CHECK(std::abs(std::abs(e.lambda(0).imag()) - 1.0) <= 1e-10);
    // The functional coordinate is +1: evaluation at the ray X = -1 gives
    // the decaying real part -1.
    CHECK(e.lambda(0).real() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(hyperbolic_transport(1.0, 0.1), std::invalid_argument);
}

TEST_CASE("transport solution tracks the oracle eigenfunction") {
  const double lambda = 1.0, t0 = 1.0;
  TransportSystem sys = hyperbolic_transport(lambda, t0);
  const OracleValue base = spherical_function_oracle(lambda, t0);
  CVector phi0(2);
  phi0 << base.value, base.deriv;
  const Eigen::VectorXd X = Eigen::VectorXd::Constant(1, -1.0);
  for (double s : {0.5, 1.0, 2.0}) {
    const CVector phi = solve_transport(sys, phi0, X, s, 1e-10);
    const OracleValue ref = spherical_function_oracle(lambda, t0 + s);
    CHECK(std::abs(phi(0).real() - ref.value) <= 1e-7);
    CHECK(std::abs(phi(1).real() - ref.deriv) <= 1e-7);
  }
}

TEST_CASE("constant term of the curved rank-one eigenfunction") {
  SphericalCtermResult res = spherical_constant_term(1.0);
  CHECK(res.pass);
  CHECK(res.two_unitary);
  CHECK(res.freq_err <= 1e-3);
  CHECK(res.re_err <= 2e-8);
  CHECK(res.rate.epsilon == doctest::Approx(4.0).epsilon(0.05));
  CHECK(res.rate.r_squared >= 0.99);
}

TEST_CASE("orbit factorization families of the split rank-one example") {
  Eigen::Matrix2d g0;
  g0 << 1, 0, 0.5, 1;
  std::vector<double> grid;
  for (int j = 0; j < 40; ++j) grid.push_back(0.5 + 0.25 * j);
  OrbitFamilies fam = so11_orbit_families(g0, grid);
  OrbitReport rep = orbit_asymptotics(fam.u, fam.m, fam.ab);
  CHECK(rep.pass);
  CHECK(rep.u.is_rapid);
  CHECK(rep.u.epsilon == doctest::Approx(2.0).epsilon(0.01));
  CHECK(rep.m.exact);
  CHECK(rep.ab.exact);
  CHECK(fam.m_limit.isApprox(Eigen::Matrix2d::Identity()));

  Eigen::Matrix2d bad;
  bad << 1, 0, 2, 1;  // |r/t| >= 1: outside the open orbit chart
  CHECK_THROWS_AS(so11_orbit_families(bad, grid), FactorizationFailure);
}

TEST_CASE("interior samples are accepted by the limit consistency check") {
  ExampleSetup e = make_example("sl2_so11");
  SphericalDatum d = analyze_structure(e.g, e.h, e.P);
  DegenerationDatum dd = h_I_explicit(d, {});
  std::vector<RatVector> xs = interior_samples(d, dd, 5);
  REQUIRE(xs.size() >= 5);
  ConsistencyReport rep = degeneration_consistency(d, dd, xs);
  CHECK(rep.ok);
  CHECK(rep.samples_checked >= 5);
}

TEST_CASE("run_example passes the exact stages on every built-in example") {
  PipelineOptions opt;
  for (const auto& name : example_names()) {
    RunReport rep = run_example(name, {"analyze", "degenerate", "fan"}, opt);
    INFO(name);
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.all_pass);
  }
}

TEST_CASE("verify on examples without a numerical oracle skips cterm cleanly") {
  PipelineOptions opt;
  for (const std::string name : {"torus", "sl2xsl2_diag"}) {
    RunReport rep = run_example(name, {"verify"}, opt);
    INFO(name);
    for (const auto& f : rep.failures) INFO(f);
    CHECK(rep.all_pass);
  }
}

TEST_CASE("reports are byte-identical across repeated runs") {
  PipelineOptions opt;
  RunReport a = run_example("sl2_so11", {"verify"}, opt);
  RunReport b = run_example("sl2_so11", {"verify"}, opt);
  CHECK(a.json == b.json);
}

TEST_CASE("run_input analyzes a user-supplied space") {
  const std::string algebra = lie_algebra_to_json(sl2());
  const std::string input = R"({
    "name": "custom_sl2",
    "algebra": )" + algebra + R"(,
    "h": [[0, 1, 1]],
    "parabolic": {"m": [], "a": [[1, 0, 0]], "n": [[0, 1, 0]]}
  })";
  PipelineOptions opt;
  RunReport rep = run_input(input, {"analyze", "degenerate", "fan"}, opt);
  for (const auto& f : rep.failures) INFO(f);
  CHECK(rep.all_pass);
}
