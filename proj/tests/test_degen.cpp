#include <doctest.h>

#include "sph/degen.hpp"

using namespace sph;

namespace {

RationalSubspace span_of(std::initializer_list<std::initializer_list<long>> rows,
                         Eigen::Index ambient) {
  std::vector<RatVector> vs;
  for (const auto& r : rows) vs.push_back(rat_vector(r));
  return RationalSubspace::from_vectors(vs, ambient);
}

SphericalDatum sl2_so2() {
  StructuredLieAlgebra g = sl2();
  ParabolicDatum P = make_parabolic(g, RationalSubspace(3),
                                    span_of({{1, 0, 0}}, 3),
                                    span_of({{0, 1, 0}}, 3));
  return analyze_structure(g, span_of({{0, 1, -1}}, 3), P);
}

SphericalDatum sl2sl2_diag() {
  StructuredLieAlgebra g = sl2_times_sl2();
  ParabolicDatum P = make_parabolic(
      g, RationalSubspace(6),
      span_of({{1, 0, 0, 0, 0, 0}, {0, 0, 0, 1, 0, 0}}, 6),
      span_of({{0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 1}}, 6));
  RationalSubspace h = span_of(
      {{1, 0, 0, 1, 0, 0}, {0, 1, 0, 0, 1, 0}, {0, 0, 1, 0, 0, 1}}, 6);
  return analyze_structure(g, h, P);
}

}  // namespace

TEST_CASE("monoid membership by bounded search") {
  RationalSubspace amb = RationalSubspace::full(2);
  auto f = [&](long a, long b) {
    RatRowVector c(2);
    c << rat(a), rat(b);
    return LinearFunctional(amb, c);
  };
  std::vector<LinearFunctional> gens{f(2, 0), f(0, 3)};
  CHECK(in_monoid_span(f(0, 0), gens));
  CHECK(in_monoid_span(f(4, 3), gens));
  CHECK(in_monoid_span(f(2, 3), gens));
  CHECK(in_monoid_span(f(6, 9), gens));
  CHECK_FALSE(in_monoid_span(f(1, 0), gens));
  CHECK_FALSE(in_monoid_span(f(3, 2), gens));
  CHECK_FALSE(in_monoid_span(f(-2, 0), gens));
  CHECK_FALSE(in_monoid_span(f(1, 1), {}));
  CHECK(in_monoid_span(f(0, 0), {}));
}

TEST_CASE("leading-term limits of subspaces") {
  StructuredLieAlgebra g = sl2();
  RatVector mH = rat_vector({-1, 0, 0});
  // span(E - F) degenerates to span(F) under ad(-H).
  CHECK(initial_subspace(g, mH, span_of({{0, 1, -1}}, 3)) ==
        span_of({{0, 0, 1}}, 3));
  // Blockwise: span(E - F, H) -> span(F, H).
  CHECK(initial_subspace(g, mH, span_of({{0, 1, -1}, {1, 0, 0}}, 3)) ==
        span_of({{1, 0, 0}, {0, 0, 1}}, 3));
  // Already graded subspaces are fixed.
  CHECK(initial_subspace(g, mH, span_of({{0, 1, 0}}, 3)) ==
        span_of({{0, 1, 0}}, 3));
  // X = 0 fixes everything.
  CHECK(initial_subspace(g, rat_vector({0, 0, 0}), span_of({{0, 1, -1}}, 3)) ==
        span_of({{0, 1, -1}}, 3));
}

TEST_CASE("sl2/so(2) boundary degenerations") {
  SphericalDatum d = sl2_so2();

  DegenerationDatum d_empty = h_I_explicit(d, {});
  CHECK(d_empty.hI == span_of({{0, 0, 1}}, 3));  // h_emptyset = span(F)
  REQUIRE(d_empty.TI_table.size() == 1);
  CHECK(d_empty.TI_table[0].components.empty());
  CHECK(d_empty.a_I == RationalSubspace::full(1));

  DegenerationDatum d_full = h_I_explicit(d, {0});
  CHECK(d_full.hI == d.h);  // I = S keeps everything
  CHECK(d_full.a_I.dim() == 0);

  // Limit independence: several strictly interior directions, same limit.
  RatVector x1 = rat_vector({-1}), x3 = rat_vector({-3});
  ConsistencyReport rep = degeneration_consistency(d, d_empty, {x1, x3});
  CHECK(rep.ok);
  CHECK(rep.samples_checked == 2);
  CHECK(interior_direction(d, {}) == rat_vector({-1}));

  // I = S: the edge is {0}; degenerating along it does nothing.
  CHECK(interior_direction(d, {0}) == rat_vector({0}));
  CHECK(degeneration_consistency(d, d_full, {rat_vector({0})}).ok);

  // Boundary samples are rejected.
  CHECK_THROWS_AS(degeneration_consistency(d, d_empty, {rat_vector({0})}),
                  NotInInteriorCone);
}

TEST_CASE("sl2/so(1,1) degenerates to the same horospherical space") {
  StructuredLieAlgebra g = sl2();
  ParabolicDatum P = make_parabolic(g, RationalSubspace(3),
                                    span_of({{1, 0, 0}}, 3),
                                    span_of({{0, 1, 0}}, 3));
  SphericalDatum d = analyze_structure(g, span_of({{0, 1, 1}}, 3), P);
  DegenerationDatum dd = h_I_explicit(d, {});
  CHECK(dd.hI == span_of({{0, 0, 1}}, 3));
  CHECK(degeneration_consistency(d, dd, {rat_vector({-2})}).ok);
}

TEST_CASE("verification of the degenerate spherical space") {
  SphericalDatum d = sl2_so2();
  DegenerationDatum d_empty = h_I_explicit(d, {});
  DegenerateSpaceReport rep = verify_degenerate_space(d, d_empty);
  CHECK(rep.open_orbit);
  CHECK(rep.adapted);
  CHECK(rep.cone_matches);  // Z_empty has no spherical roots: full cone
  CHECK(rep.edge_matches);
  CHECK(rep.ok());
  CHECK(rep.degenerate.S.empty());

  DegenerationDatum d_full = h_I_explicit(d, {0});
  DegenerateSpaceReport rep_full = verify_degenerate_space(d, d_full);
  CHECK(rep_full.ok());
  CHECK(rep_full.degenerate.S == d.S);
}

TEST_CASE("sl2 x sl2 / diag degeneration to l∩h + opposite nilradical") {
  SphericalDatum d = sl2sl2_diag();
  DegenerationDatum dd = h_I_explicit(d, {});
  CHECK(dd.hI == span_of(
                     {{1, 0, 0, 1, 0, 0}, {0, 0, 1, 0, 0, 0},
                      {0, 0, 0, 0, 1, 0}}, 6));
  ConsistencyReport rep =
      degeneration_consistency(d, dd, {interior_direction(d, {})});
  CHECK(rep.ok);
  CHECK(verify_degenerate_space(d, dd).ok());

  // Monotonicity: degenerating h_S = h further along a_empty gives h_empty.
  DegenerationDatum d_full = h_I_explicit(d, {0});
  RatVector x = aZ_to_ambient(d, interior_direction(d, {}));
  CHECK(initial_subspace(d.g, x, d_full.hI) == dd.hI);
}

TEST_CASE("beta functionals") {
  SphericalDatum d = sl2_so2();
  BetaFunctionals bf = beta_functionals(d, {});
  CHECK_FALSE(bf.f_complete);
  RatVector mH = rat_vector({-1, 0, 0});
  CHECK(bf.beta_tilde(mH) == Rat(-4));  // 2*alpha at -H
  CHECK(bf.beta(mH) == Rat(-4));
  CHECK(bf.beta_tilde(rat_vector({1, 0, 0})) == Rat(4));
  // Strict interior of a_I^{--} means beta_tilde < 0.
  RatVector interior = aZ_to_ambient(d, interior_direction(d, {}));
  CHECK(bf.beta_tilde(interior) < 0);
  CHECK_THROWS_AS(beta_functionals(d, {0}), EmptyIndexSet);

  // Supplying the enveloping-algebra weight set marks completeness and
  // enters the max.
  LinearFunctional extra(d.aZ, RatRowVector::Constant(1, rat(-1)));
  BetaFunctionals bf2 = beta_functionals(d, {}, {extra}, true);
  CHECK(bf2.f_complete);
  CHECK(bf2.beta(mH) == Rat(1));  // max(-4, -1*(-1))
}

TEST_CASE("numerical large-t diagnostic agrees with the exact limit") {
  SphericalDatum d = sl2_so2();
  DegenerationDatum dd = h_I_explicit(d, {});
  RatVector mH = rat_vector({-1, 0, 0});
  CHECK(degeneration_numeric_gap(d.g, mH, d.h, dd.hI, 1000.0) < 1e-8);
  // Against the wrong target the gap is large.
  CHECK(degeneration_numeric_gap(d.g, mH, d.h, span_of({{0, 1, 0}}, 3),
                                 1000.0) > 0.9);
}

TEST_CASE("degeneration JSON serialization") {
  SphericalDatum d = sl2_so2();
  std::string text = degeneration_to_json(h_I_explicit(d, {}));
  CHECK(text.find("\"hI\"") != std::string::npos);
  CHECK(text.find("\"TI_table\"") != std::string::npos);
}
