#include <doctest.h>

#include <random>

#include "sph/lie.hpp"
#include "sph/roots.hpp"

using namespace sph;

namespace {

RatVector random_rat_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 5);
  RatVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rat(num(rng), den(rng));
  return v;
}

// Independent oracle for the sl2 structure constants: commutators of the
// defining 2x2 matrices.
RatMatrix sl2_matrix(const RatVector& coords) {
  RatMatrix m(2, 2);
  m << coords(0), coords(1), coords(2), -coords(0);
  return m;
}

}  // namespace

TEST_CASE("sl2 bracket matches defining-representation commutators") {
  StructuredLieAlgebra g = sl2();
  RatVector H = g.basis_vector(0), E = g.basis_vector(1),
            F = g.basis_vector(2);

  CHECK(g.bracket(H, E) == RatVector(2 * E));
  CHECK(g.bracket(E, F) == H);
  CHECK(g.bracket(H, F) == RatVector(-2 * F));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    RatVector x = random_rat_vector(rng, 3), y = random_rat_vector(rng, 3);
    RatMatrix mx = sl2_matrix(x), my = sl2_matrix(y);
    RatMatrix comm = mx * my - my * mx;
    RatVector br = g.bracket(x, y);
    CHECK(sl2_matrix(br) == comm);
    CHECK(g.bracket(x, x).isZero(Rat(0)));
    // Bilinearity.
    RatVector z = random_rat_vector(rng, 3);
    CHECK(g.bracket(x + z, y) == RatVector(g.bracket(x, y) + g.bracket(z, y)));
  }
}

TEST_CASE("form is ad-invariant and theta-compatible on random vectors") {
  for (const StructuredLieAlgebra& g : {sl2(), sl2_times_sl2(), sln(3)}) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      RatVector x = random_rat_vector(rng, g.dim()),
                y = random_rat_vector(rng, g.dim()),
                z = random_rat_vector(rng, g.dim());
      CHECK(g.form_value(g.bracket(x, y), z) + g.form_value(y, g.bracket(x, z)) ==
            Rat(0));
      const RatMatrix& th = *g.involution();
      CHECK(g.form_value(th * x, th * y) == g.form_value(x, y));
      CHECK(g.bracket(th * x, th * y) == RatVector(th * g.bracket(x, y)));
    }
  }
}

TEST_CASE("construction rejects invalid structure constants") {
  // sl2 with [E,F] corrupted: Jacobi fails.
  std::vector<std::vector<RatVector>> c(3,
                                        std::vector<RatVector>(3, RatVector::Zero(3)));
  auto set = [&](int i, int j, int k, long val) {
    c[i][j](k) = rat(val);
    c[j][i](k) = rat(-val);
  };
  set(0, 1, 1, 2);
  set(0, 2, 2, -2);
  set(1, 2, 1, 1);  // should be [E,F]=H; this breaks Jacobi
  RatMatrix form(3, 3);
  form << 2, 0, 0, 0, 0, 1, 0, 1, 0;
  CHECK_THROWS_AS(StructuredLieAlgebra(3, {"H", "E", "F"}, c, form),
                  std::invalid_argument);
}

TEST_CASE("sl2 root decomposition under the Cartan") {
  StructuredLieAlgebra g = sl2();
  RationalSubspace a = RationalSubspace::from_vectors({g.basis_vector(0)}, 3);
  auto roots = root_decomposition(g, a);
  REQUIRE(roots.size() == 3);
  // Sorted by weight: -2, 0, 2.
  CHECK(roots[0].root.eval(g.basis_vector(0)) == Rat(-2));
  CHECK(roots[0].space ==
        RationalSubspace::from_vectors({g.basis_vector(2)}, 3));
  CHECK(roots[1].root.is_zero());
  CHECK(roots[1].space == a);
  CHECK(roots[2].root.eval(g.basis_vector(0)) == Rat(2));
  CHECK(roots[2].space ==
        RationalSubspace::from_vectors({g.basis_vector(1)}, 3));
}

TEST_CASE("trivial torus gives the whole algebra as zero space") {
  StructuredLieAlgebra g = sl2();
  auto roots = root_decomposition(g, RationalSubspace(3));
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].root.is_zero());
  CHECK(roots[0].space == RationalSubspace::full(3));
}

TEST_CASE("sl2+sl2 root decomposition under the product Cartan") {
  StructuredLieAlgebra g = sl2_times_sl2();
  RationalSubspace a = RationalSubspace::from_vectors(
      {g.basis_vector(0), g.basis_vector(3)}, 6);
  auto roots = root_decomposition(g, a);
  REQUIRE(roots.size() == 5);
  Eigen::Index zero_dim = 0;
  int nonzero = 0;
  for (const auto& rs : roots) {
    if (rs.root.is_zero())
      zero_dim = rs.space.dim();
    else {
      ++nonzero;
      CHECK(rs.space.dim() == 1);
    }
  }
  CHECK(zero_dim == 2);
  CHECK(nonzero == 4);
}

TEST_CASE("sl3 and sl4 root decompositions have the right shape") {
  for (int n : {3, 4}) {
    StructuredLieAlgebra g = sln(n);
    std::vector<RatVector> cartan;
    for (int i = 0; i < n - 1; ++i) cartan.push_back(g.basis_vector(i));
    RationalSubspace a = RationalSubspace::from_vectors(cartan, g.dim());
    auto roots = root_decomposition(g, a);
    CHECK(static_cast<int>(roots.size()) == n * (n - 1) + 1);
    for (const auto& rs : roots)
      if (rs.root.is_zero()) CHECK(rs.space == a);
  }
}

TEST_CASE("non-semisimple torus action is rejected") {
  StructuredLieAlgebra g = sl2();
  // span(E) is abelian but ad(E) is nilpotent and nonzero.
  RationalSubspace e = RationalSubspace::from_vectors({g.basis_vector(1)}, 3);
  CHECK_THROWS_AS(root_decomposition(g, e), NonSemisimpleAction);
}

TEST_CASE("subspace algebra matches brute-force membership") {
  StructuredLieAlgebra g = sln(3);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RatVector> va, vb;
    for (int i = 0; i < 3; ++i) va.push_back(random_rat_vector(rng, g.dim()));
    for (int i = 0; i < 3; ++i) vb.push_back(random_rat_vector(rng, g.dim()));
    RationalSubspace A = RationalSubspace::from_vectors(va, g.dim());
    RationalSubspace B = RationalSubspace::from_vectors(vb, g.dim());
    RationalSubspace S = sum(A, B), I = intersection(A, B);
    CHECK(S.dim() + I.dim() == A.dim() + B.dim());
    CHECK(S.contains(A));
    CHECK(S.contains(B));
    CHECK(A.contains(I));
    CHECK(B.contains(I));
    // Random members of A+B decompose; random members of I are in both.
    for (int k = 0; k < 5; ++k) {
      RatVector ca = random_rat_vector(rng, A.dim());
      RatVector cb = random_rat_vector(rng, B.dim());
      CHECK(S.contains(
          RatVector(A.basis().transpose() * ca + B.basis().transpose() * cb)));
      if (I.dim() > 0) {
        RatVector ci = random_rat_vector(rng, I.dim());
        RatVector w = I.basis().transpose() * ci;
        CHECK(A.contains(w));
        CHECK(B.contains(w));
      }
    }
  }
}

TEST_CASE("orth_complement follows the stated semantics") {
  StructuredLieAlgebra g = sl2();
  RatVector H = g.basis_vector(0), E = g.basis_vector(1),
            F = g.basis_vector(2);
  RationalSubspace l = RationalSubspace::from_vectors({H}, 3);
  RationalSubspace zero(3);
  // Complement of 0 inside span(H) is span(H).
  CHECK(orth_complement(zero, l, g.form()) == l);
  // Inside g, the form-orthogonal of span(H) is span(E, F).
  RationalSubspace efs = RationalSubspace::from_vectors({E, F}, 3);
  CHECK(orth_complement(l, RationalSubspace::full(3), g.form()) == efs);
  // sum(span E, span F) ∩ span H = 0.
  CHECK(intersection(efs, l).dim() == 0);
  // is_subalgebra on the compact line.
  CHECK(g.is_subalgebra(RationalSubspace::from_vectors({RatVector(E - F)}, 3)));
}

TEST_CASE("JSON round trip preserves the algebra") {
  for (const StructuredLieAlgebra& g : {sl2(), sln(3)}) {
    StructuredLieAlgebra h = lie_algebra_from_json(lie_algebra_to_json(g));
    CHECK(h.dim() == g.dim());
    CHECK(h.form() == g.form());
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      RatVector x = random_rat_vector(rng, g.dim()),
                y = random_rat_vector(rng, g.dim());
      CHECK(h.bracket(x, y) == g.bracket(x, y));
    }
  }
}

TEST_CASE("rational root finding on exact characteristic polynomials") {
  StructuredLieAlgebra g = sl2();
  RatMatrix adH = g.ad(g.basis_vector(0));
  auto poly = characteristic_polynomial(adH);  // x(x-2)(x+2) = x^3 - 4x
  REQUIRE(poly.size() == 4);
  CHECK(poly[0] == Rat(0));
  CHECK(poly[1] == Rat(-4));
  CHECK(poly[2] == Rat(0));
  CHECK(poly[3] == Rat(1));
  int tail = 1;
  auto roots = rational_roots(poly, &tail);
  CHECK(tail == 0);
  REQUIRE(roots.size() == 3);
}
