#include <doctest.h>

#include <random>

#include "sph/cones.hpp"

using namespace sph;

namespace {

RatVector rv(std::initializer_list<long> entries) {
  return rat_vector(entries);
}

RatVector random_int_vector(std::mt19937_64& rng, Eigen::Index n, long lo,
                            long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  RatVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rat(d(rng));
  return v;
}

}  // namespace

TEST_CASE("dual of the first orthant is the first orthant") {
  RationalCone orthant = RationalCone::from_generators(
      3, {rv({1, 0, 0}), rv({0, 1, 0}), rv({0, 0, 1})});
  CHECK(dual_cone(orthant) == orthant);
  CHECK(orthant.is_simplicial());
  CHECK(orthant.dim() == 3);
}

TEST_CASE("halfline from a scaled inequality") {
  // {x : 2a(x) <= 0} in dim 1 with a = 2*coordinate: ray -e1.
  RationalCone c = RationalCone::from_halfspaces(1, {rv({-4})});
  REQUIRE(c.rays().size() == 1);
  CHECK(c.rays()[0] == rv({-1}));
  CHECK(c.lineality().empty());
}

TEST_CASE("dual of dual is the identity on random 3-dim cones") {
  std::mt19937_64 rng(31);
  int nontrivial = 0;
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<RatVector> gens;
    int count = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < count; ++i)
      gens.push_back(random_int_vector(rng, 3, -4, 4));
    RationalCone c = RationalCone::from_generators(3, gens);
    RationalCone dd = dual_cone(dual_cone(c));
    CHECK(dd == c);
    if (!c.rays().empty()) ++nontrivial;

    // Brute-force membership oracle for the dual: y in C* iff y.g >= 0
    // for every original generator.
    RationalCone d = dual_cone(c);
    for (int s = 0; s < 30; ++s) {
      RatVector y = random_int_vector(rng, 3, -6, 6);
      bool oracle = true;
      for (const RatVector& g : gens)
        if (y.dot(g) < 0) {
          oracle = false;
          break;
        }
      CHECK((d.contains(y) != RationalCone::Position::outside) == oracle);
    }
  }
  CHECK(nontrivial > 0);
}

TEST_CASE("containment agrees with generator combinations") {
  std::mt19937_64 rng(47);
  RationalCone c = RationalCone::from_generators(
      3, {rv({1, 1, 0}), rv({1, -1, 0}), rv({0, 0, 1})});
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<long> coeff(0, 7);
    RatVector x = coeff(rng) * c.rays()[0] + coeff(rng) * c.rays()[1] +
                  coeff(rng) * c.rays()[2];
    CHECK(c.contains(x) != RationalCone::Position::outside);
  }
  CHECK(c.contains(rv({1, 0, 1})) == RationalCone::Position::interior);
  CHECK(c.contains(rv({1, 1, 0})) == RationalCone::Position::boundary);
  CHECK(c.contains(rv({-1, 0, 0})) == RationalCone::Position::outside);
}

TEST_CASE("faces of a cone") {
  RationalCone c = RationalCone::from_generators(
      2, {rv({1, 0}), rv({1, 2})});
  // Functional vanishing on ray (1,0), positive on (1,2).
  RationalCone f = face(c, rv({0, 1}));
  REQUIRE(f.rays().size() == 1);
  CHECK(f.rays()[0] == rv({1, 0}));
  CHECK(is_face_of(c, f));
  CHECK(is_face_of(c, c));
  CHECK(is_face_of(c, RationalCone::zero(2)));
  CHECK_THROWS_AS(face(c, rv({0, -1})), std::invalid_argument);
}

TEST_CASE("zero and full cones") {
  RationalCone z = RationalCone::zero(2);
  CHECK(z.dim() == 0);
  CHECK(z.contains(rv({0, 0})) == RationalCone::Position::interior);
  CHECK(z.contains(rv({1, 0})) == RationalCone::Position::outside);
  RationalCone full = RationalCone::full(2);
  CHECK(full.dim() == 2);
  CHECK(full.lineality().size() == 2);
  CHECK(full.contains(rv({-3, 5})) == RationalCone::Position::interior);
  CHECK(dual_cone(full) == z);
  CHECK(dual_cone(z) == full);
}

TEST_CASE("subdivision of a simplicial cone is the cone itself") {
  RationalCone c = RationalCone::from_generators(2, {rv({1, 0}), rv({1, 3})});
  Fan fan = simplicial_subdivision(c);
  REQUIRE(fan.cones.size() == 1);
  CHECK(fan.cones[0] == c);
  CHECK_FALSE(fan.smooth[0]);  // det((1,0),(1,3)) = 3
}

TEST_CASE("full supports give orthant fans") {
  for (Eigen::Index n : {2, 3}) {
    Fan fan = simplicial_subdivision(RationalCone::full(n));
    CHECK(fan.cones.size() == (size_t{1} << n));
    for (bool s : fan.smooth) CHECK(s);
  }
}

TEST_CASE("cone over a square splits into two simplicial cones") {
  RationalCone c = RationalCone::from_generators(
      3, {rv({1, 1, 1}), rv({1, -1, 1}), rv({-1, 1, 1}), rv({-1, -1, 1})});
  CHECK(c.rays().size() == 4);
  CHECK_FALSE(c.is_simplicial());
  Fan fan = simplicial_subdivision(c);
  CHECK(fan.cones.size() == 2);
  // Sampled union check: nonnegative generator combinations land in a cone.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> coeff(0, 5);
  for (int trial = 0; trial < 500; ++trial) {
    RatVector x = RatVector::Zero(3);
    for (const RatVector& r : c.rays()) x += rat(coeff(rng)) * r;
    bool inside = false;
    for (const RationalCone& fc : fan.cones)
      if (fc.contains(x) != RationalCone::Position::outside) inside = true;
    CHECK(inside);
  }
}

TEST_CASE("fan verification rejects a broken fan") {
  // Two overlapping full-dimensional cones that do not meet in a face.
  Fan bad;
  bad.support = RationalCone::from_generators(2, {rv({1, 0}), rv({0, 1})});
  bad.cones.push_back(
      RationalCone::from_generators(2, {rv({1, 0}), rv({1, 2})}));
  bad.cones.push_back(
      RationalCone::from_generators(2, {rv({1, 1}), rv({0, 1})}));
  bad.smooth = {true, true};
  CHECK_THROWS_AS(verify_fan(bad), std::runtime_error);
}

TEST_CASE("smoothness flag distinguishes unimodular cones") {
  RationalCone uni = RationalCone::from_generators(2, {rv({1, 0}), rv({1, 1})});
  RationalCone notuni =
      RationalCone::from_generators(2, {rv({1, 0}), rv({1, 2})});
  Fan f1 = simplicial_subdivision(uni);
  Fan f2 = simplicial_subdivision(notuni);
  CHECK(f1.smooth[0]);
  CHECK_FALSE(f2.smooth[0]);
}

TEST_CASE("compression subcones for a rank-one spherical root") {
  // d = 1, S = {2a} with a(H) = 2, so the root row is (4).
  std::vector<RatRowVector> S{RatRowVector::Constant(1, rat(4))};
  CompressionSubcones empty_I = compression_subcones(1, S, {});
  CHECK(empty_I.a_I == RationalSubspace::full(1));
  REQUIRE(empty_I.a_I_cone.rays().size() == 1);
  CHECK(empty_I.a_I_cone.rays()[0] == rv({-1}));
  CHECK(empty_I.a_I_cone.contains(rv({-2})) ==
        RationalCone::Position::interior);
  CHECK(empty_I.edge == RationalCone::zero(1));

  CompressionSubcones full_I = compression_subcones(1, S, {0});
  CHECK(full_I.a_I.dim() == 0);
  CHECK(full_I.a_I_cone == RationalCone::zero(1));
}

TEST_CASE("toric limit in a one-dimensional chart") {
  Fan fan = simplicial_subdivision(
      RationalCone::from_generators(1, {rv({-1})}));
  std::vector<RatRowVector> psi{RatRowVector::Constant(1, rat(4))};
  ToricLimit lim = toric_limit(fan, rv({-1}), psi);
  CHECK(lim.exists);
  REQUIRE(lim.limit_pattern.size() == 1);
  CHECK(lim.rate == Rat(4));
  CHECK_THROWS_AS(toric_limit(fan, rv({1}), psi), ChartMismatch);
}

TEST_CASE("toric limit exists everywhere on a complete fan") {
  Fan fan = simplicial_subdivision(RationalCone::full(2));
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    RatVector x = random_int_vector(rng, 2, -9, 9);
    bool inside = false;
    for (const RationalCone& fc : fan.cones)
      if (fc.contains(x) != RationalCone::Position::outside) inside = true;
    CHECK(inside);
  }
}
