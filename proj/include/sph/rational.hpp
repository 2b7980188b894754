#pragma once

// Exact rational scalar for the structure-theory kernel. All discrete decisions
// (root spaces, cones, spherical roots, degenerations) are made over Q; floating
// point is reserved for the numerical constant-term engine.

#include <gmpxx.h>

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};

}  // namespace Eigen

namespace sph {

using Rat = mpq_class;
using Int = mpz_class;

using RatMatrix = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using RatVector = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;
using RatRowVector = Eigen::Matrix<Rat, 1, Eigen::Dynamic>;

inline Rat rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Accepts "p", "p/q", and plain decimal integers with sign.
inline Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0)
    throw std::invalid_argument("cannot parse rational: " + s);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

inline double to_double(const Rat& r) { return r.get_d(); }

inline RatVector rat_vector(std::initializer_list<long> entries) {
  RatVector v(static_cast<Eigen::Index>(entries.size()));
  Eigen::Index i = 0;
  for (long e : entries) v(i++) = rat(e);
  return v;
}

// Scales a rational vector to a primitive integer vector (gcd of entries 1),
// preserving direction.
inline RatVector primitive(const RatVector& v) {
  Int lcm_den = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    lcm_den = lcm(lcm_den, v(i).get_den());
  RatVector w = v * Rat(lcm_den);
  Int g = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) g = gcd(g, w(i).get_num());
  if (g != 0) w /= Rat(g);
  return w;
}

}  // namespace sph
