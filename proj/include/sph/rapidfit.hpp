#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sph {

struct LimitMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FactorizationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A family of points with a candidate limit, sampled on an increasing grid;
// the object of the rapid-convergence definition ||x_s - l|| <= C e^{-eps s}.
struct DecayFamily {
  std::vector<double> s;
  std::vector<Eigen::VectorXd> x;
  Eigen::VectorXd limit;
};

struct RapidFit {
  double epsilon = 0.0;
  double C = 0.0;
  double r_squared = 0.0;
  bool is_rapid = false;
  bool exact = false;  // distances at working precision throughout
};

// Least squares on log||x_s - l|| over the tail half of the grid; is_rapid
// requires a positive rate, r_squared >= 0.99 and the pointwise bound
// ||x_s - l|| <= (C * 1.05) e^{-(0.95 eps) s} on the whole grid. Throws
// LimitMismatch when the distances fail to decrease over the tail.
RapidFit fit_rate(const DecayFamily& family);

// Joint certification of the three convergence families produced by an
// open-orbit factorization (unipotent part, reductive part, torus ratio).
struct OrbitReport {
  RapidFit u;
  RapidFit m;
  RapidFit ab;
  bool pass = false;
};
OrbitReport orbit_asymptotics(const DecayFamily& u_family,
                              const DecayFamily& m_family,
                              const DecayFamily& ab_family);

}  // namespace sph
