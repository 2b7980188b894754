#include "sph/rapidfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sph {

RapidFit fit_rate(const DecayFamily& family) {
  if (family.s.size() != family.x.size() || family.s.size() < 8)
    throw std::invalid_argument("fit_rate needs >= 8 matching grid points");
  for (std::size_t j = 1; j < family.s.size(); ++j)
    if (family.s[j] <= family.s[j - 1])
      throw std::invalid_argument("grid must be strictly increasing");

  const std::size_t n = family.s.size();
  std::vector<double> d(n);
  double scale = 1.0 + family.limit.norm();
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = (family.x[j] - family.limit).norm();
    if (!std::isfinite(d[j]))
      throw std::invalid_argument("family values must be finite");
  }

  RapidFit out;
  double dmax = 0.0;
  for (double v : d) dmax = std::max(dmax, v);
  if (dmax <= 1e-13 * scale) {
    out.exact = true;
    out.is_rapid = true;
    out.epsilon = std::numeric_limits<double>::infinity();
    out.r_squared = 1.0;
    return out;
  }

  const std::size_t start = n / 2;
  if (d.back() >= d[start] * (1.0 - 1e-12) + 1e-15 * scale)
    throw LimitMismatch("distances do not decrease over the tail");

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double m = static_cast<double>(n - start);
  for (std::size_t j = start; j < n; ++j) {
    const double x = family.s[j];
    const double y = std::log(std::max(d[j], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  const double ssr = syy - intercept * sy - slope * sxy;
  const double sst = syy - sy * sy / m;
  out.epsilon = -slope;
  out.C = std::exp(intercept);
  out.r_squared = sst > 0 ? 1.0 - ssr / sst : 1.0;

  bool pointwise = true;
  for (std::size_t j = 0; j < n; ++j)
    if (d[j] > 1.05 * out.C * std::exp(-0.95 * out.epsilon * family.s[j]))
      pointwise = false;
  out.is_rapid = out.epsilon > 0 && out.r_squared >= 0.99 && pointwise;
  return out;
}

OrbitReport orbit_asymptotics(const DecayFamily& u_family,
                              const DecayFamily& m_family,
                              const DecayFamily& ab_family) {
  OrbitReport rep;
  rep.u = fit_rate(u_family);
  rep.m = fit_rate(m_family);
  rep.ab = fit_rate(ab_family);
  rep.pass = rep.u.is_rapid && rep.m.is_rapid && rep.ab.is_rapid;
  return rep;
}

}  // namespace sph
