#include "qgeo/dispersion.hpp"

#include <cmath>

#include "qgeo/errors.hpp"

namespace qgeo {

double effective_mass(double m, double sigma_p_trace, double c) {
  const double rad = m * m + sigma_p_trace / (c * c);
  if (rad < 0) throw DomainError("effective_mass: negative radicand");
  return std::sqrt(rad);
}

NonRelExpansion nonrel_expansion(const DispersionInput& in) {
  const double m = in.m, c = in.c;
  if (m <= 0) throw DomainError("nonrel_expansion: massive branch needs m > 0");
  const double p2 = in.p_vec.squaredNorm();
  const double tr = in.sigma_p_trace;
  NonRelExpansion out;
  out.E0 = m * c * c;
  out.E2 = p2 / (2.0 * m);
  out.E2q = tr / (2.0 * m);
  out.E4 = -p2 * tr / (4.0 * m * m * m * c * c);
  out.sum = out.E0 + out.E2 + out.E2q + out.E4;
  out.exact = c * std::sqrt(m * m * c * c + p2 + tr);
  out.expansion_warning = (p2 + tr) / (m * m * c * c) > 0.1;
  return out;
}

double xi2_fluctuation_bound(double m, double M_P, double xi2_max, double c) {
  if (m <= 0 || M_P <= 0) throw DomainError("xi2_fluctuation_bound: positive inputs required");
  return xi2_max * 2.0 * m * m * c * c * (m / M_P);
}

double thermal_spread(double m, double kBT) {
  if (kBT < 0) throw DomainError("thermal_spread: temperature must be nonnegative");
  return m * kBT;
}

}  // namespace qgeo
