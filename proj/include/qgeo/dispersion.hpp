#pragma once

#include "qgeo/types.hpp"

namespace qgeo {

/// Embedded constants for bound arithmetic in MeV-flavored units.
/// Sources: CODATA 2018 / PDG 2024.
namespace constants {
inline constexpr double planck_mass_MeV = 1.220890e22;     // M_P c^2 [MeV]
inline constexpr double cesium133_mass_MeV = 123800.645;   // 132.905451961 u
inline constexpr double hydrogen_mass_MeV = 938.783;       // 1.00782503 u
inline constexpr double boltzmann_MeV_per_K = 8.617333262e-11;
inline constexpr double amu_MeV = 931.49410242;
}  // namespace constants

struct DispersionInput {
  double m = 1.0;              // rest mass (energy/c^2 units)
  Vec3 p_vec = Vec3::Zero();   // 3-momentum
  double sigma_p_trace = 0.0;  // delta^{ij} Delta(p_i p_j)
  double c = 1.0;
  double M_P = constants::planck_mass_MeV;
  double xi2_max = 1e9;
};

/// m_eff = sqrt(m^2 + trace/c^2): momentum fluctuations act as inertia.
double effective_mass(double m, double sigma_p_trace, double c);

struct NonRelExpansion {
  double E0 = 0.0;    // m c^2
  double E2 = 0.0;    // |p|^2 / 2m
  double E2q = 0.0;   // trace / 2m
  double E4 = 0.0;    // -|p|^2 trace / (4 m^3 c^2), relativistic cross term
  double sum = 0.0;
  double exact = 0.0;  // c sqrt(m^2 c^2 + |p|^2 + trace)
  bool expansion_warning = false;  // (|p|^2 + trace)/(m c)^2 > 0.1
};

/// Leading terms of E = c sqrt(m^2 c^2 + |p|^2 + trace). The cross term
/// carries the sign of the exact square-root branch, so |sum - exact| is
/// fourth order in |p| at fixed trace.
NonRelExpansion nonrel_expansion(const DispersionInput& in);

/// Bound on delta^{ij} Delta(p_i p_j) implied by |xi_2| < xi2_max:
///   trace < xi2_max * 2 m^2 c^2 * (m / M_P).
double xi2_fluctuation_bound(double m, double M_P, double xi2_max, double c);

/// Momentum spread of a thermal distribution, sigma_p^2 = m k_B T.
/// With m in MeV/c^2 and k_B T in MeV the result is in MeV^2/c^2.
double thermal_spread(double m, double kBT);

}  // namespace qgeo
