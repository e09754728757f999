#pragma once

#include "qgeo/moments.hpp"
#include "qgeo/types.hpp"

namespace qgeo {

/// Canonical parametrization of the ten second-order moments: four canonical
/// pairs (s_x, p_sx), (s_y, p_sy), (alpha, p_alpha), (beta, p_beta) plus the
/// two Casimir momenta C1, C2. The conjugates of C1, C2 are cyclic and not
/// stored.
struct CanonicalChart {
  double s_x = 1.0;
  double p_s_x = 0.0;
  double s_y = 1.0;
  double p_s_y = 0.0;
  double alpha = 0.0;
  double p_alpha = 0.0;
  double beta = 1.5707963267948966;  // pi/2
  double p_beta = 0.0;
  double C1 = 0.70710678118654752;   // hbar/sqrt(2) floor at hbar = 1
  double C2 = 0.0;
  double hbar = 1.0;
};

/// Single-mode restriction: Delta(x^2) = s^2, Delta(xp) = s p_s,
/// Delta(p^2) = p_s^2 + U/s^2 with Casimir U = p_q^2 hbar^2/4, p_q >= 1.
struct SingleModeChart {
  double s = 1.0;
  double p_s = 0.0;
  double U = 0.25;
  double p_q = 1.0;
  double hbar = 1.0;
};

/// Characteristic square root sqrt((C1^2-4 p_alpha^2)^2 - (C1^4-C2^4)).
/// Radicands in [-tol, 0) clamp to zero; below -tol is a DomainError.
/// Default tol = 1e-12 * C1^4.
double sqrt_P(double p_alpha, double C1, double C2);
double sqrt_P(double p_alpha, double C1, double C2, double tol);

/// d sqrt(P) / d p_alpha (analytic); zero on the sqrt(P) = 0 stratum.
double sqrt_P_dpalpha(double p_alpha, double C1, double C2);

struct ChartResult {
  CanonicalChart chart;
  /// sqrt(P) = 0: the angle alpha is pure gauge and was set to zero.
  bool alpha_gauge_undefined = false;
};

/// Guards (see chart.cpp for the paper-gap choices).
inline constexpr double kEpsBeta = 1e-8;          // on sin(beta)
inline constexpr double kEpsDetRel = 1e-12;       // on D(x^2)D(y^2)-D(xy)^2, relative
inline constexpr double kGaugeRel = 1e-10;        // sqrt(P) <= kGaugeRel*C1^2 -> alpha gauge

/// Validates the chart invariants: positive radii, 0 < beta < pi, the
/// two-mode Casimir floor C1^2 >= hbar^2/2, the ordering C1 > |C2|, and a
/// nonnegative sqrt(P) radicand. Throws DomainError / NonPhysicalError.
void check_chart_invariants(const CanonicalChart& chart);

/// Forward map: canonical chart -> ten moments.
MomentVector chart_to_moments(const CanonicalChart& chart);

/// Inverse map: ten moments -> canonical chart. C1, C2 are taken from the
/// symplectic eigenvalues of the covariance matrix; alpha is reconstructed
/// from the three momentum-moment equations (atan2 of the consistent
/// sin/cos pair). Throws SingularityError at perfect correlation.
ChartResult moments_to_chart(const MomentVector& delta, double hbar);

SingleModeChart single_mode_chart(double dx2, double dxp, double dp2, double hbar);

/// The two single-mode uncertainty products as functions on the chart,
/// U_x = D(x^2)D(px^2) - D(xpx)^2 and the y analog.
struct UncertaintyPair {
  double u_x = 0.0;
  double u_y = 0.0;
};
UncertaintyPair uncertainty_invariants(const CanonicalChart& chart);

}  // namespace qgeo
