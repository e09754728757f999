#include "qgeo/chart.hpp"

#include <cmath>

#include "qgeo/errors.hpp"
#include "qgeo/info.hpp"

namespace qgeo {

double sqrt_P(double p_alpha, double C1, double C2, double tol) {
  // Expanded form of (C1^2 - 4 p_alpha^2)^2 - (C1^4 - C2^4): the C1^4
  // cancellation is removed so the Gaussian stratum (p_alpha = 0, C2 = 0)
  // gives exactly zero.
  const double pa2 = p_alpha * p_alpha;
  const double radicand =
      C2 * C2 * C2 * C2 - 8.0 * pa2 * (C1 * C1 - 2.0 * pa2);
  if (radicand < -tol)
    throw DomainError("sqrt(P): negative radicand (unphysical canonical point)");
  return std::sqrt(std::max(radicand, 0.0));
}

double sqrt_P(double p_alpha, double C1, double C2) {
  return sqrt_P(p_alpha, C1, C2, 1e-12 * std::pow(C1, 4));
}

double sqrt_P_dpalpha(double p_alpha, double C1, double C2) {
  const double rp = sqrt_P(p_alpha, C1, C2);
  if (rp == 0.0) return 0.0;
  const double rho = C1 * C1 - 4.0 * p_alpha * p_alpha;
  return -8.0 * p_alpha * rho / rp;
}

void check_chart_invariants(const CanonicalChart& ch) {
  if (ch.s_x <= 0 || ch.s_y <= 0)
    throw DomainError("chart: s_x, s_y must be positive");
  if (!(ch.beta > 0 && ch.beta < M_PI) || std::sin(ch.beta) < kEpsBeta)
    throw SingularityError("chart: beta must lie in (0, pi) with sin(beta) above guard");
  const double tol = default_psd_tol(ch.hbar);
  if (ch.C1 * ch.C1 < 0.5 * ch.hbar * ch.hbar - tol)
    throw NonPhysicalError("chart: C1^2 below the two-mode floor hbar^2/2");
  if (std::abs(ch.C2) >= ch.C1)
    throw NonPhysicalError("chart: |C2| must be strictly below C1");
  sqrt_P(ch.p_alpha, ch.C1, ch.C2);  // DomainError on a negative radicand
}

MomentVector chart_to_moments(const CanonicalChart& ch) {
  const double sb = std::sin(ch.beta);
  const double cb = std::cos(ch.beta);
  if (sb < kEpsBeta)
    throw SingularityError("chart_to_moments: sin(beta) below guard");
  if (ch.s_x <= 0 || ch.s_y <= 0)
    throw DomainError("chart_to_moments: s_x, s_y must be positive");

  const double rp = sqrt_P(ch.p_alpha, ch.C1, ch.C2);
  const double rho = ch.C1 * ch.C1 - 4.0 * ch.p_alpha * ch.p_alpha;
  const double sx = ch.s_x, sy = ch.s_y;
  const double pa = ch.p_alpha, pb = ch.p_beta;
  const double al = ch.alpha;
  const double csc2 = 1.0 / (sb * sb);

  MomentVector d{};
  d[0] = sx * sx;
  d[1] = sx * ch.p_s_x;
  d[3] = sy * sy;
  d[4] = sy * ch.p_s_y;
  d[6] = sx * sy * cb;
  d[7] = sx * ch.p_s_y * cb - sb * (sx / sy) * (pa + pb);
  d[8] = sy * ch.p_s_x * cb + sb * (sy / sx) * (pa - pb);
  d[2] = ch.p_s_x * ch.p_s_x + (pa - pb) * (pa - pb) / (sx * sx) +
         0.5 * csc2 / (sx * sx) * (rho - rp * std::sin(al + ch.beta));
  d[5] = ch.p_s_y * ch.p_s_y + (pa + pb) * (pa + pb) / (sy * sy) +
         0.5 * csc2 / (sy * sy) * (rho - rp * std::sin(al - ch.beta));
  d[9] = (ch.p_s_x * ch.p_s_y + (pa * pa - pb * pb) / (sx * sy)) * cb +
         ((ch.p_s_y / sx) * (pa - pb) - (ch.p_s_x / sy) * (pb + pa)) * sb -
         0.5 * csc2 / (sx * sy) * (rho * cb - rp * std::sin(al));
  return d;
}

ChartResult moments_to_chart(const MomentVector& d, double hbar) {
  if (d[0] <= 0 || d[3] <= 0)
    throw DomainError("moments_to_chart: position variances must be positive");

  const double sx = std::sqrt(d[0]);
  const double sy = std::sqrt(d[3]);
  const double psx = d[1] / sx;
  const double psy = d[4] / sy;

  const double det_x = d[0] * d[3] - d[6] * d[6];
  if (det_x <= kEpsDetRel * d[0] * d[3])
    throw SingularityError("moments_to_chart: perfect x-y correlation (beta undefined)");

  const double cb = d[6] / (sx * sy);
  const double beta = std::acos(std::clamp(cb, -1.0, 1.0));
  const double sb = std::sin(beta);
  if (sb < kEpsBeta)
    throw SingularityError("moments_to_chart: sin(beta) below guard");

  const double den = 2.0 * std::sqrt(det_x);  // = 2 s_x s_y sin(beta)
  const double pa = (d[6] * (d[4] - d[1]) + d[0] * d[8] - d[3] * d[7]) / den;
  const double pb = (d[6] * (d[4] + d[1]) - d[0] * d[8] - d[3] * d[7]) / den;

  // Casimirs from the symplectic eigenvalues of sigma.
  MomentState st;
  st.delta = d;
  st.hbar = hbar;
  const auto [C1, C2] =
      casimirs_from_sigma(covariance_from_moments(st, Ordering::ModeOrdered));

  ChartResult out;
  out.chart = CanonicalChart{sx, psx, sy, psy, 0.0, pa, beta, pb, C1, C2, hbar};

  const double rp = sqrt_P(pa, C1, C2, 1e-10 * std::pow(C1, 4));
  if (rp <= kGaugeRel * C1 * C1) {
    out.alpha_gauge_undefined = true;
    return out;
  }

  // Solve the three momentum-moment relations for (sin alpha, cos alpha).
  const double rho = C1 * C1 - 4.0 * pa * pa;
  const double sb2 = sb * sb;
  const double rx = rho - 2.0 * d[0] * sb2 * (d[2] - psx * psx - (pa - pb) * (pa - pb) / d[0]);
  const double ry = rho - 2.0 * d[3] * sb2 * (d[5] - psy * psy - (pa + pb) * (pa + pb) / d[3]);
  const double rxy = rho * cb +
      2.0 * sx * sy * sb2 *
          (d[9] - (psx * psy + (pa * pa - pb * pb) / (sx * sy)) * cb -
           ((psy / sx) * (pa - pb) - (psx / sy) * (pa + pb)) * sb);
  const double sin_a = rxy / rp;
  const double cos_a = (rx - ry) / (2.0 * sb * rp);
  out.chart.alpha = std::atan2(sin_a, cos_a);
  return out;
}

SingleModeChart single_mode_chart(double dx2, double dxp, double dp2, double hbar) {
  if (dx2 <= 0) throw DomainError("single_mode_chart: Delta(x^2) must be positive");
  const double u = dx2 * dp2 - dxp * dxp;
  const double floor = 0.25 * hbar * hbar;
  const double tol = default_psd_tol(hbar);
  if (u < floor - tol)
    throw UncertaintyError("single_mode_chart: U below hbar^2/4");
  SingleModeChart out;
  out.s = std::sqrt(dx2);
  out.p_s = dxp / out.s;
  out.U = u;
  out.p_q = 2.0 * std::sqrt(std::max(u, floor)) / hbar;
  out.hbar = hbar;
  return out;
}

UncertaintyPair uncertainty_invariants(const CanonicalChart& ch) {
  const double sb = std::sin(ch.beta);
  if (sb < kEpsBeta)
    throw SingularityError("uncertainty_invariants: sin(beta) below guard");
  const double rp = sqrt_P(ch.p_alpha, ch.C1, ch.C2);
  const double rho = ch.C1 * ch.C1 - 4.0 * ch.p_alpha * ch.p_alpha;
  const double csc2 = 1.0 / (sb * sb);
  UncertaintyPair u;
  u.u_x = (ch.p_alpha - ch.p_beta) * (ch.p_alpha - ch.p_beta) +
          0.5 * csc2 * (rho - rp * std::sin(ch.alpha + ch.beta));
  u.u_y = (ch.p_alpha + ch.p_beta) * (ch.p_alpha + ch.p_beta) +
          0.5 * csc2 * (rho - rp * std::sin(ch.alpha - ch.beta));
  return u;
}

}  // namespace qgeo
