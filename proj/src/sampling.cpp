#include "qgeo/sampling.hpp"

#include <cmath>

#include "qgeo/errors.hpp"
#include "qgeo/info.hpp"

namespace qgeo {

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

CanonicalChart random_physical_chart(Rng& rng, const ChartSampleOptions& opt) {
  const double h = opt.hbar;
  const double floor_c1sq = 0.5 * h * h;
  for (int attempt = 0; attempt < 10000; ++attempt) {
    CanonicalChart ch;
    ch.hbar = h;
    ch.s_x = rng.uniform(opt.s_lo, opt.s_hi);
    ch.s_y = rng.uniform(opt.s_lo, opt.s_hi);
    ch.p_s_x = rng.uniform(-opt.ps_range, opt.ps_range);
    ch.p_s_y = rng.uniform(-opt.ps_range, opt.ps_range);
    const double beta_lo = std::asin(std::min(opt.sin_beta_min, 0.999));
    ch.beta = rng.uniform(beta_lo, M_PI - beta_lo);
    ch.p_beta = rng.uniform(-opt.ps_range, opt.ps_range) * h;
    const double c1_lo = std::sqrt(floor_c1sq) * opt.C1_lo_factor;
    const double c1_hi = std::sqrt(floor_c1sq) * opt.C1_hi_factor;
    ch.C1 = rng.uniform(c1_lo, c1_hi);
    const double c2sq_max = ch.C1 * ch.C1 - floor_c1sq * 1.05;
    ch.C2 = std::sqrt(rng.uniform(0.0, 0.98) * std::max(c2sq_max, 0.0));
    // inner p_alpha branch keeps the sqrt(P) radicand nonnegative
    const double pamax2 =
        0.25 * (ch.C1 * ch.C1 -
                std::sqrt(std::max(std::pow(ch.C1, 4) - std::pow(ch.C2, 4), 0.0)));
    const double sgn = rng.uniform() < 0.5 ? -1.0 : 1.0;
    ch.p_alpha = sgn * std::sqrt(rng.uniform(0.0, 0.9) * std::max(pamax2, 0.0));
    ch.alpha = rng.uniform(-M_PI, M_PI);

    double rp;
    try {
      rp = sqrt_P(ch.p_alpha, ch.C1, ch.C2);
    } catch (const DomainError&) {
      continue;
    }
    if (rp < opt.sqrtP_min || rp < opt.sqrtP_rel_min * ch.C1 * ch.C1) continue;
    if (std::sin(ch.beta) < opt.sin_beta_min) continue;

    MomentState st;
    st.hbar = h;
    try {
      st.delta = chart_to_moments(ch);
    } catch (const NumericalError&) {
      continue;
    }
    if (!check_physicality(st).pass) continue;
    return ch;
  }
  throw StepFailureError("random_physical_chart: rejection budget exhausted");
}

CovarianceMatrix random_physical_covariance(Rng& rng, double hbar) {
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = 0.5 * rng.normal();
  Mat4 s0 = a * a.transpose() + 0.1 * Mat4::Identity();

  CovarianceMatrix sigma;
  sigma.hbar = hbar;
  sigma.ordering = Ordering::ModeOrdered;
  sigma.entries = s0;
  // rescale so nu_- lands above hbar/2 with a random margin
  const Eigen::Matrix2d sx = s0.block<2, 2>(0, 0);
  const Eigen::Matrix2d sy = s0.block<2, 2>(2, 2);
  const Eigen::Matrix2d sxy = s0.block<2, 2>(0, 2);
  const double seralian = sx.determinant() + sy.determinant() + 2.0 * sxy.determinant();
  const double det = s0.determinant();
  const double disc = std::sqrt(std::max(seralian * seralian - 4.0 * det, 0.0));
  const double nu_m = std::sqrt(std::max(0.5 * (seralian - disc), 1e-300));
  const double target = 0.5 * hbar * (1.0 + rng.uniform(0.05, 1.5));
  sigma.entries *= target / nu_m;
  return sigma;
}

Mat4 random_symplectic(Rng& rng) {
  auto mode_sl2 = [&](int k) {
    const double t1 = rng.uniform(0, 2 * M_PI);
    const double t2 = rng.uniform(0, 2 * M_PI);
    const double r = rng.uniform(-0.6, 0.6);
    auto rot = [](double t) {
      Eigen::Matrix2d m;
      m << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
      return m;
    };
    Eigen::Matrix2d sq = Eigen::Matrix2d::Zero();
    sq(0, 0) = std::exp(r);
    sq(1, 1) = std::exp(-r);
    const Eigen::Matrix2d m2 = rot(t1) * sq * rot(t2);
    Mat4 s = Mat4::Identity();
    s.block<2, 2>(2 * k, 2 * k) = m2;
    return s;
  };
  auto beamsplitter = [&]() {
    const double t = rng.uniform(0, 2 * M_PI);
    const double ct = std::cos(t), st = std::sin(t);
    Mat4 s = Mat4::Zero();
    // acts identically on (x_1, x_2) and (p_1, p_2); mode ordering (x,px,y,py)
    s(0, 0) = ct; s(0, 2) = st; s(2, 0) = -st; s(2, 2) = ct;
    s(1, 1) = ct; s(1, 3) = st; s(3, 1) = -st; s(3, 3) = ct;
    return s;
  };
  auto two_mode_squeeze = [&]() {
    const double r = rng.uniform(-0.5, 0.5);
    const double chr = std::cosh(r), shr = std::sinh(r);
    Mat4 s = Mat4::Zero();
    s(0, 0) = chr; s(0, 2) = shr; s(2, 0) = shr; s(2, 2) = chr;
    s(1, 1) = chr; s(1, 3) = -shr; s(3, 1) = -shr; s(3, 3) = chr;
    return s;
  };
  return mode_sl2(0) * beamsplitter() * two_mode_squeeze() * mode_sl2(1);
}

}  // namespace qgeo
