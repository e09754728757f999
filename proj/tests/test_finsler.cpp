#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qgeo/chart.hpp"
#include "qgeo/finsler.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/sampling.hpp"

using namespace qgeo;

namespace {

// Independent term-by-term evaluation of the moment-form Hamiltonian: written
// directly against the covariance blocks rather than the moment table.
double hq_oracle(const MetricPoint& mp, const Vec4& p, const MomentVector& d,
                 double m, double c) {
  const int xs[2] = {1, 2};
  const double dpp[2][2] = {{d[2], d[9]}, {d[9], d[5]}};
  const double dxp[2][2] = {{d[1], d[7]}, {d[8], d[4]}};
  const double dxx[2][2] = {{d[0], d[6]}, {d[6], d[3]}};
  double acc = m * m * c * c;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) acc += mp.g(a, b) * p[a] * p[b];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      acc += mp.g(xs[i], xs[j]) * dpp[i][j];
      for (int a = 0; a < 4; ++a)
        acc += 2.0 * mp.dg[xs[i]](a, xs[j]) * p[a] * dxp[i][j];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          acc += 0.5 * mp.d2g[xs[i]][xs[j]](a, b) * p[a] * p[b] * dxx[i][j];
    }
  return acc / (2 * m);
}

Vec10 pbar_from_chart(const CanonicalChart& ch, const Vec4& p4) {
  Vec10 p;
  p << p4[0], p4[1], p4[2], p4[3], ch.p_s_x, ch.p_s_y, ch.p_alpha, ch.p_beta,
      ch.C1, ch.C2;
  return p;
}

}  // namespace

TEST_CASE("moment form: classical and weak-dispersion limits") {
  const auto mink = make_minkowski();
  const MetricPoint mp = mink->eval(Vec4::Zero());
  const double m = 1.3, c = 1.0;
  Vec4 p(-1.5, 0.3, 0.1, -0.2);

  MomentVector zero{};
  CHECK(hq_moment_form(mp, p, zero, m, c) ==
        doctest::Approx((p.dot(mp.g * p) + m * m * c * c) / (2 * m)).epsilon(1e-15));

  const MomentVector vac{1, 0, 0.25, 1, 0, 0.25, 0, 0, 0, 0};
  CHECK(hq_moment_form(mp, p, vac, m, c) ==
        doctest::Approx((p.dot(mp.g * p) + m * m * c * c + 0.5) / (2 * m)).epsilon(1e-15));
}

TEST_CASE("moment form matches the independent term-by-term oracle") {
  const auto schw = make_schwarzschild_isotropic(1.0);
  Rng rng(101);
  for (int t = 0; t < 30; ++t) {
    const Vec4 x(0, rng.uniform(4.0, 20.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
    const MetricPoint mp = schw->eval(x);
    MomentVector d;
    for (auto& v : d) v = rng.uniform(-0.3, 0.8);
    Vec4 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(hq_moment_form(mp, p, d, 1.0, 1.0) ==
          doctest::Approx(hq_oracle(mp, p, d, 1.0, 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("b tensor: minkowski at beta = pi/2") {
  const MetricPoint mp = make_minkowski()->eval(Vec4::Zero());
  const double sx = 1.3, sy = 0.8;
  const Mat10 b = b_tensor(mp, sx, sy, M_PI / 2);
  CHECK((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // D and E blocks vanish on a flat background; C needs g^{xy} and vanishes too
  for (int a = 0; a < 4; ++a)
    for (int q = PSX; q <= PBETA; ++q) CHECK(b(a, q) == 0.0);
  CHECK(b(PSX, PALPHA) == 0.0);
  CHECK(b(PSX, PBETA) == 0.0);
  CHECK(b(PSY, PALPHA) == 0.0);
  CHECK(b(PSY, PBETA) == 0.0);
  // Theta block pattern
  const double gxx = 1.0, gyy = 1.0;
  CHECK(b(PALPHA, PALPHA) == doctest::Approx(-gxx / (sx * sx) - gyy / (sy * sy)));
  CHECK(b(PALPHA, PBETA) == doctest::Approx(gyy / (sy * sy) - gxx / (sx * sx)));
  CHECK(b(PBETA, PBETA) == doctest::Approx(gxx / (sx * sx) + gyy / (sy * sy)));
  CHECK(b(C1, C1) == doctest::Approx(0.5 * (gxx / (sx * sx) + gyy / (sy * sy))));
  // C2 row and column identically zero
  CHECK(b.row(C2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.col(C2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("b tensor at beta = pi/2 matches the special-form matrix entry by entry") {
  // independent construction of the aligned-slicing pattern on a curved field
  const auto field = make_vortical_test(0.05, 0.8);
  const Vec4 x(0, 0.6, -0.3, 0.2);
  const MetricPoint mp = field->eval(x);
  Rng rng(103);
  const double sx = rng.uniform(0.5, 2.0), sy = rng.uniform(0.5, 2.0);
  const Mat10 b = b_tensor(mp, sx, sy, M_PI / 2);

  Mat10 expect = Mat10::Zero();
  expect.block<4, 4>(0, 0) =
      mp.g + 0.5 * (sx * sx * mp.d2g[1][1] + sy * sy * mp.d2g[2][2]);
  for (int a = 0; a < 4; ++a) {
    expect(a, PSX) = expect(PSX, a) = sx * mp.dg[1](1, a);
    expect(a, PSY) = expect(PSY, a) = sy * mp.dg[2](2, a);
    expect(a, PALPHA) = expect(PALPHA, a) =
        (sy / sx) * mp.dg[2](1, a) - (sx / sy) * mp.dg[1](2, a);
    expect(a, PBETA) = expect(PBETA, a) =
        -(sy / sx) * mp.dg[2](1, a) - (sx / sy) * mp.dg[1](2, a);
  }
  expect(PSX, PSX) = mp.g(1, 1);
  expect(PSY, PSY) = mp.g(2, 2);
  expect(PSX, PALPHA) = expect(PALPHA, PSX) = -mp.g(1, 2) / sy;
  expect(PSX, PBETA) = expect(PBETA, PSX) = -mp.g(1, 2) / sy;
  expect(PSY, PALPHA) = expect(PALPHA, PSY) = mp.g(1, 2) / sx;
  expect(PSY, PBETA) = expect(PBETA, PSY) = -mp.g(1, 2) / sx;
  expect(PALPHA, PALPHA) = -mp.g(1, 1) / (sx * sx) - mp.g(2, 2) / (sy * sy);
  expect(PALPHA, PBETA) = expect(PBETA, PALPHA) =
      mp.g(2, 2) / (sy * sy) - mp.g(1, 1) / (sx * sx);
  expect(PBETA, PBETA) = mp.g(1, 1) / (sx * sx) + mp.g(2, 2) / (sy * sy);
  expect(C1, C1) = 0.5 * (mp.g(1, 1) / (sx * sx) + mp.g(2, 2) / (sy * sy));

  CHECK((b - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("metric ellipsoid determinant") {
  const auto field = make_vortical_test(0.05, 0.3);
  const MetricPoint mp = field->eval(Vec4(0, 0.4, 0.9, 0));
  Rng rng(107);
  for (int t = 0; t < 10; ++t) {
    const double sx = rng.uniform(0.5, 2.0), sy = rng.uniform(0.5, 2.0);
    const double beta = rng.uniform(0.3, M_PI - 0.3);
    const Mat10 b = b_tensor(mp, sx, sy, beta);
    const Eigen::Matrix2d gt = b.block<2, 2>(PSX, PSX);
    CHECK(gt.determinant() ==
          doctest::Approx(mp.g(1, 1) * mp.g(2, 2) -
                          std::cos(beta) * std::cos(beta) * mp.g(1, 2) * mp.g(1, 2))
              .epsilon(1e-13));
  }
}

TEST_CASE("quartic part: zeros, sign structure, scalar oracle") {
  const auto mink = make_minkowski();
  const MetricPoint mp = mink->eval(Vec4::Zero());
  // Gaussian subset: exactly zero
  CHECK(quartic_part(mp, 1.0, 2.0, 0.7, 1.1, 0.0, std::sqrt(0.5), 0.0) == 0.0);

  // scalar substitution at beta = pi/2 on a generic diagonal metric
  Rng rng(109);
  for (int t = 0; t < 20; ++t) {
    const double sx = rng.uniform(0.5, 2.0), sy = rng.uniform(0.5, 2.0);
    const double alpha = rng.uniform(-M_PI, M_PI);
    const double c1 = 1.1, c2 = 0.8, pa = 0.1;
    const double w_expect = -std::cos(alpha) * (1.0 / (sx * sx) - 1.0 / (sy * sy)) / 2.0;
    const double val = quartic_part(mp, sx, sy, alpha, M_PI / 2, pa, c1, c2);
    CHECK(val == doctest::Approx(w_expect * sqrt_P(pa, c1, c2)).epsilon(1e-12));
  }
}

TEST_CASE("quartic part equals the non-quadratic residue of the moment form") {
  const auto schw = make_schwarzschild_isotropic(1.0);
  Rng rng(113);
  for (int t = 0; t < 20; ++t) {
    const CanonicalChart ch = random_physical_chart(rng);
    const Vec4 x(0, rng.uniform(5.0, 15.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
    const MetricPoint mp = schw->eval(x);
    Vec4 p4(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const Vec10 pbar = pbar_from_chart(ch, p4);
    const double m = 1.0, c = 1.0;
    const double hm = hq_moment_form(mp, p4, chart_to_moments(ch), m, c);
    const Mat10 b = b_tensor(mp, ch.s_x, ch.s_y, ch.beta);
    const double residue = 2 * m * hm - m * m * c * c - pbar.dot(b * pbar);
    const double w = quartic_part(mp, ch.s_x, ch.s_y, ch.alpha, ch.beta,
                                  ch.p_alpha, ch.C1, ch.C2);
    CHECK(residue == doctest::Approx(w).epsilon(1e-10));
  }
}

TEST_CASE("canonical route equals moment route; Gaussian point is quadratic") {
  const auto weak = make_weak_field(point_mass_potential(0.05));
  Rng rng(127);
  for (int t = 0; t < 30; ++t) {
    const CanonicalChart ch = random_physical_chart(rng);
    const Vec4 x(0, rng.uniform(3.0, 10.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0));
    const MetricPoint mp = weak->eval(x);
    Vec4 p4(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    const QuantumShape q{ch.s_x, ch.s_y, ch.alpha, ch.beta};
    const double hc = hq_canonical(mp, pbar_from_chart(ch, p4), q, 1.0, 1.0);
    const double hm = hq_moment_form(mp, p4, chart_to_moments(ch), 1.0, 1.0);
    CHECK(hc == doctest::Approx(hm).epsilon(1e-10));
  }

  // Gaussian point: H is purely quadratic (B route with zero quartic part)
  CanonicalChart g;
  g.C1 = std::sqrt(0.5);
  g.beta = 1.2;
  g.p_beta = 0.3;
  const Vec4 x(0, 5.0, 1.0, 0.0);
  const MetricPoint mp = weak->eval(x);
  const Vec10 pbar = pbar_from_chart(g, Vec4(-1.1, 0.2, 0.1, 0.0));
  const Mat10 b = b_tensor(mp, g.s_x, g.s_y, g.beta);
  const QuantumShape qs{g.s_x, g.s_y, g.alpha, g.beta};
  CHECK(hq_canonical(mp, pbar, qs, 1.0, 1.0) ==
        doctest::Approx((pbar.dot(b * pbar) + 1.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("degree-2 homogeneity of the kinetic part") {
  const auto schw = make_schwarzschild_isotropic(1.0);
  Rng rng(131);
  const CanonicalChart ch = random_physical_chart(rng);
  const MetricPoint mp = schw->eval(Vec4(0, 8.0, 2.0, -1.0));
  const QuantumShape q{ch.s_x, ch.s_y, ch.alpha, ch.beta};
  const Vec10 pbar = pbar_from_chart(ch, Vec4(-1.2, 0.3, -0.1, 0.2));
  const double m = 1.0, c = 1.0;
  const double k1 = 2 * m * hq_canonical(mp, pbar, q, m, c) - m * m * c * c;
  for (double lam : {1.0 / 3.0, 0.5, 2.0, 7.0, 10.0}) {
    const Vec10 scaled = lam * pbar;
    const double k2 = 2 * m * hq_canonical(mp, scaled, q, m, c) - m * m * c * c;
    CHECK(k2 == doctest::Approx(lam * lam * k1).epsilon(1e-10));
  }
}

TEST_CASE("fundamental tensor: Gaussian degeneracy flag and Euler identity") {
  const auto mink = make_minkowski();
  const MetricPoint mp = mink->eval(Vec4::Zero());
  CanonicalChart g;
  g.C1 = std::sqrt(0.5);
  const QuantumShape qs{g.s_x, g.s_y, g.alpha, g.beta};
  const Vec10 pbar = pbar_from_chart(g, Vec4(-1.1, 0.0, 0.0, 0.0));
  const FinslerTensors ft = fundamental_tensor(mp, qs, pbar, 1.0, 1.0);
  CHECK(ft.quartic_degenerate);
  CHECK((ft.g_Q - ft.B).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ft.sqrt_A == 0.0);

  Rng rng(137);
  ChartSampleOptions opt;
  opt.sqrtP_rel_min = 0.1;
  const auto schw = make_schwarzschild_isotropic(1.0);
  for (int t = 0; t < 20; ++t) {
    const CanonicalChart ch = random_physical_chart(rng, opt);
    const MetricPoint mpt = schw->eval(Vec4(0, rng.uniform(5.0, 15.0), 1.0, -0.5));
    const QuantumShape q{ch.s_x, ch.s_y, ch.alpha, ch.beta};
    const Vec10 p = pbar_from_chart(ch, Vec4(-1.0, 0.2, 0.1, 0.0));
    const FinslerTensors f = fundamental_tensor(mpt, q, p, 1.0, 1.0);
    const double kin = 2 * f.H_Q - 1.0;
    CHECK(p.dot(f.g_Q * p) == doctest::Approx(kin).epsilon(1e-9));
    CHECK((f.g_Q - f.g_Q.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(f.A_scalar == doctest::Approx(f.sqrt_A * f.sqrt_A));
  }
}

TEST_CASE("fundamental tensor equals the contraction form where sqrt(A) > 0") {
  // g_Q = B + 3 A^{ab} - 2 A^a A^b with the normalized contractions
  Rng rng(139);
  ChartSampleOptions opt;
  opt.sqrtP_rel_min = 0.2;
  const auto field = make_vortical_test(0.05, 0.4);
  int used = 0;
  for (int t = 0; t < 200 && used < 15; ++t) {
    const CanonicalChart ch = random_physical_chart(rng, opt);
    const MetricPoint mp = field->eval(Vec4(0, rng.uniform(-1, 1), rng.uniform(-1, 1), 0));
    const QuantumShape q{ch.s_x, ch.s_y, ch.alpha, ch.beta};
    const Vec10 p = pbar_from_chart(ch, Vec4(-1.0, 0.3, -0.2, 0.1));
    const FinslerTensors f = fundamental_tensor(mp, q, p, 1.0, 1.0);
    if (f.sqrt_A <= 1e-3) continue;  // contraction form needs the positive branch
    ++used;
    const Mat10 contraction = f.B + 3.0 * f.A_ab - 2.0 * f.A_a * f.A_a.transpose();
    CHECK((f.g_Q - contraction).cwiseAbs().maxCoeff() <
          1e-10 * std::max(1.0, f.g_Q.cwiseAbs().maxCoeff()));
  }
  CHECK(used == 15);
}

TEST_CASE("single-mode metric: minkowski pattern and ground-state energy") {
  const auto mink = make_minkowski(2.0);
  const MetricPoint mp = mink->eval(Vec4::Zero());
  const double s = 1.7, hbar = 0.5;
  const Mat6 g = single_mode_metric(mp, s, hbar);
  Mat6 expect = Mat6::Zero();
  expect(0, 0) = -0.25;  // g^tt at c = 2
  expect(1, 1) = expect(2, 2) = expect(3, 3) = 1.0;
  expect(4, 4) = 1.0;
  expect(5, 5) = 0.25 * hbar * hbar / (s * s);
  CHECK((g - expect).cwiseAbs().maxCoeff() < 1e-15);

  // p_q = 1, p_s = 0: ground-state fluctuation energy g^xx hbar^2/(4 s^2)/(2m)
  Eigen::Matrix<double, 6, 1> p6 = Eigen::Matrix<double, 6, 1>::Zero();
  p6[5] = 1.0;
  CHECK(p6.dot(g * p6) / 2.0 ==
        doctest::Approx(hbar * hbar / (4 * s * s) / 2.0).epsilon(1e-15));
}

TEST_CASE("single-mode metric: weak-field couplings match finite differences") {
  const auto weak = make_weak_field(point_mass_potential(0.1));
  const Vec4 x(0, 3.0, 1.0, -0.5);
  const double s = 1.2;
  const Mat6 g = single_mode_metric(weak->eval(x), s, 1.0);
  const double h = 1e-6;
  Vec4 xp = x, xm = x;
  xp[1] += h;
  xm[1] -= h;
  const Mat4 fd = (weak->eval(xp).g - weak->eval(xm).g) / (2 * h);
  for (int a = 0; a < 4; ++a)
    CHECK(g(a, 4) == doctest::Approx(s * fd(1, a)).epsilon(1e-6));
}

TEST_CASE("single-mode metric contraction reproduces the single-mode Hamiltonian") {
  const auto schw = make_schwarzschild_isotropic(1.0);
  const Vec4 x(0, 7.0, 0.0, 0.0);
  const MetricPoint mp = schw->eval(x);
  Rng rng(149);
  const double s = 1.1, hbar = 1.0, m = 1.0;
  Eigen::Matrix<double, 6, 1> p6;
  p6 << rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
      rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.9, 2.0);
  const Mat6 g6 = single_mode_metric(mp, s, hbar);
  const double via_metric = (p6.dot(g6 * p6) + m * m) / (2 * m);

  // independent sum: classical + g^xx(p_s^2 + hbar^2 p_q^2/(4 s^2))
  //                  + 2 d_x g^{ax} s p_a p_s + (1/2) d2_x g^{ab} s^2 p_a p_b
  const Vec4 p4 = p6.head<4>();
  double acc = p4.dot(mp.g * p4) + m * m;
  acc += mp.g(1, 1) * (p6[4] * p6[4] + 0.25 * hbar * hbar * p6[5] * p6[5] / (s * s));
  for (int a = 0; a < 4; ++a) acc += 2.0 * mp.dg[1](1, a) * s * p4[a] * p6[4];
  acc += 0.5 * s * s * p4.dot(mp.d2g[1][1] * p4);
  CHECK(via_metric == doctest::Approx(acc / (2 * m)).epsilon(1e-13));
}

TEST_CASE("two-mode tensor reduces to the single-mode pattern") {
  // freeze the y mode at beta = pi/2 on a diagonal field: the x sector of B
  // carries exactly the single-mode couplings
  const auto schw = make_schwarzschild_isotropic(1.0);
  const MetricPoint mp = schw->eval(Vec4(0, 6.0, 1.5, -2.0));
  const double sx = 0.9, sy = 1.4;
  const Mat10 b = b_tensor(mp, sx, sy, M_PI / 2);
  const Mat6 sm = single_mode_metric(mp, sx, 1.0);
  for (int a = 0; a < 4; ++a) {
    // subtract the y-mode averaging that the single-mode block lacks
    for (int bb = 0; bb < 4; ++bb)
      CHECK(b(a, bb) - 0.5 * sy * sy * mp.d2g[2][2](a, bb) ==
            doctest::Approx(sm(a, bb)).epsilon(1e-13));
    CHECK(b(a, PSX) == doctest::Approx(sm(a, 4)).epsilon(1e-13));
  }
  CHECK(b(PSX, PSX) == doctest::Approx(sm(4, 4)).epsilon(1e-14));
  // energy equivalence of the Casimir slots: the x part of the C1 coupling,
  // (1/2)(g^xx/s_x^2) C1^2 with C1^2 = 2U, equals the p_q term
  // (hbar^2 g^xx/(4 s_x^2)) p_q^2 with U = p_q^2 hbar^2/4
  const double hbar = 1.0, p_q = 1.7;
  const double u = 0.25 * hbar * hbar * p_q * p_q;
  CHECK(0.5 * (mp.g(1, 1) / (sx * sx)) * (2.0 * u) ==
        doctest::Approx(sm(5, 5) * p_q * p_q).epsilon(1e-14));
}

TEST_CASE("state-averaged metric") {
  const auto mink = make_minkowski();
  const MetricPoint flat = mink->eval(Vec4::Zero());
  CHECK((state_averaged_metric(flat, 1.0, 2.0, 0.7) - flat.g).cwiseAbs().maxCoeff() == 0.0);

  const auto schw = make_schwarzschild_isotropic(1.0);
  const MetricPoint mp = schw->eval(Vec4(0, 6.0, 2.0, 1.0));
  CHECK((state_averaged_metric(mp, 0.0, 0.0, 1.0) - mp.g).cwiseAbs().maxCoeff() == 0.0);

  // correction is linear in s^2 and matches the scalar substitution
  Rng rng(151);
  const double sx = 0.05, sy = 0.08, beta = 1.0;
  const Mat4 avg = state_averaged_metric(mp, sx, sy, beta);
  const Mat4 corr = 0.5 * (sx * sx * mp.d2g[1][1] +
                           2 * sx * sy * std::cos(beta) * mp.d2g[1][2] +
                           sy * sy * mp.d2g[2][2]);
  CHECK((avg - mp.g - corr).cwiseAbs().maxCoeff() < 1e-16);
  const Mat4 avg2 = state_averaged_metric(mp, 2 * sx, 2 * sy, beta);
  CHECK((avg2 - mp.g - 4.0 * corr).cwiseAbs().maxCoeff() < 1e-15);
}
