#include "qgeo/validate.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>

#include "qgeo/dispersion.hpp"
#include "qgeo/dynamics.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/finsler.hpp"
#include "qgeo/info.hpp"
#include "qgeo/io.hpp"
#include "qgeo/sampling.hpp"

#ifndef QGEO_SOURCE_DIR
#define QGEO_SOURCE_DIR "."
#endif

namespace qgeo {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double wrap_angle(double a) {
  while (a > M_PI) a -= 2 * M_PI;
  while (a < -M_PI) a += 2 * M_PI;
  return a;
}

Vec10 chart_vec(const CanonicalChart& c) {
  Vec10 v;
  v << c.s_x, c.p_s_x, c.s_y, c.p_s_y, c.alpha, c.p_alpha, c.beta, c.p_beta,
      c.C1, c.C2;
  return v;
}

CanonicalChart chart_from_vec(const Vec10& v, double hbar) {
  return CanonicalChart{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], hbar};
}

// 4th-order central difference Jacobian of the forward map.
Mat10 forward_jacobian_fd(const CanonicalChart& ch) {
  Mat10 jac;
  const Vec10 v0 = chart_vec(ch);
  auto eval = [&](const Vec10& v) {
    const MomentVector d = chart_to_moments(chart_from_vec(v, ch.hbar));
    Vec10 out;
    for (int i = 0; i < 10; ++i) out[i] = d[i];
    return out;
  };
  for (int k = 0; k < 10; ++k) {
    const double h = 1e-4 * std::max(1.0, std::abs(v0[k]));
    Vec10 vp2 = v0, vp1 = v0, vm1 = v0, vm2 = v0;
    vp2[k] += 2 * h;
    vp1[k] += h;
    vm1[k] -= h;
    vm2[k] -= 2 * h;
    jac.col(k) = (-eval(vp2) + 8.0 * eval(vp1) - 8.0 * eval(vm1) + eval(vm2)) / (12.0 * h);
  }
  return jac;
}

Mat10 canonical_poisson_matrix() {
  Mat10 s = Mat10::Zero();
  for (int k = 0; k < 4; ++k) {
    s(2 * k, 2 * k + 1) = 1.0;
    s(2 * k + 1, 2 * k) = -1.0;
  }
  return s;
}

// Nested 4th-order FD momentum Hessian of the canonical Hamiltonian.
Mat10 fd_momentum_hessian(const MetricPoint& mp, const QuantumShape& q,
                          const Vec10& p0, double m, double c) {
  auto hval = [&](const Vec10& p) { return hq_canonical(mp, p, q, m, c); };
  auto d1 = [&](const std::function<double(const Vec10&)>& f, const Vec10& p,
                int i, double h) {
    Vec10 a = p, b = p, cc = p, d = p;
    a[i] += 2 * h;
    b[i] += h;
    cc[i] -= h;
    d[i] -= 2 * h;
    return (-f(a) + 8.0 * f(b) - 8.0 * f(cc) + f(d)) / (12.0 * h);
  };
  Mat10 hess;
  for (int i = 0; i < 10; ++i) {
    const double hi = 1e-4 * std::max(1.0, std::abs(p0[i]));
    for (int j = i; j < 10; ++j) {
      const double hj = 1e-4 * std::max(1.0, std::abs(p0[j]));
      auto gj = [&](const Vec10& p) { return d1(hval, p, j, hj); };
      hess(i, j) = hess(j, i) = d1(gj, p0, i, hi);
    }
  }
  return m * hess;
}

struct MetricSet {
  std::vector<std::shared_ptr<const MetricField>> fields;
  MetricSet() {
    fields.push_back(make_minkowski());
    fields.push_back(make_weak_field(point_mass_potential(0.02)));
    fields.push_back(make_schwarzschild_isotropic(1.0));
  }
  MetricPoint eval_random(Rng& rng, int which, Vec4* event = nullptr) const {
    Vec4 x(0.0, rng.uniform(6.0, 20.0), rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0));
    if (event) *event = x;
    return fields[which % fields.size()]->eval(x);
  }
};

Vec10 make_pbar(Rng& rng, const CanonicalChart& ch) {
  Vec10 p;
  p << rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
      rng.uniform(-0.5, 0.5), ch.p_s_x, ch.p_s_y, ch.p_alpha, ch.p_beta, ch.C1,
      ch.C2;
  return p;
}

// ---- criterion bodies ----------------------------------------------------

CriterionResult c1_canonicity(Rng& rng) {
  CriterionResult r{1, "canonicity: bracket push-forward + Poisson rank 8", false, "", 0};
  ChartSampleOptions opt;
  opt.sin_beta_min = 0.2;
  opt.sqrtP_rel_min = 0.2;
  const Mat10 target = canonical_poisson_matrix();
  double worst = 0.0;
  bool rank_ok = true;
  for (int n = 0; n < 100; ++n) {
    const CanonicalChart ch = random_physical_chart(rng, opt);
    MomentState st;
    st.delta = chart_to_moments(ch);
    st.hbar = ch.hbar;
    const Mat10 pt = moment_poisson_tensor(st);

    Eigen::JacobiSVD<Mat10> svd(pt);
    const auto& sv = svd.singularValues();
    const int rank = (sv.array() > 1e-8 * sv[0]).count();
    if (rank != 8) rank_ok = false;

    const Mat10 jac = forward_jacobian_fd(ch);
    const Mat10 jinv = jac.partialPivLu().inverse();
    const Mat10 brackets = jinv * pt * jinv.transpose();
    worst = std::max(worst, (brackets - target).cwiseAbs().maxCoeff());
  }
  r.pass = rank_ok && worst < 1e-8;
  r.detail = "max |{.,.} - canonical| = " + fmt(worst) + (rank_ok ? ", rank 8" : ", RANK != 8");
  return r;
}

CriterionResult c2_round_trip(Rng& rng) {
  CriterionResult r{2, "round trip chart -> moments -> chart (1e-9 rel)", false, "", 0};
  ChartSampleOptions opt;
  opt.sin_beta_min = 0.05;
  opt.sqrtP_min = 1e-6;
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const CanonicalChart ch = random_physical_chart(rng, opt);
    const MomentVector d = chart_to_moments(ch);
    const ChartResult back = moments_to_chart(d, ch.hbar);
    const Vec10 a = chart_vec(ch);
    Vec10 b = chart_vec(back.chart);
    b[4] = a[4] + wrap_angle(b[4] - a[4]);
    for (int i = 0; i < 10; ++i) {
      const double rel = std::abs(b[i] - a[i]) / std::max(1e-12, std::abs(a[i]));
      worst = std::max(worst, rel);
    }
  }
  r.pass = worst < 1e-9;
  r.detail = "worst component rel error = " + fmt(worst);
  return r;
}

CriterionResult c3_casimir_determinant(Rng& rng) {
  CriterionResult r{3, "det(sigma) = (C1^4 - C2^4)/4 + Gaussian chart anchors", false, "", 0};
  double worst_det = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const CovarianceMatrix sig = random_physical_covariance(rng);
    const auto [c1v, c2v] = casimirs_from_sigma(sig);
    const double lhs = sig.entries.determinant();
    const double rhs = 0.25 * (std::pow(c1v, 4) - std::pow(c2v, 4));
    worst_det = std::max(worst_det, std::abs(lhs - rhs) / std::max(1e-300, std::abs(lhs)));
  }
  double worst_g = 0.0;
  for (int n = 0; n < 200; ++n) {
    GaussianParams gp;
    Eigen::Matrix2d a;
    a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    gp.sigma_x = 0.25 * a * a.transpose() + 0.3 * Eigen::Matrix2d::Identity();
    Eigen::Matrix2d w;
    const double w00 = rng.uniform(-0.5, 0.5), w11 = rng.uniform(-0.5, 0.5),
                 w01 = rng.uniform(-0.5, 0.5);
    w << w00, w01, w01, w11;
    gp.sigma_xp = gp.sigma_x * w;
    const CovarianceMatrix sig = gaussian_covariance(gp);
    MomentState st;
    st.delta = moments_from_covariance(sig);
    st.hbar = gp.hbar;
    const ChartResult cr = moments_to_chart(st.delta, st.hbar);
    worst_g = std::max(worst_g, std::abs(cr.chart.C1 * cr.chart.C1 - 0.5));
    worst_g = std::max(worst_g, std::abs(cr.chart.C2));
    worst_g = std::max(worst_g, std::abs(cr.chart.p_alpha));
  }
  r.pass = worst_det < 1e-10 && worst_g < 1e-9;
  r.detail = "det rel = " + fmt(worst_det) + ", Gaussian anchor dev = " + fmt(worst_g);
  return r;
}

CriterionResult c4_entropy_purity(Rng& rng) {
  CriterionResult r{4, "entropy/purity anchors (pure Gaussian, thermal nu = 3)", false, "", 0};
  double worst_s = 0.0, worst_mu = 0.0;
  for (int n = 0; n < 100; ++n) {
    GaussianParams gp;
    Eigen::Matrix2d a;
    a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    gp.sigma_x = 0.25 * a * a.transpose() + 0.3 * Eigen::Matrix2d::Identity();
    Eigen::Matrix2d w;
    w << rng.uniform(-0.4, 0.4), 0.0, 0.0, rng.uniform(-0.4, 0.4);
    gp.sigma_xp = gp.sigma_x * w;
    const CovarianceMatrix sig = gaussian_covariance(gp);
    worst_s = std::max(worst_s, std::abs(von_neumann_entropy(sig)));
    worst_mu = std::max(worst_mu, std::abs(purity(sig) - 1.0));
  }
  CovarianceMatrix thermal;
  thermal.hbar = 1.0;
  thermal.entries = 1.5 * Mat4::Identity();  // nu = 3 hbar/2 per mode
  const double s_thermal = von_neumann_entropy(thermal);
  const bool thermal_ok = std::abs(s_thermal - 4.0) < 1e-12;
  r.pass = worst_s < 1e-9 && worst_mu < 1e-9 && thermal_ok;
  r.detail = "max S_pure = " + fmt(worst_s) + ", max |mu-1| = " + fmt(worst_mu) +
             ", S_thermal = " + fmt(s_thermal);
  return r;
}

CriterionResult c5_route_equivalence(Rng& rng) {
  CriterionResult r{5, "H_Q canonical route == moment route (1e-10 rel)", false, "", 0};
  MetricSet metrics;
  ChartSampleOptions opt;
  opt.sin_beta_min = 0.15;
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    const CanonicalChart ch = random_physical_chart(rng, opt);
    const MetricPoint mp = metrics.eval_random(rng, n);
    const Vec10 pbar = make_pbar(rng, ch);
    const QuantumShape q{ch.s_x, ch.s_y, ch.alpha, ch.beta};
    const double m = 1.0, c = 1.0;
    const double hc = hq_canonical(mp, pbar, q, m, c);
    const double hm = hq_moment_form(mp, pbar.segment<4>(0), chart_to_moments(ch), m, c);
    worst = std::max(worst, std::abs(hc - hm) / std::max(1.0, std::abs(hm)));
  }
  // quartic part vanishes identically on the Gaussian subset
  double worst_g = 0.0;
  for (int n = 0; n < 50; ++n) {
    const MetricPoint mp = metrics.eval_random(rng, n);
    const double c1v = std::sqrt(0.5);
    worst_g = std::max(worst_g,
        std::abs(quartic_part(mp, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0),
                              rng.uniform(-3.0, 3.0), rng.uniform(0.3, 2.8),
                              0.0, c1v, 0.0)));
  }
  r.pass = worst < 1e-10 && worst_g == 0.0;
  r.detail = "worst rel = " + fmt(worst) + ", max |sqrtA| on Gaussian subset = " + fmt(worst_g);
  return r;
}

CriterionResult c6_fundamental_tensor(Rng& rng) {
  CriterionResult r{6, "fundamental tensor vs FD Hessian + Euler identity", false, "", 0};
  MetricSet metrics;
  ChartSampleOptions opt;
  opt.sin_beta_min = 0.25;
  opt.sqrtP_rel_min = 0.2;
  double worst_h = 0.0, worst_e = 0.0;
  int used = 0;
  for (int n = 0; used < 50 && n < 500; ++n) {
    const CanonicalChart ch = random_physical_chart(rng, opt);
    const MetricPoint mp = metrics.eval_random(rng, n);
    const Vec10 pbar = make_pbar(rng, ch);
    const QuantumShape q{ch.s_x, ch.s_y, ch.alpha, ch.beta};
    const double m = 1.0, c = 1.0;
    const FinslerTensors ft = fundamental_tensor(mp, q, pbar, m, c);
    if (ft.A_scalar <= 1e-6) continue;
    ++used;
    const Mat10 fd = fd_momentum_hessian(mp, q, pbar, m, c);
    worst_h = std::max(worst_h, (ft.g_Q - fd).cwiseAbs().maxCoeff() /
                                    std::max(1.0, ft.g_Q.cwiseAbs().maxCoeff()));
    const double kin = 2.0 * m * ft.H_Q - m * m * c * c;
    worst_e = std::max(worst_e,
                       std::abs(pbar.dot(ft.g_Q * pbar) - kin) / std::max(1.0, std::abs(kin)));
  }
  r.pass = used == 50 && worst_h < 1e-6 && worst_e < 1e-9;
  r.detail = "points = " + std::to_string(used) + ", worst Hessian rel = " + fmt(worst_h) +
             ", worst Euler rel = " + fmt(worst_e);
  return r;
}

ExtendedState schwarzschild_rest_state(double r0_areal, double lambda, bool classical) {
  const double gm = 1.0, c = 1.0;
  ExtendedState s;
  s.metric = make_schwarzschild_isotropic(gm, c);
  s.m = 1.0;
  s.hbar = lambda;  // moments scale linearly with hbar along the family
  s.classical_mode = classical;
  s.x = Vec4(0.0, schwarzschild_isotropic_radius(gm, c, r0_areal), 0.0, 0.0);
  const double s0 = std::sqrt(lambda);
  s.q = Vec4(s0, s0, 0.0, M_PI / 2);
  s.p.setZero();
  s.p[C1] = s.hbar / std::sqrt(2.0);
  s.p[C2] = 0.0;
  solve_mass_shell(s);
  return s;
}

CriterionResult c7_classical_limit(Rng&) {
  CriterionResult r{7, "cycloid infall anchor + linear moment-scaling limit", false, "", 0};
  const double gm = 1.0, c = 1.0, r0 = 20.0, r1 = 4.0;

  IntegrateOptions opt;
  opt.integ.rtol = 1e-11;
  opt.integ.atol = 1e-13;
  opt.sample_every = 64;
  opt.stop.kind = StopCondition::Kind::IsotropicRadius;
  opt.stop.value = schwarzschild_isotropic_radius(gm, c, r1);
  opt.guards.constraint_tol_rel = 1e-6;

  ExtendedState cl = schwarzschild_rest_state(r0, 1.0, true);
  const TrajectoryRecord rec = integrate(cl, 400.0, opt);
  if (!rec.stopped_by_condition) {
    r.detail = "classical run never reached the target radius";
    return r;
  }
  const double eta = std::acos(2.0 * r1 / r0 - 1.0);
  const double tau_cycloid = std::sqrt(r0 * r0 * r0 / (8.0 * gm)) * (eta + std::sin(eta));
  const double tau_num = rec.final_state.tau;
  const double rel = std::abs(tau_num - tau_cycloid) / tau_cycloid;

  // deviation from the classical trajectory scales linearly in lambda
  IntegrateOptions qopt;
  qopt.integ.rtol = 1e-11;
  qopt.integ.atol = 1e-13;
  qopt.sample_every = 1 << 20;
  qopt.monitors = false;
  const double tau_f = 40.0;
  ExtendedState cl2 = schwarzschild_rest_state(r0, 1.0, true);
  const Vec4 x_cl = integrate(cl2, tau_f, qopt).final_state.x;
  std::vector<double> lambdas = {1e-3, 3.162e-3, 1e-2, 3.162e-2, 1e-1};
  std::vector<double> devs;
  for (double lam : lambdas) {
    ExtendedState qs = schwarzschild_rest_state(r0, lam, false);
    const Vec4 xq = integrate(qs, tau_f, qopt).final_state.x;
    devs.push_back((xq - x_cl).tail<3>().norm());
  }
  // least-squares slope in log-log
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(lambdas.size());
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(lambdas[i]), ly = std::log(devs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  r.pass = rel < 1e-6 && std::abs(slope - 1.0) <= 0.1;
  r.detail = "tau rel err = " + fmt(rel) + ", scaling slope = " + fmt(slope);
  return r;
}

CriterionResult c8_spreading(Rng&) {
  CriterionResult r{8, "free-particle spreading D(x^2)(tau) closed form", false, "", 0};
  ExtendedState s;
  s.metric = make_minkowski();
  s.m = 1.0;
  s.hbar = 1.0;
  s.q = Vec4(1.0, 1.0, 0.0, M_PI / 2);
  s.p.setZero();
  s.p[C1] = 1.0 / std::sqrt(2.0);
  solve_mass_shell(s);

  IntegrateOptions opt;
  opt.integ.rtol = 1e-12;
  opt.integ.atol = 1e-14;
  opt.sample_every = 16;
  const double s0 = 1.0, spreading_time = 2.0 * s.m * s0 * s0 / s.hbar;
  const TrajectoryRecord rec = integrate(s, 10.0 * spreading_time, opt);
  double worst = 0.0;
  for (const auto& smp : rec.samples) {
    const double dx2 = smp.q[0] * smp.q[0];
    const double exact = s0 * s0 + std::pow(s.hbar * smp.tau / (2.0 * s.m * s0), 2);
    worst = std::max(worst, std::abs(dx2 - exact) / exact);
  }
  r.pass = worst < 1e-8;
  r.detail = "worst rel error over " + std::to_string(rec.samples.size()) +
             " samples = " + fmt(worst);
  return r;
}

CriterionResult c9_constraint_conservation(const std::string& scenario_dir) {
  CriterionResult r{9, "constraint drift + uncertainty floor on shipped scenarios", false, "", 0};
  const std::vector<std::string> names = {
      "minkowski-vacuum",        "minkowski-squeezed",
      "weakfield-clock-pair",    "schwarzschild-infall-classical",
      "schwarzschild-infall-quantum", "vortical-test-metric"};
  std::ostringstream detail;
  bool all_ok = true;
  for (const auto& name : names) {
    const std::string path = scenario_dir + "/" + name + ".toml";
    const ScenarioConfig cfg = parse_scenario(load_config_file(path));
    std::vector<CanonicalChart> charts;
    if (cfg.state_is_chart) {
      CanonicalChart ch = cfg.chart;
      ch.hbar = cfg.hbar;
      charts.push_back(ch);
    } else {
      charts.push_back(moments_to_chart(cfg.delta, cfg.hbar).chart);
    }
    if (cfg.chart_b) {
      CanonicalChart ch = *cfg.chart_b;
      ch.hbar = cfg.hbar;
      charts.push_back(ch);
    }
    for (const auto& ch : charts) {
      ExtendedState st = initial_state(cfg, ch);
      IntegrateOptions opt;
      opt.integ.rtol = cfg.rtol;
      opt.integ.atol = cfg.atol;
      opt.integ.h_max = std::abs(cfg.tau_end - st.tau) / 10000.0;  // >= 1e4 steps
      opt.sample_every = 100;
      opt.guards.constraint_tol_rel = 1e-6;
      opt.stop = resolved_stop(cfg);
      const TrajectoryRecord rec = integrate(st, cfg.tau_end, opt);
      const double mc2 = st.m * st.metric->c() * st.metric->c();
      const bool drift_ok = rec.max_abs_H < 1e-9 * mc2;
      const bool floor_ok = cfg.classical_mode || rec.min_u_floor_margin >= -1e-9;
      const bool steps_ok = rec.steps_accepted >= 10000 || rec.stopped_by_condition;
      if (!(drift_ok && floor_ok && steps_ok)) all_ok = false;
      detail << name << ": |H|max/mc2 = " << fmt(rec.max_abs_H / mc2)
             << (floor_ok ? "" : " U-FLOOR") << (steps_ok ? "" : " STEPS") << "; ";
    }
  }
  r.pass = all_ok;
  r.detail = detail.str();
  return r;
}

CriterionResult c10_dispersion(Rng&) {
  CriterionResult r{10, "cesium xi2 bound anchor + exact linearity", false, "", 0};
  const double bound = xi2_fluctuation_bound(constants::cesium133_mass_MeV,
                                             constants::planck_mass_MeV, 1e9, 1.0);
  const bool anchor_ok = bound > 300.0 / 1.2 && bound < 300.0 * 1.2;
  const double twice = xi2_fluctuation_bound(constants::cesium133_mass_MeV,
                                             constants::planck_mass_MeV, 2e9, 1.0);
  const bool linear_ok = twice == 2.0 * bound;
  r.pass = anchor_ok && linear_ok;
  r.detail = "bound = " + fmt(bound) + " MeV^2/c^2, linearity " +
             (linear_ok ? "exact" : "BROKEN");
  return r;
}

CriterionResult c11_case2(Rng& rng) {
  CriterionResult r{11, "case-2 exclusion: |C2| < |C1| on 1e5 physical sigma", false, "", 0};
  double min_gap = 1e300;
  for (int n = 0; n < 100000; ++n) {
    const CovarianceMatrix sig = random_physical_covariance(rng);
    const auto [c1v, c2v] = casimirs_from_sigma(sig);
    min_gap = std::min(min_gap, c1v - c2v);
    if (c2v >= c1v) {
      r.detail = "violation found";
      return r;
    }
  }
  r.pass = true;
  r.detail = "min C1 - C2 = " + fmt(min_gap);
  return r;
}

}  // namespace

std::string default_scenario_dir() {
  if (const char* env = std::getenv("QGEO_SCENARIO_DIR")) return env;
  if (std::filesystem::exists("scenarios")) return "scenarios";
  const std::string src = std::string(QGEO_SOURCE_DIR) + "/scenarios";
  if (std::filesystem::exists(src)) return src;
  return "scenarios";
}

std::vector<CriterionResult> run_validation(const ValidateOptions& opt) {
  const std::string dir = opt.scenario_dir.empty() ? default_scenario_dir() : opt.scenario_dir;
  std::vector<CriterionResult> out;
  Rng rng(opt.seed);

  using Body = std::function<CriterionResult()>;
  const std::vector<Body> bodies = {
      [&] { return c1_canonicity(rng); },
      [&] { return c2_round_trip(rng); },
      [&] { return c3_casimir_determinant(rng); },
      [&] { return c4_entropy_purity(rng); },
      [&] { return c5_route_equivalence(rng); },
      [&] { return c6_fundamental_tensor(rng); },
      [&] { return c7_classical_limit(rng); },
      [&] { return c8_spreading(rng); },
      [&] { return c9_constraint_conservation(dir); },
      [&] { return c10_dispersion(rng); },
      [&] { return c11_case2(rng); },
  };
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    if (opt.only != 0 && opt.only != static_cast<int>(i + 1)) continue;
    const auto t0 = Clock::now();
    CriterionResult res;
    try {
      res = bodies[i]();
    } catch (const std::exception& e) {
      res.id = static_cast<int>(i + 1);
      res.name = "criterion " + std::to_string(i + 1);
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.push_back(res);
  }
  return out;
}

}  // namespace qgeo
