#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qgeo/dynamics.hpp"
#include "qgeo/errors.hpp"
#include "qgeo/info.hpp"
#include "qgeo/sampling.hpp"

using namespace qgeo;

namespace {

ExtendedState vacuum_state(double s0 = 1.0, double hbar = 1.0, double m = 1.0) {
  ExtendedState s;
  s.metric = make_minkowski();
  s.m = m;
  s.hbar = hbar;
  s.q = Vec4(s0, s0, 0.0, M_PI / 2);
  s.p.setZero();
  s.p[C1] = hbar / std::sqrt(2.0);
  return s;
}

ExtendedState squeezed_state() {
  ExtendedState s;
  s.metric = make_minkowski();
  s.q = Vec4(1.0, 1.2, 0.3, 1.2);
  s.p.setZero();
  s.p[PX] = 0.1;
  s.p[PSX] = 0.1;
  s.p[PSY] = -0.05;
  s.p[PALPHA] = 0.1;
  s.p[PBETA] = 0.2;
  s.p[C1] = 1.2;
  s.p[C2] = 0.9;
  return s;
}

}  // namespace

TEST_CASE("mass shell: rest particle and vacuum fluctuations") {
  for (double c : {1.0, 2.0}) {
    ExtendedState s;
    s.metric = make_minkowski(c);
    s.m = 1.4;
    s.classical_mode = true;
    s.p.setZero();
    const double pt = solve_mass_shell(s);
    CHECK(-pt == doctest::Approx(s.m * c * c).epsilon(1e-14));  // E = m c^2
  }

  // E^2/c^2 = m^2 c^2 + D(px^2) + D(py^2) for a quantum state at rest
  ExtendedState s = vacuum_state();
  solve_mass_shell(s);
  const double e = -s.p[PT];
  // vacuum chart: D(px^2) = D(py^2) = C1^2/(2 s^2) = 0.25
  CHECK(e * e == doctest::Approx(1.0 + 0.5).epsilon(1e-13));
  CHECK(std::abs(hamiltonian(s)) < 1e-13);
}

TEST_CASE("mass shell: residual on random schwarzschild data") {
  Rng rng(211);
  const auto metric = make_schwarzschild_isotropic(1.0);
  for (int t = 0; t < 20; ++t) {
    const CanonicalChart ch = random_physical_chart(rng);
    ExtendedState s;
    s.metric = metric;
    s.hbar = ch.hbar;
    s.x = Vec4(0, rng.uniform(5.0, 20.0), rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0));
    s.q = Vec4(ch.s_x, ch.s_y, ch.alpha, ch.beta);
    s.p.setZero();
    s.p[PX] = rng.uniform(-0.3, 0.3);
    s.p[PY] = rng.uniform(-0.3, 0.3);
    s.p[PZ] = rng.uniform(-0.3, 0.3);
    s.p[PSX] = ch.p_s_x;
    s.p[PSY] = ch.p_s_y;
    s.p[PALPHA] = ch.p_alpha;
    s.p[PBETA] = ch.p_beta;
    s.p[C1] = ch.C1;
    s.p[C2] = ch.C2;
    solve_mass_shell(s);
    CHECK(std::abs(hamiltonian(s)) < 1e-12);  // m c^2 = 1
    // future directed
    CHECK(canonical_rhs(s, Guards{}).dx[0] > 0.0);
  }
}

TEST_CASE("mass shell: superluminal data has no root") {
  ExtendedState s;
  s.metric = make_minkowski();
  s.q = Vec4(0.1, 1.0, 0.0, M_PI / 2);
  s.p.setZero();
  s.p[C1] = 1.0;
  s.p[C2] = std::sqrt(3.0);  // C2 > C1: unphysical, large negative quartic part
  CHECK_THROWS_AS(solve_mass_shell(s), NoRootError);
}

TEST_CASE("classical free particle moves on a straight line") {
  ExtendedState s;
  s.metric = make_minkowski();
  s.classical_mode = true;
  s.p.setZero();
  s.p[PX] = 0.3;
  s.p[PY] = -0.2;
  solve_mass_shell(s);
  const double e = -s.p[PT];
  const ExtendedState out = hamiltonian_flow(s, 7.0);
  CHECK(out.x[1] == doctest::Approx(0.3 * 7.0).epsilon(1e-12));
  CHECK(out.x[2] == doctest::Approx(-0.2 * 7.0).epsilon(1e-12));
  CHECK(out.x[3] == doctest::Approx(0.0));
  CHECK(out.x[0] == doctest::Approx(e * 7.0).epsilon(1e-12));
  CHECK(out.p[PX] == 0.3);
}

TEST_CASE("wavepacket spreading follows the closed form") {
  ExtendedState s = vacuum_state(0.8, 1.0, 1.3);
  solve_mass_shell(s);
  IntegratorOptions opt;
  opt.rtol = 1e-12;
  opt.atol = 1e-14;
  const double s0 = 0.8;
  for (double tau : {1.0, 5.0}) {
    const ExtendedState out = hamiltonian_flow(s, tau, opt);
    const double expect = s0 * s0 + std::pow(s.hbar * tau / (2 * s.m * s0), 2);
    CHECK(out.q[0] * out.q[0] == doctest::Approx(expect).epsilon(1e-9));
    CHECK(out.q[1] * out.q[1] == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("integrator converges at its nominal order on the spreading problem") {
  ExtendedState s = vacuum_state();
  solve_mass_shell(s);
  const double tau = 2.0;
  const double exact = 1.0 + std::pow(tau / 2.0, 2);
  std::vector<double> errs;
  for (double h : {0.8, 0.4, 0.2, 0.1}) {
    IntegratorOptions opt;
    opt.rtol = 1e30;  // force fixed steps of size h_max
    opt.atol = 1e30;
    opt.h_init = h;
    opt.h_max = h;
    const ExtendedState out = hamiltonian_flow(s, tau, opt);
    errs.push_back(std::abs(out.q[0] * out.q[0] - exact));
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    CHECK(order > 4.2);
    CHECK(order < 6.2);
  }
}

TEST_CASE("time reversal returns the initial state") {
  ExtendedState s = squeezed_state();
  solve_mass_shell(s);
  IntegratorOptions opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  const ExtendedState fwd = hamiltonian_flow(s, 3.0, opt);
  const ExtendedState back = hamiltonian_flow(fwd, -3.0, opt);
  for (int i = 0; i < 4; ++i) {
    CHECK(back.x[i] == doctest::Approx(s.x[i]).epsilon(1e-7));
    CHECK(back.q[i] == doctest::Approx(s.q[i]).epsilon(1e-7));
  }
  for (int i = 0; i < 10; ++i)
    CHECK(back.p[i] == doctest::Approx(s.p[i]).epsilon(1e-7));
}

TEST_CASE("integrate: monitors, Casimir exactness, increasing tau") {
  ExtendedState s = squeezed_state();
  solve_mass_shell(s);
  IntegrateOptions opt;
  opt.integ.rtol = 1e-11;
  opt.integ.atol = 1e-13;
  opt.sample_every = 5;
  const TrajectoryRecord rec = integrate(s, 6.0, opt);
  CHECK(rec.max_abs_H < 1e-10);
  CHECK(rec.min_u_floor_margin > -1e-9);
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    // Casimirs are never touched by the integrator
    CHECK(rec.samples[i].p[C1] == s.p[C1]);
    CHECK(rec.samples[i].p[C2] == s.p[C2]);
    if (i > 0) CHECK(rec.samples[i].tau > rec.samples[i - 1].tau);
  }
  // entropy and purity are functions of the Casimirs: constant along the flow
  const double ent0 = rec.samples.front().entropy;
  const double pur0 = rec.samples.front().purity;
  for (const auto& smp : rec.samples) {
    CHECK(smp.entropy == doctest::Approx(ent0).epsilon(1e-7));
    CHECK(smp.purity == doctest::Approx(pur0).epsilon(1e-7));
  }
}

TEST_CASE("integrate fails fast on constraint violation") {
  ExtendedState s = vacuum_state();
  s.p[PT] = -2.0;  // deliberately off shell
  IntegrateOptions opt;
  opt.guards.constraint_tol_rel = 1e-6;
  CHECK_THROWS_AS(integrate(s, 1.0, opt), StepFailureError);
}

TEST_CASE("flow rejects a chart on the beta guard") {
  ExtendedState s = vacuum_state();
  s.q[3] = 1e-10;  // sin(beta) below guard
  CHECK_THROWS_AS(solve_mass_shell(s), SingularityError);
}

TEST_CASE("coordinate-time stop condition") {
  ExtendedState s = vacuum_state();
  solve_mass_shell(s);
  IntegrateOptions opt;
  opt.stop.kind = StopCondition::Kind::CoordinateTime;
  opt.stop.value = 4.0;
  const TrajectoryRecord rec = integrate(s, 50.0, opt);
  CHECK(rec.stopped_by_condition);
  CHECK(rec.final_state.x[0] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(rec.final_state.tau < 50.0);
}

TEST_CASE("proper time functional") {
  ExtendedState s = vacuum_state();
  solve_mass_shell(s);
  IntegrateOptions opt;
  opt.integ.rtol = 1e-11;
  opt.integ.atol = 1e-13;
  opt.sample_every = 3;
  const TrajectoryRecord rec = integrate(s, 8.0, opt);
  CHECK(proper_time_functional(rec) == doctest::Approx(8.0).epsilon(1e-9));

  // deliberately off-shell record: constant integrand sqrt(1 - 2 eps)
  const double eps = 0.01;
  TrajectoryRecord off;
  off.m_c2 = 1.0;
  TrajectorySample a, b;
  a.tau = 0.0;
  a.H_Q = eps;
  b.tau = 5.0;
  b.H_Q = eps;
  off.samples = {a, b};
  CHECK(proper_time_functional(off) ==
        doctest::Approx(5.0 * std::sqrt(1.0 - 2 * eps)).epsilon(1e-14));

  off.samples[1].H_Q = 0.7;  // radicand negative
  CHECK_THROWS_AS(proper_time_functional(off), ImaginaryError);
}

TEST_CASE("clock pair: distinct proper times, difference scales with moments") {
  const auto metric = make_weak_field(point_mass_potential(0.02));
  auto run_clock = [&](double s0, double hbar) {
    ExtendedState s;
    s.metric = metric;
    s.hbar = hbar;
    s.x = Vec4(0, 10.0, 0, 0);
    s.q = Vec4(s0, s0, 0.0, M_PI / 2);
    s.p.setZero();
    s.p[C1] = hbar / std::sqrt(2.0);
    solve_mass_shell(s);
    IntegrateOptions opt;
    opt.integ.rtol = 1e-11;
    opt.integ.atol = 1e-13;
    opt.stop.kind = StopCondition::Kind::CoordinateTime;
    opt.stop.value = 20.0;
    return integrate(s, 40.0, opt).final_state.tau;
  };
  const double tau_cl = [&] {
    ExtendedState s;
    s.metric = metric;
    s.classical_mode = true;
    s.x = Vec4(0, 10.0, 0, 0);
    s.p.setZero();
    solve_mass_shell(s);
    IntegrateOptions opt;
    opt.integ.rtol = 1e-11;
    opt.integ.atol = 1e-13;
    opt.monitors = false;
    opt.stop.kind = StopCondition::Kind::CoordinateTime;
    opt.stop.value = 20.0;
    return integrate(s, 40.0, opt).final_state.tau;
  }();

  const double tau_narrow = run_clock(0.5, 0.05);
  const double tau_wide = run_clock(1.0, 0.05);
  CHECK(tau_narrow != tau_wide);  // distinct elapsed proper time

  // the quantum shift from the classical clock scales linearly with the
  // moment-scaling parameter (delta, hbar) -> lambda (delta, hbar)
  const double shift1 = tau_wide - tau_cl;
  const double tau_wide_half = run_clock(1.0 / std::sqrt(2.0), 0.025);
  const double shift_half = tau_wide_half - tau_cl;
  CHECK(shift1 / shift_half == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("classical-limit deviation shrinks linearly in the moment scale") {
  const auto metric = make_schwarzschild_isotropic(1.0);
  auto endpoint = [&](double lam, bool classical) {
    ExtendedState s;
    s.metric = metric;
    s.hbar = lam;
    s.classical_mode = classical;
    s.x = Vec4(0, 18.986832980505138, 0, 0);
    s.q = Vec4(std::sqrt(lam) * 0.5, std::sqrt(lam) * 0.5, 0.0, M_PI / 2);
    s.p.setZero();
    s.p[C1] = lam / std::sqrt(2.0);
    solve_mass_shell(s);
    IntegratorOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-13;
    return hamiltonian_flow(s, 30.0, opt).x[1];
  };
  const double x_cl = endpoint(1.0, true);
  const double d1 = std::abs(endpoint(0.04, false) - x_cl);
  const double d2 = std::abs(endpoint(0.02, false) - x_cl);
  CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.15));
}
