#include "qgeo/dynamics.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "qgeo/errors.hpp"
#include "qgeo/info.hpp"

namespace qgeo {

namespace {

using StateVec = Eigen::Matrix<double, 16, 1>;

// Packing: y = (t, x, y, z, s_x, s_y, alpha, beta, p_t..p_z, p_sx, p_sy, p_alpha, p_beta)

struct Ctx {
  const MetricField* metric = nullptr;
  double m = 1.0, c = 1.0, hbar = 1.0;
  double C1v = 0.0, C2v = 0.0;
  bool classical = false;
  Guards guards;
};

StateVec pack(const ExtendedState& s) {
  StateVec y;
  y.segment<4>(0) = s.x;
  y.segment<4>(4) = s.q;
  y.segment<4>(8) = s.p.segment<4>(0);
  y.segment<4>(12) = s.p.segment<4>(4);
  return y;
}

void unpack(const StateVec& y, ExtendedState& s) {
  s.x = y.segment<4>(0);
  s.q = y.segment<4>(4);
  s.p.segment<4>(0) = y.segment<4>(8);
  s.p.segment<4>(4) = y.segment<4>(12);
}

Vec10 pbar_of(const Ctx& ctx, const StateVec& y) {
  Vec10 p;
  p.segment<4>(0) = y.segment<4>(8);
  p.segment<4>(4) = y.segment<4>(12);
  p[C1] = ctx.C1v;
  p[C2] = ctx.C2v;
  return p;
}

void check_guards(const Ctx& ctx, const StateVec& y) {
  if (!ctx.classical) {
    if (y[4] <= ctx.guards.s_min || y[5] <= ctx.guards.s_min)
      throw SingularityError("flow: fluctuation radius hit guard");
    if (std::sin(y[7]) < ctx.guards.eps_beta)
      throw SingularityError("flow: sin(beta) hit guard");
  }
}

double h_classical(const MetricPoint& mp, const Eigen::Ref<const Vec4>& p4,
                   double m, double c) {
  return (p4.dot(mp.g * p4) + m * m * c * c) / (2.0 * m);
}

double h_full(const Ctx& ctx, const MetricPoint& mp, const StateVec& y) {
  const Eigen::Ref<const Vec4> p4 = y.segment<4>(8);
  if (ctx.classical) return h_classical(mp, p4, ctx.m, ctx.c);
  const Vec10 pbar = pbar_of(ctx, y);
  const Mat10 b = b_tensor(mp, y[4], y[5], y[7]);
  const double w = kernel_half_trace(mp.g, y[4], y[5], y[6], y[7]);
  const double rp = sqrt_P(pbar[PALPHA], ctx.C1v, ctx.C2v);
  return (pbar.dot(b * pbar) + w * rp + ctx.m * ctx.m * ctx.c * ctx.c) / (2.0 * ctx.m);
}

// Quantum part only; the classical block is handled analytically.
double h_quantum(const Ctx& ctx, const MetricPoint& mp, const StateVec& y) {
  const Eigen::Ref<const Vec4> p4 = y.segment<4>(8);
  const Vec10 pbar = pbar_of(ctx, y);
  const Mat10 b = b_tensor(mp, y[4], y[5], y[7]);
  const double w = kernel_half_trace(mp.g, y[4], y[5], y[6], y[7]);
  const double rp = sqrt_P(pbar[PALPHA], ctx.C1v, ctx.C2v);
  return (pbar.dot(b * pbar) - p4.dot(mp.g * p4) + w * rp) / (2.0 * ctx.m);
}

double dw_dalpha(const Mat4& g, double s_x, double s_y, double alpha, double beta) {
  const double sb = std::sin(beta);
  const double csc2 = 1.0 / (sb * sb);
  return 0.5 * csc2 *
         (-std::cos(alpha + beta) * g(kQuantX, kQuantX) / (s_x * s_x) +
          2.0 * std::cos(alpha) * g(kQuantX, kQuantY) / (s_x * s_y) -
          std::cos(alpha - beta) * g(kQuantY, kQuantY) / (s_y * s_y));
}

// Fourth-order central difference of f over one packed component.
double fd4(const std::function<double(const StateVec&)>& f, const StateVec& y0,
           int slot, double h) {
  StateVec y = y0;
  y[slot] = y0[slot] + 2 * h; const double f_p2 = f(y);
  y[slot] = y0[slot] + h;     const double f_p1 = f(y);
  y[slot] = y0[slot] - h;     const double f_m1 = f(y);
  y[slot] = y0[slot] - 2 * h; const double f_m2 = f(y);
  return (-f_p2 + 8.0 * f_p1 - 8.0 * f_m1 + f_m2) / (12.0 * h);
}

void rhs(const Ctx& ctx, const StateVec& y, StateVec& dy) {
  check_guards(ctx, y);
  const Vec4 x = y.segment<4>(0);
  const MetricPoint mp = ctx.metric->eval(x);
  const Eigen::Ref<const Vec4> p4 = y.segment<4>(8);
  dy.setZero();

  if (ctx.classical) {
    dy.segment<4>(0) = mp.g * p4 / ctx.m;
    for (int k = 1; k < 4; ++k)
      dy[8 + k] = -p4.dot(mp.dg[k] * p4) / (2.0 * ctx.m);
    // static background: dp_t/dtau = 0; quantum block frozen
    return;
  }

  const Vec10 pbar = pbar_of(ctx, y);
  const Mat10 b = b_tensor(mp, y[4], y[5], y[7]);
  const double w = kernel_half_trace(mp.g, y[4], y[5], y[6], y[7]);
  const double rp = sqrt_P(pbar[PALPHA], ctx.C1v, ctx.C2v);

  // dH/dp: analytic
  Vec10 v = b * pbar / ctx.m;
  v[PALPHA] += w * sqrt_P_gradient(pbar[PALPHA], ctx.C1v, ctx.C2v)[PALPHA] / (2.0 * ctx.m);
  dy.segment<4>(0) = v.segment<4>(0);
  dy.segment<4>(4) = v.segment<4>(4);

  // dp_k/dtau = -dH/dx^k: analytic classical block + FD4 of the quantum part
  auto hq_at_x = [&](const StateVec& yy) {
    return h_quantum(ctx, ctx.metric->eval(yy.segment<4>(0)), yy);
  };
  for (int k = 1; k < 4; ++k) {
    const double hk = 1e-3 * (1.0 + std::abs(y[k]));
    dy[8 + k] = -p4.dot(mp.dg[k] * p4) / (2.0 * ctx.m) - fd4(hq_at_x, y, k, hk);
  }
  // static background: dp_t/dtau = 0

  // quantum configuration forces
  auto hq_at_q = [&](const StateVec& yy) { return h_quantum(ctx, mp, yy); };
  dy[12] = -fd4(hq_at_q, y, 4, 1e-3 * y[4]);  // p_sx
  dy[13] = -fd4(hq_at_q, y, 5, 1e-3 * y[5]);  // p_sy
  dy[14] = -dw_dalpha(mp.g, y[4], y[5], y[6], y[7]) * rp / (2.0 * ctx.m);  // p_alpha
  const double hb = std::min(1e-3, 0.25 * std::min(y[7], M_PI - y[7]));
  dy[15] = -fd4(hq_at_q, y, 7, hb);  // p_beta
}

// Dormand-Prince 5(4) pair.
struct DP45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  // stage coefficients
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
};

// Integrates y from tau to tau_end. on_step(tau_prev, y_prev, tau, y) is
// called after each accepted step with mutable access to (tau, y) and may
// return false to stop early (event handling rewinds onto the crossing).
void integrate_core(const Ctx& ctx, double& tau, StateVec& y, double tau_end,
                    const IntegratorOptions& opt, StepStats& stats,
                    const std::function<bool(double, const StateVec&, double&,
                                             StateVec&)>& on_step) {
  const double dir = (tau_end >= tau) ? 1.0 : -1.0;
  if (tau_end == tau) return;

  double h = opt.h_init > 0 ? opt.h_init : 1e-4 * (std::abs(tau_end - tau) + 1.0);
  if (opt.h_max > 0) h = std::min(h, opt.h_max);
  h *= dir;

  StateVec k1, k2, k3, k4, k5, k6, k7, ynew, yerr;
  bool have_k1 = false;
  long steps = 0;

  while (dir * (tau_end - tau) > 0) {
    if (++steps > opt.max_steps)
      throw StepFailureError("integrate: step budget exhausted");
    check_guards(ctx, y);  // a guard hit at an accepted state is fatal
    if (dir * (tau + h) > dir * tau_end) h = tau_end - tau;

    int rejects = 0;
    for (;;) {
      bool stage_failed = false;
      double err = 0.0;
      try {
        if (!have_k1) rhs(ctx, y, k1);
        rhs(ctx, y + h * DP45::a21 * k1, k2);
        rhs(ctx, y + h * (DP45::a31 * k1 + DP45::a32 * k2), k3);
        rhs(ctx, y + h * (DP45::a41 * k1 + DP45::a42 * k2 + DP45::a43 * k3), k4);
        rhs(ctx, y + h * (DP45::a51 * k1 + DP45::a52 * k2 + DP45::a53 * k3 +
                          DP45::a54 * k4), k5);
        rhs(ctx, y + h * (DP45::a61 * k1 + DP45::a62 * k2 + DP45::a63 * k3 +
                          DP45::a64 * k4 + DP45::a65 * k5), k6);
        ynew = y + h * (DP45::b1 * k1 + DP45::b3 * k3 + DP45::b4 * k4 +
                        DP45::b5 * k5 + DP45::b6 * k6);
        rhs(ctx, ynew, k7);
        yerr = h * (DP45::e1 * k1 + DP45::e3 * k3 + DP45::e4 * k4 +
                    DP45::e5 * k5 + DP45::e6 * k6 + DP45::e7 * k7);
        for (int i = 0; i < 16; ++i) {
          const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
          err += (yerr[i] / sc) * (yerr[i] / sc);
        }
        err = std::sqrt(err / 16.0);
        have_k1 = true;
      } catch (const NumericalError&) {
        stage_failed = true;  // stage left the domain; retry with smaller h
        have_k1 = false;
      }

      if (!stage_failed && err <= 1.0) {
        const double tau_prev = tau;
        const StateVec yprev = y;
        tau += h;
        y = ynew;
        k1 = k7;  // FSAL
        ++stats.accepted;
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        if (opt.h_max > 0 && std::abs(h) > opt.h_max) h = dir * opt.h_max;
        if (!on_step(tau_prev, yprev, tau, y)) return;
        break;
      }
      ++stats.rejected;
      if (++rejects > opt.max_rejects)
        throw StepFailureError("integrate: too many step rejections");
      const double fac = stage_failed
          ? 0.25
          : std::min(1.0, std::max(0.1, 0.9 * std::pow(err, -0.2)));
      h *= fac;
      if (std::abs(h) < 1e-15 * (std::abs(tau) + 1.0))
        throw StepFailureError("integrate: step size underflow");
    }
  }
}

Ctx make_ctx(const ExtendedState& s, const Guards& guards) {
  if (!s.metric) throw ConfigError("ExtendedState has no metric");
  Ctx ctx;
  ctx.metric = s.metric.get();
  ctx.m = s.m;
  ctx.c = s.metric->c();
  ctx.hbar = s.hbar;
  ctx.C1v = s.p[C1];
  ctx.C2v = s.p[C2];
  ctx.classical = s.classical_mode;
  ctx.guards = guards;
  return ctx;
}

double stop_value(const ExtendedState& s, const StopCondition& stop,
                  const Vec4& x) {
  (void)s;
  switch (stop.kind) {
    case StopCondition::Kind::IsotropicRadius:
      return x.tail<3>().norm() - stop.value;
    case StopCondition::Kind::CoordinateTime:
      return x[0] - stop.value;
    default:
      return 1.0;
  }
}

}  // namespace

double hamiltonian(const ExtendedState& s) {
  const Ctx ctx = make_ctx(s, Guards{});
  const StateVec y = pack(s);
  return h_full(ctx, ctx.metric->eval(s.x), y);
}

CanonicalRhs canonical_rhs(const ExtendedState& s, const Guards& guards) {
  const Ctx ctx = make_ctx(s, guards);
  StateVec y = pack(s), dy;
  rhs(ctx, y, dy);
  CanonicalRhs out;
  out.dx = dy.segment<4>(0);
  out.dq = dy.segment<4>(4);
  out.dpx = dy.segment<4>(8);
  out.dpq = dy.segment<4>(12);
  return out;
}

double solve_mass_shell(ExtendedState& s) {
  const Ctx ctx = make_ctx(s, Guards{});
  const MetricPoint mp = ctx.metric->eval(s.x);
  const double mc2 = s.m * ctx.c * ctx.c * s.m;

  double a, bco, cco;
  if (ctx.classical) {
    Vec4 p4 = s.p.segment<4>(0);
    p4[0] = 0.0;
    a = mp.g(0, 0);
    bco = 2.0 * (mp.g.row(0).dot(p4));
    cco = p4.dot(mp.g * p4) + mc2;
  } else {
    const Mat10 b = b_tensor(mp, s.q[0], s.q[1], s.q[3]);
    Vec10 p = s.p;
    p[PT] = 0.0;
    const double w = kernel_half_trace(mp.g, s.q[0], s.q[1], s.q[2], s.q[3]);
    const double rp = sqrt_P(s.p[PALPHA], s.p[C1], s.p[C2]);
    a = b(PT, PT);
    bco = 2.0 * (b.row(PT).dot(p));
    cco = p.dot(b * p) + w * rp + mc2;
  }

  if (a == 0.0) throw NoRootError("solve_mass_shell: B^tt vanishes");
  const double disc = bco * bco - 4.0 * a * cco;
  if (disc < 0.0)
    throw NoRootError("solve_mass_shell: negative discriminant (superluminal data)");
  const double sq = std::sqrt(disc);
  const double qq = -0.5 * (bco + (bco >= 0 ? sq : -sq));
  double r1, r2;
  if (qq != 0.0) {
    r1 = qq / a;
    r2 = cco / qq;
  } else {
    r1 = std::sqrt(-cco / a);
    r2 = -r1;
  }

  // future-directed: dt/dtau = (a p_t + bco/2)/m > 0
  auto tdot = [&](double pt) { return (a * pt + 0.5 * bco) / s.m; };
  double pt = tdot(r1) > 0 ? r1 : r2;
  if (tdot(pt) <= 0) throw NoRootError("solve_mass_shell: no future-directed root");

  // one Newton polish against rounding in the quadratic formula
  for (int it = 0; it < 2; ++it) {
    const double res = (a * pt * pt + bco * pt + cco) / (2.0 * s.m);
    const double slope = (2.0 * a * pt + bco) / (2.0 * s.m);
    if (slope != 0.0) pt -= res / slope;
  }
  s.p[PT] = pt;
  return pt;
}

ExtendedState hamiltonian_flow(const ExtendedState& s, double dtau,
                               const IntegratorOptions& opt, const Guards& guards) {
  const Ctx ctx = make_ctx(s, guards);
  StateVec y = pack(s);
  double tau = s.tau;
  StepStats stats;
  integrate_core(ctx, tau, y, s.tau + dtau, opt, stats,
                 [](double, const StateVec&, double&, StateVec&) { return true; });
  ExtendedState out = s;
  unpack(y, out);
  out.tau = tau;
  return out;
}

TrajectoryRecord integrate(const ExtendedState& s0, double tau_end,
                           const IntegrateOptions& opt) {
  ExtendedState s = s0;
  const Ctx ctx = make_ctx(s, opt.guards);
  const double mc2 = s.m * ctx.c * ctx.c;

  TrajectoryRecord rec;
  rec.m_c2 = mc2;
  rec.min_u_floor_margin = std::numeric_limits<double>::infinity();
  rec.min_rs_eigenvalue = std::numeric_limits<double>::infinity();

  auto sample = [&](double tau, const StateVec& y) {
    TrajectorySample smp;
    smp.tau = tau;
    smp.x = y.segment<4>(0);
    smp.q = y.segment<4>(4);
    smp.p = pbar_of(ctx, y);
    smp.H_Q = h_full(ctx, ctx.metric->eval(smp.x), y);
    smp.C1_v = ctx.C1v;
    smp.C2_v = ctx.C2v;
    if (opt.monitors && !ctx.classical) {
      ExtendedState tmp = s;
      unpack(y, tmp);
      const CanonicalChart ch = tmp.chart();
      MomentState ms;
      ms.delta = chart_to_moments(ch);
      ms.hbar = s.hbar;
      const PhysicalityReport rep = check_physicality(ms);
      smp.u_x = rep.u_x;
      smp.u_y = rep.u_y;
      const CovarianceMatrix sig = covariance_from_moments(ms, Ordering::ModeOrdered);
      smp.entropy = von_neumann_entropy(sig);
      smp.purity = purity(sig);
      const double floor = 0.25 * s.hbar * s.hbar;
      rec.min_u_floor_margin = std::min({rec.min_u_floor_margin,
                                         rep.u_x - floor, rep.u_y - floor});
      rec.min_rs_eigenvalue = std::min(rec.min_rs_eigenvalue, rep.min_rs_eigenvalue);
    }
    rec.max_abs_H = std::max(rec.max_abs_H, std::abs(smp.H_Q));
    if (std::abs(smp.H_Q) > opt.guards.constraint_tol_rel * mc2)
      throw StepFailureError("integrate: Hamiltonian constraint drift exceeded tolerance");
    rec.samples.push_back(smp);
  };

  StateVec y = pack(s);
  double tau = s.tau;
  StepStats stats;
  sample(tau, y);

  long since_sample = 0;
  bool stopped = false;
  double prev_stop = stop_value(s, opt.stop, s.x);

  integrate_core(ctx, tau, y, tau_end, opt.integ, stats,
    [&](double tau_prev, const StateVec& yprev, double& tau_now, StateVec& ynow) {
      if (opt.stop.kind != StopCondition::Kind::None) {
        ExtendedState tmp = s;
        unpack(ynow, tmp);
        const double g_now = stop_value(tmp, opt.stop, tmp.x);
        if (prev_stop * g_now <= 0.0 && prev_stop != g_now) {
          // refine the crossing by bisection on re-integration
          double lo = tau_prev, hi = tau_now;
          StateVec ycross = ynow;
          for (int it = 0; it < 80 && (hi - lo) > 1e-13 * (std::abs(hi) + 1.0); ++it) {
            const double mid = 0.5 * (lo + hi);
            StateVec ym = yprev;
            double tm = tau_prev;
            StepStats st2;
            IntegratorOptions o2 = opt.integ;
            o2.h_init = std::abs(mid - tau_prev);
            integrate_core(ctx, tm, ym, mid, o2, st2,
                           [](double, const StateVec&, double&, StateVec&) { return true; });
            ExtendedState t2 = s;
            unpack(ym, t2);
            if (prev_stop * stop_value(t2, opt.stop, t2.x) <= 0.0) {
              hi = mid;
              ycross = ym;
            } else {
              lo = mid;
            }
          }
          tau_now = hi;
          ynow = ycross;
          stopped = true;
        }
        prev_stop = g_now;
      }
      ++since_sample;
      if (stopped || since_sample >= opt.sample_every || tau_now == tau_end) {
        sample(tau_now, ynow);
        since_sample = 0;
      }
      return !stopped;
    });

  // ensure the endpoint is recorded
  if (rec.samples.empty() || rec.samples.back().tau != tau) sample(tau, y);

  rec.steps_accepted = stats.accepted;
  rec.steps_rejected = stats.rejected;
  rec.stopped_by_condition = stopped;
  unpack(y, s);
  s.tau = tau;
  rec.final_state = s;
  return rec;
}

double proper_time_functional(const TrajectoryRecord& record) {
  if (record.samples.empty())
    throw ConfigError("proper_time_functional: empty record");
  const double mc2 = record.m_c2;
  auto integrand = [&](const TrajectorySample& smp) {
    const double rad = 1.0 - 2.0 * smp.H_Q / mc2;
    if (rad < 0.0)
      throw ImaginaryError("proper_time_functional: negative radicand");
    return std::sqrt(rad);
  };
  double tq = 0.0;
  for (std::size_t i = 1; i < record.samples.size(); ++i) {
    const double dt = record.samples[i].tau - record.samples[i - 1].tau;
    tq += 0.5 * dt * (integrand(record.samples[i]) + integrand(record.samples[i - 1]));
  }
  return tq;
}

}  // namespace qgeo
