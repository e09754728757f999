#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qgeo/chart.hpp"
#include "qgeo/finsler.hpp"
#include "qgeo/metrics.hpp"
#include "qgeo/types.hpp"

namespace qgeo {

/// Full extended phase point: event, quantum configuration (s_x, s_y, alpha,
/// beta), extended momentum (with the Casimir momenta C1, C2 in the last two
/// slots), affine parameter and particle data. The Casimirs are never touched
/// by the integrator.
struct ExtendedState {
  Vec4 x = Vec4::Zero();
  Vec4 q = Vec4(1.0, 1.0, 0.0, 1.5707963267948966);  // (s_x, s_y, alpha, beta)
  Vec10 p = Vec10::Zero();
  double tau = 0.0;
  double m = 1.0;
  double hbar = 1.0;
  /// Freezes every quantum variable at zero influence; H is the classical
  /// geodesic Hamiltonian. Used for classical-limit oracles.
  bool classical_mode = false;
  std::shared_ptr<const MetricField> metric;

  CanonicalChart chart() const {
    return CanonicalChart{q[0], p[PSX], q[1], p[PSY], q[2], p[PALPHA],
                          q[3], p[PBETA], p[C1], p[C2], hbar};
  }
};

struct Guards {
  double eps_beta = 1e-8;   // on sin(beta)
  double s_min = 1e-10;
  double constraint_tol_rel = 1e-6;  // fail fast when |H_Q| exceeds this * m c^2
};

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;   // 0: choose automatically
  double h_max = 0.0;    // 0: unbounded
  long max_steps = 5000000;
  int max_rejects = 80;
};

/// Hamiltonian and its canonical gradient at a state. Momentum derivatives
/// are analytic (the quadratic tensor contraction plus the analytic gradient
/// of sqrt(P)); the alpha derivative is analytic; derivatives through the
/// remaining configuration variables and through the metric coefficients use
/// fourth-order central differences of the quantum part only, so the
/// classical block is always analytic.
double hamiltonian(const ExtendedState& s);

struct CanonicalRhs {
  Vec4 dx;   // d(t,x,y,z)/dtau
  Vec4 dq;   // d(s_x,s_y,alpha,beta)/dtau
  Vec4 dpx;  // d(p_t..p_z)/dtau
  Vec4 dpq;  // d(p_sx,p_sy,p_alpha,p_beta)/dtau
};
CanonicalRhs canonical_rhs(const ExtendedState& s, const Guards& guards);

/// Solve the mass shell 2m H_Q = 0 for p_t; returns the future-directed root
/// and stores it in the state. The quartic scalar does not involve p_t and is
/// folded into the constant term.
double solve_mass_shell(ExtendedState& s);

/// Advance by dtau (may be negative) with adaptive embedded RK 5(4) steps.
ExtendedState hamiltonian_flow(const ExtendedState& s, double dtau,
                               const IntegratorOptions& opt = {},
                               const Guards& guards = {});

struct StopCondition {
  enum class Kind { None, IsotropicRadius, CoordinateTime };
  Kind kind = Kind::None;
  double value = 0.0;  // threshold on |x| (isotropic) or on t
};

struct TrajectorySample {
  double tau = 0.0;
  Vec4 x, q;
  Vec10 p;
  double H_Q = 0.0;
  double C1_v = 0.0, C2_v = 0.0;
  double u_x = 0.0, u_y = 0.0;
  double entropy = 0.0, purity = 0.0;
};

struct TrajectoryRecord {
  std::vector<TrajectorySample> samples;
  ExtendedState final_state;
  double max_abs_H = 0.0;
  double min_u_floor_margin = 0.0;  // min(U - hbar^2/4) over samples
  double min_rs_eigenvalue = 0.0;
  long steps_accepted = 0;
  long steps_rejected = 0;
  long reprojections = 0;
  bool stopped_by_condition = false;
  double m_c2 = 0.0;
};

struct IntegrateOptions {
  IntegratorOptions integ;
  Guards guards;
  int sample_every = 1;
  StopCondition stop;
  bool monitors = true;
  /// Drift remedy: when |H_Q| exceeds this fraction of m c^2 after a step,
  /// re-solve the mass shell for p_t once (0 disables; the default gauge
  /// evolves p_t dynamically and only monitors the constraint).
  double reproject_drift_rel = 0.0;
};

TrajectoryRecord integrate(const ExtendedState& s0, double tau_end,
                           const IntegrateOptions& opt = {});

/// tau_Q = integral of sqrt(1 - 2 H_Q / (m c^2)) dtau over the record samples
/// (trapezoid). Equals the affine span when the constraint holds.
double proper_time_functional(const TrajectoryRecord& record);

}  // namespace qgeo
