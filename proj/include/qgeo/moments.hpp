#pragma once

#include "qgeo/types.hpp"

namespace qgeo {

/// Second-order state of two quantized modes: means plus the ten moments
/// Delta_i in the fixed ordering of MomentVector, with explicit hbar.
struct MomentState {
  Vec4 mean_x = Vec4::Zero();
  Vec4 mean_p = Vec4::Zero();
  MomentVector delta{};
  double hbar = 1.0;
};

enum class Ordering { ModeOrdered, XPOrdered };

/// 4x4 covariance matrix in one of the two canonical-variable orderings:
/// ModeOrdered z = (x, p_x, y, p_y), XPOrdered z = (x, y, p_x, p_y).
struct CovarianceMatrix {
  Mat4 entries = Mat4::Zero();
  Ordering ordering = Ordering::ModeOrdered;
  double hbar = 1.0;
};

/// Antisymmetric symplectic form matching an ordering ({z_i, z_j} values).
Mat4 symplectic_form(Ordering ordering);

/// Permutation similarity between the orderings (involutive).
Mat4 ordering_permutation();

CovarianceMatrix covariance_from_moments(const MomentState& state, Ordering ordering);
CovarianceMatrix reorder(const CovarianceMatrix& sigma, Ordering ordering);

/// Inverse of covariance_from_moments on the delta block.
MomentVector moments_from_covariance(const CovarianceMatrix& sigma);

/// Poisson bracket {Delta_i, Delta_j} of two second-order moments, evaluated
/// at the given state. Closed bilinear form
///   {s_ab, s_cd} = Om_ac s_bd + Om_ad s_bc + Om_bc s_ad + Om_bd s_ac
/// obtained from the product rule on expectation values; reproduces the
/// single-mode brackets {D(x^2),D(p^2)} = 4 D(xp), {D(x^2),D(xp)} = 2 D(x^2),
/// {D(xp),D(p^2)} = 2 D(p^2).
double moment_poisson_bracket(int i, int j, const MomentState& state);

/// Full 10x10 Poisson tensor P_ij = {Delta_i, Delta_j}.
Mat10 moment_poisson_tensor(const MomentState& state);

struct PhysicalityReport {
  double min_rs_eigenvalue = 0.0;  // min eigenvalue of sigma + (i hbar/2) Omega
  double det_sigma = 0.0;
  double u_x = 0.0;  // D(x^2)D(px^2) - D(xpx)^2
  double u_y = 0.0;
  bool variances_nonnegative = false;
  bool sigma_psd = false;
  bool rs_positive = false;
  bool single_mode_ok = false;  // U_x, U_y >= hbar^2/4 - tol
  bool pass = false;
};

/// Default positivity tolerance: covariance entries scale as hbar.
inline double default_psd_tol(double hbar) { return 1e-10 * hbar * hbar; }

PhysicalityReport check_physicality(const MomentState& state, double tol);
PhysicalityReport check_physicality(const MomentState& state);

}  // namespace qgeo
