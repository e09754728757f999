#pragma once

#include "qgeo/metrics.hpp"
#include "qgeo/moments.hpp"
#include "qgeo/types.hpp"

namespace qgeo {

/// Configuration variables of the quantum sector entering the tensors.
struct QuantumShape {
  double s_x = 1.0;
  double s_y = 1.0;
  double alpha = 0.0;
  double beta = 1.5707963267948966;
};

/// Quantum geodesic Hamiltonian in moment form,
///   2m H = g^{ab} p_a p_b + m^2 c^2 + g^{ij} D(p_i p_j)
///          + 2 d_k g^{aj} p_a D(x^k p_j) + (1/2) d_k d_l g^{ab} p_a p_b D(x^k x^l),
/// with i, j, k, l over the two quantized directions. The factor 2 on the
/// mixed term is the Taylor coefficient 1/(1! 1!) of d^2 H / dx dp; it is
/// required for consistency with the quadratic-tensor blocks.
double hq_moment_form(const MetricPoint& mp, const Vec4& p, const MomentVector& delta,
                      double m, double c);

/// Kernel K_ij(s_x, s_y, alpha, beta) of the quartic part.
Eigen::Matrix2d quartic_kernel(double s_x, double s_y, double alpha, double beta);

/// w = (1/2) K_ij g^ij; the quartic part of the Hamiltonian is w sqrt(P).
double kernel_half_trace(const Mat4& g, double s_x, double s_y, double alpha,
                         double beta);

/// Signed quartic scalar sqrt(A) = (1/2) K_ij g^ij sqrt(P). May have either
/// sign; the Hamiltonian uses it directly and A = (sqrt A)^2.
double quartic_part(const MetricPoint& mp, double s_x, double s_y, double alpha,
                    double beta, double p_alpha, double C1, double C2);

/// Quadratic tensor B^{ab} on the extended momentum space, 10x10 in the slot
/// order of ExtSlot. The C2 row and column are identically zero.
Mat10 b_tensor(const MetricPoint& mp, double s_x, double s_y, double beta);

/// Canonical-variable form of the Hamiltonian,
///   H = (pbar^T B pbar + sqrt(A) + m^2 c^2) / (2m).
double hq_canonical(const MetricPoint& mp, const Vec10& pbar, const QuantumShape& q,
                    double m, double c);

struct FinslerTensors {
  double H_Q = 0.0;
  double A_scalar = 0.0;   // full quartic contraction A = (sqrt A)^2
  double sqrt_A = 0.0;     // signed
  double B_scalar = 0.0;   // pbar^T B pbar
  Mat10 B = Mat10::Zero();
  Mat10 g_Q = Mat10::Zero();
  Vec10 A_a = Vec10::Zero();     // normalized contraction A^a   (A > 0 only)
  Mat10 A_ab = Mat10::Zero();    // normalized contraction A^ab  (A > 0 only)
  bool quartic_degenerate = false;  // sqrt(P) = 0: g_Q = B, flag set
};

/// Fundamental tensor g_Q = m d^2 H / dp dp = B + 3 A^{ab} - 2 A^a A^b,
/// evaluated through the analytic momentum Hessian of the signed quartic
/// scalar (the contraction form and the Hessian agree for sqrt(A) > 0).
FinslerTensors fundamental_tensor(const MetricPoint& mp, const QuantumShape& q,
                                  const Vec10& pbar, double m, double c);

/// Single-mode six-dimensional extended metric over (p_t,p_x,p_y,p_z,p_s,p_q).
Mat6 single_mode_metric(const MetricPoint& mp, double s, double hbar);

/// State-averaged inverse metric
/// <g^{ab}> = (1 + (1/2)(s_x^2 dxx + 2 s_x s_y cos(beta) dxy + s_y^2 dyy)) g^{ab}.
Mat4 state_averaged_metric(const MetricPoint& mp, double s_x, double s_y, double beta);

/// Gradient of sqrt(P) in the (p_alpha, C1, C2) slots; zero elsewhere.
Vec10 sqrt_P_gradient(double p_alpha, double C1, double C2);

}  // namespace qgeo
