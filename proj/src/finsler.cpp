#include "qgeo/finsler.hpp"

#include <cmath>

#include "qgeo/chart.hpp"
#include "qgeo/errors.hpp"

namespace qgeo {

namespace {

constexpr int X = kQuantX;  // coordinate index of quantized x
constexpr int Y = kQuantY;

// Moment lookups on the mode-ordered covariance built from delta.
struct MomentTable {
  double pp[2][2];  // D(p_i p_j)
  double xp[2][2];  // D(x^k p_j), first index position
  double xx[2][2];  // D(x^k x^l)

  explicit MomentTable(const MomentVector& d) {
    pp[0][0] = d[2]; pp[0][1] = d[9]; pp[1][0] = d[9]; pp[1][1] = d[5];
    xp[0][0] = d[1]; xp[0][1] = d[7]; xp[1][0] = d[8]; xp[1][1] = d[4];
    xx[0][0] = d[0]; xx[0][1] = d[6]; xx[1][0] = d[6]; xx[1][1] = d[3];
  }
};

inline int coord_of(int quant_index) { return quant_index == 0 ? X : Y; }

}  // namespace

double hq_moment_form(const MetricPoint& mp, const Vec4& p, const MomentVector& delta,
                      double m, double c) {
  const MomentTable t(delta);
  double v = p.dot(mp.g * p) + m * m * c * c;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      v += mp.g(coord_of(i), coord_of(j)) * t.pp[i][j];
      v += 2.0 * (mp.dg[coord_of(i)].row(coord_of(j)) * p).value() * t.xp[i][j];
      v += 0.5 * p.dot(mp.d2g[coord_of(i)][coord_of(j)] * p) * t.xx[i][j];
    }
  return v / (2.0 * m);
}

Eigen::Matrix2d quartic_kernel(double s_x, double s_y, double alpha, double beta) {
  const double sb = std::sin(beta);
  if (sb < kEpsBeta) throw SingularityError("quartic_kernel: sin(beta) below guard");
  const double csc2 = 1.0 / (sb * sb);
  Eigen::Matrix2d k;
  k(0, 0) = -std::sin(alpha + beta) / (s_x * s_x);
  k(1, 1) = -std::sin(alpha - beta) / (s_y * s_y);
  k(0, 1) = k(1, 0) = std::sin(alpha) / (s_x * s_y);
  return csc2 * k;
}

double kernel_half_trace(const Mat4& g, double s_x, double s_y, double alpha,
                         double beta) {
  const Eigen::Matrix2d k = quartic_kernel(s_x, s_y, alpha, beta);
  return 0.5 * (k(0, 0) * g(X, X) + 2.0 * k(0, 1) * g(X, Y) + k(1, 1) * g(Y, Y));
}

double quartic_part(const MetricPoint& mp, double s_x, double s_y, double alpha,
                    double beta, double p_alpha, double C1, double C2) {
  return kernel_half_trace(mp.g, s_x, s_y, alpha, beta) * sqrt_P(p_alpha, C1, C2);
}

Mat10 b_tensor(const MetricPoint& mp, double s_x, double s_y, double beta) {
  const double sb = std::sin(beta);
  const double cb = std::cos(beta);
  if (sb < kEpsBeta) throw SingularityError("b_tensor: sin(beta) below guard");
  if (s_x <= 0 || s_y <= 0) throw DomainError("b_tensor: s_x, s_y must be positive");

  Mat10 b = Mat10::Zero();
  b.block<4, 4>(0, 0) = state_averaged_metric(mp, s_x, s_y, beta);

  for (int a = 0; a < 4; ++a) {
    // D block: material derivatives coupling p_a to p_{s_i}
    b(a, PSX) = b(PSX, a) = s_x * mp.dg[X](X, a) + s_y * cb * mp.dg[Y](X, a);
    b(a, PSY) = b(PSY, a) = s_y * mp.dg[Y](Y, a) + s_x * cb * mp.dg[X](Y, a);
    // E block: antisymmetric (alpha) and symmetric (beta) metric gradients
    b(a, PALPHA) = b(PALPHA, a) =
        sb * ((s_y / s_x) * mp.dg[Y](X, a) - (s_x / s_y) * mp.dg[X](Y, a));
    b(a, PBETA) = b(PBETA, a) =
        -sb * ((s_y / s_x) * mp.dg[Y](X, a) + (s_x / s_y) * mp.dg[X](Y, a));
  }

  b(PSX, PSX) = mp.g(X, X);
  b(PSY, PSY) = mp.g(Y, Y);
  b(PSX, PSY) = b(PSY, PSX) = cb * mp.g(X, Y);

  // C block, from g^{xy} D(p_x p_y)
  b(PSX, PALPHA) = b(PALPHA, PSX) = -sb * mp.g(X, Y) / s_y;
  b(PSX, PBETA) = b(PBETA, PSX) = -sb * mp.g(X, Y) / s_y;
  b(PSY, PALPHA) = b(PALPHA, PSY) = sb * mp.g(X, Y) / s_x;
  b(PSY, PBETA) = b(PBETA, PSY) = -sb * mp.g(X, Y) / s_x;

  // Theta block; T1 = Tr(Sigma_x^{-1} g^{-1}), T2 the partially transposed trace
  const double csc2 = 1.0 / (sb * sb);
  const double t1 = csc2 * (mp.g(X, X) / (s_x * s_x) + mp.g(Y, Y) / (s_y * s_y) -
                            2.0 * cb * mp.g(X, Y) / (s_x * s_y));
  const double t2 = csc2 * (mp.g(X, X) / (s_x * s_x) + mp.g(Y, Y) / (s_y * s_y) +
                            2.0 * cb * mp.g(X, Y) / (s_x * s_y));
  b(PALPHA, PALPHA) = sb * sb * t2 - 2.0 * t1;
  b(PALPHA, PBETA) = b(PBETA, PALPHA) =
      -mp.g(X, X) / (s_x * s_x) + mp.g(Y, Y) / (s_y * s_y);
  b(PBETA, PBETA) = sb * sb * t1;

  b(C1, C1) = 0.5 * t1;
  // C2 row/column identically zero: C2 enters only through the quartic part.
  return b;
}

double hq_canonical(const MetricPoint& mp, const Vec10& pbar, const QuantumShape& q,
                    double m, double c) {
  const Mat10 b = b_tensor(mp, q.s_x, q.s_y, q.beta);
  const double w = kernel_half_trace(mp.g, q.s_x, q.s_y, q.alpha, q.beta);
  const double rp = sqrt_P(pbar[PALPHA], pbar[C1], pbar[C2]);
  return (pbar.dot(b * pbar) + w * rp + m * m * c * c) / (2.0 * m);
}

Vec10 sqrt_P_gradient(double p_alpha, double C1, double C2) {
  Vec10 g = Vec10::Zero();
  const double rp = sqrt_P(p_alpha, C1, C2);
  if (rp <= kGaugeRel * C1 * C1) return g;  // gauge stratum: stay on it
  const double rho = C1 * C1 - 4.0 * p_alpha * p_alpha;
  g[PALPHA] = -8.0 * p_alpha * rho / rp;
  g[ExtSlot::C1] = -8.0 * C1 * p_alpha * p_alpha / rp;
  g[ExtSlot::C2] = 2.0 * C2 * C2 * C2 / rp;
  return g;
}

FinslerTensors fundamental_tensor(const MetricPoint& mp, const QuantumShape& q,
                                  const Vec10& pbar, double m, double c) {
  FinslerTensors out;
  out.B = b_tensor(mp, q.s_x, q.s_y, q.beta);
  out.B_scalar = pbar.dot(out.B * pbar);

  const double w = kernel_half_trace(mp.g, q.s_x, q.s_y, q.alpha, q.beta);
  const double pa = pbar[PALPHA], c1 = pbar[ExtSlot::C1], c2 = pbar[ExtSlot::C2];
  const double rp = sqrt_P(pa, c1, c2);
  out.sqrt_A = w * rp;
  out.A_scalar = out.sqrt_A * out.sqrt_A;
  out.H_Q = (out.B_scalar + out.sqrt_A + m * m * c * c) / (2.0 * m);
  out.g_Q = out.B;

  if (rp <= kGaugeRel * c1 * c1) {
    out.quartic_degenerate = true;  // Gaussian subset: quartic part absent
    return out;
  }

  // Momentum Hessian of W = w sqrt(P) over the slots (p_alpha, C1, C2).
  const double rho = c1 * c1 - 4.0 * pa * pa;
  Eigen::Vector3d dP(-16.0 * pa * rho, -16.0 * c1 * pa * pa, 4.0 * c2 * c2 * c2);
  Eigen::Matrix3d d2P;
  d2P << -16.0 * rho + 128.0 * pa * pa, -32.0 * pa * c1, 0.0,
         -32.0 * pa * c1, -16.0 * pa * pa, 0.0,
         0.0, 0.0, 12.0 * c2 * c2;
  const double P = rp * rp;
  const Eigen::Matrix3d hess =
      w * (d2P / (2.0 * rp) - dP * dP.transpose() / (4.0 * P * rp));
  const int slots[3] = {PALPHA, ExtSlot::C1, ExtSlot::C2};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.g_Q(slots[i], slots[j]) += 0.5 * hess(i, j);

  if (std::abs(out.sqrt_A) > 0.0) {
    // Reporting contractions: A^a = dA/dp_a / (4 A^{3/4}), A^{ab} = d2A/(12 sqrt(A)).
    const double absw = std::abs(out.sqrt_A);
    Vec10 dW = w * sqrt_P_gradient(pa, c1, c2);
    out.A_a = 2.0 * out.sqrt_A * dW / (4.0 * std::pow(absw, 1.5));
    Mat10 d2W = Mat10::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) d2W(slots[i], slots[j]) = hess(i, j);
    out.A_ab = (2.0 * dW * dW.transpose() + 2.0 * out.sqrt_A * d2W) / (12.0 * absw);
  }
  return out;
}

Mat6 single_mode_metric(const MetricPoint& mp, double s, double hbar) {
  if (s <= 0) throw DomainError("single_mode_metric: s must be positive");
  Mat6 g = Mat6::Zero();
  g.block<4, 4>(0, 0) = mp.g + 0.5 * s * s * mp.d2g[X][X];
  for (int a = 0; a < 4; ++a) g(a, 4) = g(4, a) = s * mp.dg[X](X, a);
  g(4, 4) = mp.g(X, X);
  g(5, 5) = 0.25 * hbar * hbar * mp.g(X, X) / (s * s);
  return g;
}

Mat4 state_averaged_metric(const MetricPoint& mp, double s_x, double s_y, double beta) {
  return mp.g + 0.5 * (s_x * s_x * mp.d2g[X][X] +
                       2.0 * s_x * s_y * std::cos(beta) * mp.d2g[X][Y] +
                       s_y * s_y * mp.d2g[Y][Y]);
}

}  // namespace qgeo
