#include "qgeo/moments.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace qgeo {

namespace {

// Placement of the ten moments inside the mode-ordered 4x4 matrix,
// z = (x, p_x, y, p_y).
constexpr int kPlace[10][2] = {
    {0, 0}, {0, 1}, {1, 1},   // xx, xpx, pxpx
    {2, 2}, {2, 3}, {3, 3},   // yy, ypy, pypy
    {0, 2}, {0, 3}, {1, 2}, {1, 3},  // xy, xpy, pxy, pxpy
};

Mat4 mode_sigma(const MomentVector& d) {
  Mat4 s = Mat4::Zero();
  for (int k = 0; k < 10; ++k) {
    s(kPlace[k][0], kPlace[k][1]) = d[k];
    s(kPlace[k][1], kPlace[k][0]) = d[k];
  }
  return s;
}

}  // namespace

Mat4 symplectic_form(Ordering ordering) {
  Mat4 om = Mat4::Zero();
  if (ordering == Ordering::ModeOrdered) {
    om(0, 1) = 1; om(1, 0) = -1;
    om(2, 3) = 1; om(3, 2) = -1;
  } else {
    om(0, 2) = 1; om(2, 0) = -1;
    om(1, 3) = 1; om(3, 1) = -1;
  }
  return om;
}

Mat4 ordering_permutation() {
  // (x, p_x, y, p_y) -> (x, y, p_x, p_y); swapping slots 1 and 2 is its own
  // inverse, so the same matrix maps both ways.
  Mat4 p = Mat4::Zero();
  p(0, 0) = 1; p(1, 2) = 1; p(2, 1) = 1; p(3, 3) = 1;
  return p;
}

CovarianceMatrix covariance_from_moments(const MomentState& state, Ordering ordering) {
  CovarianceMatrix out;
  out.hbar = state.hbar;
  out.ordering = Ordering::ModeOrdered;
  out.entries = mode_sigma(state.delta);
  if (ordering == Ordering::XPOrdered) return reorder(out, Ordering::XPOrdered);
  return out;
}

CovarianceMatrix reorder(const CovarianceMatrix& sigma, Ordering ordering) {
  if (sigma.ordering == ordering) return sigma;
  const Mat4 p = ordering_permutation();
  CovarianceMatrix out;
  out.hbar = sigma.hbar;
  out.ordering = ordering;
  out.entries = p * sigma.entries * p.transpose();
  return out;
}

MomentVector moments_from_covariance(const CovarianceMatrix& sigma) {
  const Mat4 s = reorder(sigma, Ordering::ModeOrdered).entries;
  MomentVector d{};
  for (int k = 0; k < 10; ++k) d[k] = s(kPlace[k][0], kPlace[k][1]);
  return d;
}

double moment_poisson_bracket(int i, int j, const MomentState& state) {
  if (i < 0 || i >= 10 || j < 0 || j >= 10)
    throw std::out_of_range("moment index must be in 0..9");
  const Mat4 s = mode_sigma(state.delta);
  const Mat4 om = symplectic_form(Ordering::ModeOrdered);
  const int a = kPlace[i][0], b = kPlace[i][1];
  const int c = kPlace[j][0], d = kPlace[j][1];
  return om(a, c) * s(b, d) + om(a, d) * s(b, c) +
         om(b, c) * s(a, d) + om(b, d) * s(a, c);
}

Mat10 moment_poisson_tensor(const MomentState& state) {
  Mat10 p;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) p(i, j) = moment_poisson_bracket(i, j, state);
  return p;
}

PhysicalityReport check_physicality(const MomentState& state, double tol) {
  PhysicalityReport r;
  const MomentVector& d = state.delta;
  const Mat4 s = mode_sigma(d);
  const double h = state.hbar;

  r.det_sigma = s.determinant();
  r.u_x = d[0] * d[2] - d[1] * d[1];
  r.u_y = d[3] * d[5] - d[4] * d[4];
  r.variances_nonnegative = d[0] >= 0 && d[2] >= 0 && d[3] >= 0 && d[5] >= 0;

  Eigen::SelfAdjointEigenSolver<Mat4> es(s);
  r.sigma_psd = es.eigenvalues().minCoeff() >= -tol;

  Eigen::Matrix4cd rs = s.cast<std::complex<double>>();
  rs += std::complex<double>(0.0, 0.5 * h) *
        symplectic_form(Ordering::ModeOrdered).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> rse(rs);
  r.min_rs_eigenvalue = rse.eigenvalues().minCoeff();
  r.rs_positive = r.min_rs_eigenvalue >= -tol;

  r.single_mode_ok = r.u_x >= 0.25 * h * h - tol && r.u_y >= 0.25 * h * h - tol;
  r.pass = r.variances_nonnegative && r.sigma_psd && r.rs_positive && r.single_mode_ok;
  return r;
}

PhysicalityReport check_physicality(const MomentState& state) {
  return check_physicality(state, default_psd_tol(state.hbar));
}

}  // namespace qgeo
