#pragma once

#include <string>
#include <utility>

#include "qgeo/moments.hpp"
#include "qgeo/types.hpp"

namespace qgeo {

/// Position-sector data of a pure two-mode Gaussian state. The momentum
/// statistics follow from Sigma_p = Sigma_x^{-1} (hbar^2/4 I + Sigma_xp^2).
struct GaussianParams {
  Eigen::Matrix2d sigma_x = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d sigma_xp = Eigen::Matrix2d::Zero();
  double hbar = 1.0;
};

struct InfoReport {
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  double entropy = 0.0;   // von Neumann entropy, bits
  double purity = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double det_sigma = 0.0;
};

/// Symplectic eigenvalues nu_+ >= nu_- > 0: magnitudes of the eigenvalues of
/// i Omega sigma. Two-mode closed form via the symplectic invariants
/// Delta = det(sigma_x) + det(sigma_y) + 2 det(sigma_xy) and det(sigma):
///   nu_pm^2 = (Delta pm sqrt(Delta^2 - 4 det sigma)) / 2.
std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& sigma);

/// Quadratic and quartic Casimirs C1^2 = nu+^2 + nu-^2, C2^2 = nu+^2 - nu-^2.
std::pair<double, double> casimirs_from_sigma(const CovarianceMatrix& sigma);

/// Casimirs through the trace route, Tr[(Omega sigma)^{2k}]. Normalization
/// fixed against the eigenvalue route: C1^2 = -Tr[(Om s)^2]/2 and
/// C2^4 = Tr[(Om s)^4] - C1^4.
std::pair<double, double> casimirs_from_traces(const CovarianceMatrix& sigma);

/// Entropy kernel s_V(nu) = ((nu+1)/2) log2((nu+1)/2) - ((nu-1)/2) log2((nu-1)/2),
/// continued by 0*log(0) = 0 at nu = 1.
double entropy_kernel(double nu);

/// S_V = s_V(2 nu_+/hbar) + s_V(2 nu_-/hbar), in bits.
double von_neumann_entropy(const CovarianceMatrix& sigma);

/// mu = (hbar^2/4)/sqrt(det sigma); 1 exactly on pure Gaussian states.
double purity(const CovarianceMatrix& sigma);

/// Assemble the full covariance matrix of a pure Gaussian state from its
/// position-sector data. Requires Sigma_x invertible and Sigma_x^{-1} Sigma_xp
/// symmetric (wavefunction consistency).
CovarianceMatrix gaussian_covariance(const GaussianParams& params);

/// Generalized uncertainty product
/// D(A1 B1) D(A2 B2) - D(A1 B2) D(A2 B1), labels from {x, y, p_x, p_y}.
double uncertainty_product(const MomentVector& delta, const std::string& a1,
                           const std::string& a2, const std::string& b1,
                           const std::string& b2);

InfoReport info_report(const MomentState& state);

}  // namespace qgeo
