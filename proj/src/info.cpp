#include "qgeo/info.hpp"

#include <cmath>

#include "qgeo/errors.hpp"

namespace qgeo {

std::pair<double, double> symplectic_eigenvalues(const CovarianceMatrix& sigma) {
  const Mat4 s = reorder(sigma, Ordering::ModeOrdered).entries;
  const double h = sigma.hbar;
  const Mat4 om = symplectic_form(Ordering::ModeOrdered);

  double nu_p, nu_m;
  const Eigen::LLT<Mat4> llt(s);
  if (llt.info() == Eigen::Success) {
    // |eig(i Om s)| via the antisymmetric matrix L^T Om L, which is similar
    // to Om s; its singular values are the symplectic eigenvalues, each
    // twice. Backward stable, unlike the invariant formula whose
    // discriminant cancels when nu_+ ~ nu_-.
    const Mat4 l = llt.matrixL();
    const Eigen::JacobiSVD<Mat4> svd(l.transpose() * om * l);
    nu_p = svd.singularValues()[0];
    nu_m = svd.singularValues()[2];
  } else {
    // sigma not strictly positive: fall back to the invariant formula
    const Eigen::Matrix2d sx = s.block<2, 2>(0, 0);
    const Eigen::Matrix2d sy = s.block<2, 2>(2, 2);
    const Eigen::Matrix2d sxy = s.block<2, 2>(0, 2);
    const double seralian =
        sx.determinant() + sy.determinant() + 2.0 * sxy.determinant();
    const double disc =
        std::sqrt(std::max(seralian * seralian - 4.0 * s.determinant(), 0.0));
    nu_p = std::sqrt(std::max(0.5 * (seralian + disc), 0.0));
    nu_m = std::sqrt(std::max(0.5 * (seralian - disc), 0.0));
  }
  if (nu_m < 0.5 * h * (1.0 - 1e-8))
    throw NonPhysicalError("symplectic_eigenvalues: nu_- below hbar/2");
  return {nu_p, nu_m};
}

std::pair<double, double> casimirs_from_sigma(const CovarianceMatrix& sigma) {
  const auto [np, nm] = symplectic_eigenvalues(sigma);
  const double c1 = std::sqrt(np * np + nm * nm);
  double c2 = std::sqrt(std::max(np * np - nm * nm, 0.0));
  // C2 = 0 is a fourth-root branch point: below the eigenvalue noise floor
  // the state is on the Gaussian stratum to working precision.
  if (c2 * c2 < 1e-12 * c1 * c1) c2 = 0.0;
  return {c1, c2};
}

std::pair<double, double> casimirs_from_traces(const CovarianceMatrix& sigma) {
  const Mat4 s = reorder(sigma, Ordering::ModeOrdered).entries;
  const Mat4 m = symplectic_form(Ordering::ModeOrdered) * s;
  const Mat4 m2 = m * m;
  const double c1sq = -0.5 * m2.trace();
  const double c2q = (m2 * m2).trace() - c1sq * c1sq;
  return {std::sqrt(std::max(c1sq, 0.0)), std::pow(std::max(c2q, 0.0), 0.25)};
}

double entropy_kernel(double nu) {
  const double up = 0.5 * (nu + 1.0);
  const double dn = 0.5 * (nu - 1.0);
  double out = up * std::log2(up);
  if (dn > 1e-300) out -= dn * std::log2(dn);  // 0*log(0) := 0 at nu = 1
  return out;
}

double von_neumann_entropy(const CovarianceMatrix& sigma) {
  const auto [np, nm] = symplectic_eigenvalues(sigma);
  const double h = sigma.hbar;
  return entropy_kernel(2.0 * np / h) + entropy_kernel(2.0 * nm / h);
}

double purity(const CovarianceMatrix& sigma) {
  const double det = reorder(sigma, Ordering::ModeOrdered).entries.determinant();
  if (det <= 0.0)
    throw DegenerateError("purity: det(sigma) must be positive");
  const double h = sigma.hbar;
  return 0.25 * h * h / std::sqrt(det);
}

CovarianceMatrix gaussian_covariance(const GaussianParams& params) {
  const Eigen::Matrix2d& sx = params.sigma_x;
  const Eigen::Matrix2d& sxp = params.sigma_xp;
  const double h = params.hbar;

  const double det = sx.determinant();
  if (std::abs(det) < 1e-300)
    throw SingularMatrixError("gaussian_covariance: Sigma_x not invertible");
  const Eigen::Matrix2d sxinv = sx.inverse();

  // Wavefunction consistency: the imaginary quadratic form must be symmetric.
  const Eigen::Matrix2d m = sxinv * sxp;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + m.cwiseAbs().maxCoeff()))
    throw DomainError("gaussian_covariance: Sigma_x^{-1} Sigma_xp must be symmetric");

  const Eigen::Matrix2d sp = sxinv * (0.25 * h * h * Eigen::Matrix2d::Identity() + sxp * sxp);

  CovarianceMatrix out;
  out.hbar = h;
  out.ordering = Ordering::XPOrdered;
  out.entries.block<2, 2>(0, 0) = sx;
  out.entries.block<2, 2>(0, 2) = sxp;
  out.entries.block<2, 2>(2, 0) = sxp.transpose();
  out.entries.block<2, 2>(2, 2) = 0.5 * (sp + sp.transpose());
  return out;
}

namespace {

int label_index(const std::string& l) {
  if (l == "x") return 0;
  if (l == "p_x" || l == "px") return 1;
  if (l == "y") return 2;
  if (l == "p_y" || l == "py") return 3;
  throw ConfigError("uncertainty_product: invalid operator label '" + l + "'");
}

}  // namespace

double uncertainty_product(const MomentVector& delta, const std::string& a1,
                           const std::string& a2, const std::string& b1,
                           const std::string& b2) {
  MomentState st;
  st.delta = delta;
  const Mat4 s = covariance_from_moments(st, Ordering::ModeOrdered).entries;
  const int ia1 = label_index(a1), ia2 = label_index(a2);
  const int ib1 = label_index(b1), ib2 = label_index(b2);
  return s(ia1, ib1) * s(ia2, ib2) - s(ia1, ib2) * s(ia2, ib1);
}

InfoReport info_report(const MomentState& state) {
  const CovarianceMatrix sigma = covariance_from_moments(state, Ordering::ModeOrdered);
  InfoReport r;
  std::tie(r.nu_plus, r.nu_minus) = symplectic_eigenvalues(sigma);
  r.entropy = von_neumann_entropy(sigma);
  r.purity = purity(sigma);
  const auto cs = casimirs_from_sigma(sigma);
  r.C1 = cs.first;
  r.C2 = cs.second;
  r.det_sigma = sigma.entries.determinant();
  return r;
}

}  // namespace qgeo
