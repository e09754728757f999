#pragma once

#include <cstdint>

#include "qgeo/chart.hpp"
#include "qgeo/moments.hpp"
#include "qgeo/types.hpp"

namespace qgeo {

/// Deterministic generator (splitmix64 core) so test and validation output is
/// reproducible across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();  // Box-Muller

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct ChartSampleOptions {
  double hbar = 1.0;
  double sin_beta_min = 0.05;
  double sqrtP_min = 1e-6;
  /// Lower bound on sqrt(P)/C1^2; raise it for finite-difference work near
  /// the quartic scalar.
  double sqrtP_rel_min = 0.0;
  double s_lo = 0.6, s_hi = 1.8;
  double ps_range = 0.8;
  double C1_lo_factor = 1.05;  // times the hbar/sqrt(2) floor
  double C1_hi_factor = 2.5;
};

/// Random chart on the physical stratum: Casimir ordering, inner p_alpha
/// branch, Robertson-Schroedinger positivity of the image verified by
/// rejection.
CanonicalChart random_physical_chart(Rng& rng, const ChartSampleOptions& opt = {});

/// Random physical covariance (mode-ordered): M M^T rescaled so the smaller
/// symplectic eigenvalue sits above hbar/2.
CovarianceMatrix random_physical_covariance(Rng& rng, double hbar = 1.0);

/// Random element of Sp(4,R) as a product of single-mode rotations, squeezes
/// and a two-mode mixer; S^T Omega S = Omega to machine precision.
Mat4 random_symplectic(Rng& rng);

}  // namespace qgeo
