#pragma once

#include <cstdint>

#include "partition.hpp"
#include "sibuya.hpp"

namespace epkit::estimate {

struct FitConfig {
  double alpha_lo = 1e-4;
  double alpha_hi = 1.0 - 1e-4;
  double root_tol = 1e-10;
  int max_iter = 200;
};

struct FitResult {
  double alpha_hat = 0.0;
  double theta_hat = 0.0;
  bool has_theta = false;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  double fisher_at_hat = 0.0;  // single-class information at alpha_hat
  bool converged = false;
  bool boundary_hit = false;
  int iterations = 0;
  double residual = 0.0;       // |score| at the returned point
  int sign_changes = 0;        // profile-score sign flips seen on the scan grid
  double profile_slope = 0.0;  // d/dx of the per-class profile score at the root
};

// Joint log likelihood in (x, y) = (alpha, theta); 0 < x < 1, y > -x.
double log_likelihood(const partition::PartitionStats& stats, double x, double y);

struct Score {
  double dx = 0.0;
  double dy = 0.0;
};
Score score(const partition::PartitionStats& stats, double x, double y);

struct Hessian {
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;
};
Hessian hessian(const partition::PartitionStats& stats, double x, double y);

// Largest plug-in location for which the shape equation keeps an interior
// root: K(K-1) / (2 * sum_{j>=2} s_j H_{j-1}). Infinite when every class is
// a singleton; zero (with the flag set) when there is a single class.
struct ThetaThreshold {
  double value = 0.0;
  bool finite = false;
  bool k_is_one = false;
  bool k_is_n = false;
};
ThetaThreshold theta_threshold(const partition::PartitionStats& stats);

// Unique root in y of the location score at fixed shape x; needs 1 < K < n.
double profile_theta(const partition::PartitionStats& stats, double x,
                     const FitConfig& config = {});

// Shape estimate with the location pinned at theta_star. Never throws for
// degenerate profiles: when no interior root exists the better endpoint of
// [alpha_lo, alpha_hi] (intersected with x > -theta_star) is reported with
// boundary_hit set.
FitResult fit_qmle(const partition::PartitionStats& stats, double theta_star,
                   const FitConfig& config = {});

// Joint maximum via the profile score; requires 1 < K < n. A coarse scan
// locates every sign change, each is polished, and the best by profile
// likelihood is returned. Without any sign change the better endpoint is
// reported with boundary_hit set.
FitResult fit_mle(const partition::PartitionStats& stats, const FitConfig& config = {});

// Leading-order information pairing for one observed partition of size n:
// shape block n^alpha * E[M] * I_alpha, cross block log(n)/alpha, location
// block f'_alpha(theta/alpha)/alpha^2.
struct FisherLeading {
  double i_aa = 0.0;
  double i_at = 0.0;
  double i_tt = 0.0;
};
FisherLeading asymptotic_fisher(double alpha, double theta, double n,
                                const sibuya::TruncationPolicy& policy = {});

}  // namespace epkit::estimate
