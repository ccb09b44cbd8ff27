#include "mittag.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "specfun.hpp"

namespace epkit::mittag {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0) || !std::isfinite(alpha)) {
    throw domain_error("mittag: alpha must lie in (0,1)");
  }
}

void check_pair(double alpha, double theta) {
  check_alpha(alpha);
  if (!(theta > -alpha) || !std::isfinite(theta)) {
    throw domain_error("mittag: theta must exceed -alpha");
  }
}

double log_zb(double alpha, double u) {
  return std::log(std::sin(alpha * M_PI * u)) +
         (1.0 - alpha) / alpha * std::log(std::sin((1.0 - alpha) * M_PI * u)) -
         std::log(std::sin(M_PI * u)) / alpha;
}

}  // namespace

double zolotarev_b(double alpha, double u) {
  check_alpha(alpha);
  if (!(u > 0.0) || !(u < 1.0)) throw domain_error("zolotarev_b: u must lie in (0,1)");
  return std::exp(log_zb(alpha, u));
}

double stable_sample(double alpha, Rng& rng) {
  check_alpha(alpha);
  const double u = rng.uniform();
  const double e = rng.exponential();
  return std::exp(log_zb(alpha, u) - (1.0 - alpha) / alpha * std::log(e));
}

double gmtl_sample(double alpha, double theta, Rng& rng, std::uint64_t max_iter) {
  check_pair(alpha, theta);
  const double ratio = (1.0 - alpha) / alpha;

  if (theta == 0.0) {
    const double u = rng.uniform();
    const double e = rng.exponential();
    return std::exp(-alpha * log_zb(alpha, u) + (1.0 - alpha) * std::log(e));
  }

  double lb = 0.0;
  bool accepted = false;
  if (theta > 0.0) {
    // Kernel density proportional to B(u)^{-theta}, dominated at B's infimum.
    const double log_bmin = std::log(alpha) + ratio * std::log1p(-alpha);
    for (std::uint64_t it = 0; it < max_iter && !accepted; ++it) {
      const double u = rng.uniform();
      lb = log_zb(alpha, u);
      const double log_acc = std::min(0.0, -theta * (lb - log_bmin));
      accepted = std::log(rng.uniform()) < log_acc;
    }
  } else {
    // Kernel density proportional to B(u)^{|theta|}; peel off the (1-u)^{-1/alpha}
    // blow-up into the proposal and bound the bounded remainder phi(u).
    const double kappa = -theta / alpha;
    const double log_c =
        (alpha * std::log(alpha * M_PI) + (1.0 - alpha) * std::log((1.0 - alpha) * M_PI) -
         std::log(2.0)) /
        alpha;
    for (std::uint64_t it = 0; it < max_iter && !accepted; ++it) {
      const double v = rng.uniform();
      const double u = 1.0 - std::pow(1.0 - v, 1.0 / (1.0 - kappa));
      lb = log_zb(alpha, u);
      const double log_phi = lb + std::log1p(-u) / alpha;
      const double log_acc = std::min(0.0, -theta * (log_phi - log_c));
      accepted = std::log(rng.uniform()) < log_acc;
    }
  }
  if (!accepted) {
    throw sampling_error("gmtl_sample: rejection cap " + std::to_string(max_iter) +
                         " exceeded");
  }
  const double e = rng.gamma(1.0 + theta * ratio);
  return std::exp(-alpha * lb + (1.0 - alpha) * std::log(e));
}

double gmtl_moment(double alpha, double theta, double p) {
  check_pair(alpha, theta);
  if (!std::isfinite(p)) throw domain_error("gmtl_moment: p must be finite");
  if (!(p > -(1.0 + theta / alpha))) {
    throw domain_error("gmtl_moment: moment diverges at p <= -(1 + theta/alpha)");
  }
  return std::exp(std::lgamma(theta + 1.0) + std::lgamma(theta / alpha + p + 1.0) -
                  std::lgamma(theta / alpha + 1.0) - std::lgamma(theta + p * alpha + 1.0));
}

double theta_limit_sample(double alpha, double theta, Rng& rng, std::uint64_t max_iter) {
  const double m = gmtl_sample(alpha, theta, rng, max_iter);
  return alpha * specfun::f_alpha_inv(alpha, std::log(m));
}

}  // namespace epkit::mittag
