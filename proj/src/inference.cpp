#include "inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace epkit::inference {

namespace {

void require_interior(const estimate::FitResult& fit, const char* who) {
  if (!fit.converged || fit.boundary_hit) {
    throw domain_error(std::string(who) + ": requires a converged interior shape fit");
  }
  if (!(fit.fisher_at_hat > 0.0) || fit.k < 1) {
    throw domain_error(std::string(who) + ": fit carries no usable information");
  }
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw domain_error("normal_quantile: p must lie in (0,1)");
  double lo = -40.0, hi = 40.0;
  // Tail-calibrated start keeps Newton short even for extreme p.
  const double pm = std::min(p, 1.0 - p);
  double z = 0.0;
  if (pm < 0.1) {
    const double u = -2.0 * std::log(pm);
    z = std::sqrt(std::max(u - std::log(u) - std::log(2.0 * M_PI), 1e-8));
    if (p < 0.5) z = -z;
  }
  for (int it = 0; it < 500; ++it) {
    const double f = normal_cdf(z) - p;
    if (f > 0.0) {
      hi = z;
    } else {
      lo = z;
    }
    if (std::abs(f) <= 1e-15) break;
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    double next = pdf > 0.0 ? z - f / pdf : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    z = next;
  }
  return z;
}

ConfidenceInterval confidence_interval(const estimate::FitResult& fit, double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw domain_error("confidence_interval: level must lie in (0,1)");
  }
  require_interior(fit, "confidence_interval");
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double half = z / std::sqrt(static_cast<double>(fit.k) * fit.fisher_at_hat);
  ConfidenceInterval ci;
  ci.level = level;
  ci.alpha_hat = fit.alpha_hat;
  ci.k = fit.k;
  ci.fisher = fit.fisher_at_hat;
  ci.lo = std::max(0.0, fit.alpha_hat - half);
  ci.hi = std::min(1.0, fit.alpha_hat + half);
  return ci;
}

SparsityTest sparsity_test(const partition::PartitionStats& stats, double mu, double delta,
                           const estimate::FitConfig& config, bool two_sided) {
  if (!(mu >= 1.0) || !std::isfinite(mu)) {
    throw domain_error("sparsity_test: mean degree mu must be at least 1");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw domain_error("sparsity_test: level delta must lie in (0,1)");
  }
  SparsityTest out;
  out.mu = mu;
  out.delta = delta;
  out.two_sided = two_sided;
  out.fit = estimate::fit_mle(stats, config);
  require_interior(out.fit, "sparsity_test");
  const double scale = std::sqrt(static_cast<double>(out.fit.k) * out.fit.fisher_at_hat);
  out.z_stat = scale * (out.fit.alpha_hat - 1.0 / mu);
  if (two_sided) {
    out.critical = normal_quantile(1.0 - 0.5 * delta);
    out.p_value = 2.0 * (1.0 - normal_cdf(std::abs(out.z_stat)));
    out.reject = std::abs(out.z_stat) > out.critical;
  } else {
    out.critical = normal_quantile(1.0 - delta);
    out.p_value = 1.0 - normal_cdf(out.z_stat);
    out.reject = out.z_stat > out.critical;
  }
  out.small_sample = out.fit.k < 50;
  return out;
}

double standardized_error(const estimate::FitResult& fit, double alpha_true) {
  if (!(alpha_true > 0.0) || !(alpha_true < 1.0)) {
    throw domain_error("standardized_error: alpha_true must lie in (0,1)");
  }
  require_interior(fit, "standardized_error");
  return std::sqrt(static_cast<double>(fit.k) * fit.fisher_at_hat) *
         (fit.alpha_hat - alpha_true);
}

}  // namespace epkit::inference
