#include "sibuya.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"
#include "specfun.hpp"

namespace epkit::sibuya {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0) || !std::isfinite(alpha)) {
    throw domain_error("sibuya: alpha must lie in (0,1)");
  }
}

void check_policy(const TruncationPolicy& policy) {
  if (policy.j_max < 2) throw domain_error("sibuya: j_max must be at least 2");
  if (!(policy.tail_tol > 0.0)) throw domain_error("sibuya: tail_tol must be positive");
}

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

double log_pmf(double alpha, std::uint64_t j) {
  check_alpha(alpha);
  if (j < 1) throw domain_error("sibuya: support starts at j = 1");
  const double jd = static_cast<double>(j);
  return std::log(alpha) + std::lgamma(jd - alpha) - std::lgamma(1.0 - alpha) -
         std::lgamma(jd + 1.0);
}

double pmf(double alpha, std::uint64_t j) { return std::exp(log_pmf(alpha, j)); }

double tail(double alpha, std::uint64_t i) {
  check_alpha(alpha);
  if (i == 0) return 1.0;
  const double id = static_cast<double>(i);
  return std::exp(std::log(id - alpha) + log_pmf(alpha, i) - std::log(alpha));
}

SeriesValue fisher_info_series(double alpha, const TruncationPolicy& policy) {
  check_alpha(alpha);
  check_policy(policy);
  Kahan acc;
  double p = alpha;
  for (std::uint64_t j = 1;; ++j) {
    const double jd = static_cast<double>(j);
    acc.add(p / (alpha * (jd - alpha)));
    if (j == policy.j_max) break;
    p *= (jd - alpha) / (jd + 1.0);
  }
  SeriesValue out;
  out.tail_bound = p / alpha;
  out.value = 1.0 / (alpha * alpha) + acc.sum;
  out.certified = out.tail_bound <= policy.tail_tol;
  return out;
}

SeriesValue fisher_info_sq_series(double alpha, const TruncationPolicy& policy) {
  check_alpha(alpha);
  check_policy(policy);
  Kahan acc;
  double p = alpha;
  double h = 0.0;
  for (std::uint64_t j = 1;; ++j) {
    const double jd = static_cast<double>(j);
    acc.add(p * h);
    if (j == policy.j_max) break;
    h += 1.0 / ((jd - alpha) * (jd - alpha));
    p *= (jd - alpha) / (jd + 1.0);
  }
  const double jmax = static_cast<double>(policy.j_max);
  const double tail_mass = (jmax - alpha) * p / alpha;
  SeriesValue out;
  out.tail_bound = specfun::trigamma(1.0 - alpha) * tail_mass;
  out.value = 1.0 / (alpha * alpha) + acc.sum;
  out.certified = out.tail_bound <= policy.tail_tol;
  return out;
}

double fisher_info(double alpha, const TruncationPolicy& policy) {
  const SeriesValue s = fisher_info_series(alpha, policy);
  if (!s.certified) {
    throw truncation_error("fisher_info: tail bound " + std::to_string(s.tail_bound) +
                           " exceeds tolerance " + std::to_string(policy.tail_tol) +
                           " at j_max " + std::to_string(policy.j_max) + "; raise j_max");
  }
  return s.value;
}

double fisher_info_auto(double alpha, double tail_tol) {
  SeriesValue s;
  for (std::uint64_t jm = 100000; jm <= 10000000; jm *= 10) {
    s = fisher_info_series(alpha, TruncationPolicy{jm, tail_tol});
    if (s.certified) return s.value;
  }
  throw truncation_error("fisher_info_auto: tail bound " + std::to_string(s.tail_bound) +
                         " still exceeds tolerance " + std::to_string(tail_tol) +
                         " at j_max 10^7");
}

SeriesValue limit_score_psi_series(double alpha, double x, const TruncationPolicy& policy) {
  check_alpha(alpha);
  check_policy(policy);
  if (!(x > 0.0) || !(x < 1.0) || !std::isfinite(x)) {
    throw domain_error("limit_score_psi: x must lie in (0,1)");
  }
  Kahan acc;
  double p = alpha;
  double g = 0.0;  // g holds sum_{i<j} 1/(i-x) at the top of iteration j
  for (std::uint64_t j = 1;; ++j) {
    const double jd = static_cast<double>(j);
    acc.add(p * g);
    g += 1.0 / (jd - x);
    if (j == policy.j_max) break;
    p *= (jd - alpha) / (jd + 1.0);
  }
  const double jmax = static_cast<double>(policy.j_max);
  const double tail_mass = (jmax - alpha) * p / alpha;
  // Abel step: sum_{j>J} p(j) g_x(j) = T(J) g_x(J+1) + sum_{j>J} T(j)/(j-x),
  // and the last series telescopes exactly at x = alpha.
  const double rest = tail_mass / alpha + (x - alpha) / alpha * tail_mass / (jmax + 1.0 - x);
  SeriesValue out;
  out.tail_bound = std::abs(x - alpha) / alpha * tail_mass / (jmax + 1.0 - x);
  out.value = 1.0 / x - acc.sum - tail_mass * g - rest;
  out.certified = out.tail_bound <= policy.tail_tol;
  return out;
}

double limit_score_psi(double alpha, double x, const TruncationPolicy& policy) {
  const SeriesValue s = limit_score_psi_series(alpha, x, policy);
  if (!s.certified) {
    throw truncation_error("limit_score_psi: tail bound " + std::to_string(s.tail_bound) +
                           " exceeds tolerance " + std::to_string(policy.tail_tol) +
                           " at j_max " + std::to_string(policy.j_max) + "; raise j_max");
  }
  return s.value;
}

}  // namespace epkit::sibuya
