#pragma once

#include <cstdint>

namespace epkit::sibuya {

// Cutoff and certificate tolerance for the infinite series below. Every
// truncated quantity carries an analytic tail bound; when the bound exceeds
// tail_tol the throwing entry points raise truncation_error.
struct TruncationPolicy {
  std::uint64_t j_max = 100000;
  double tail_tol = 1e-6;
};

// P(X = j) = alpha * prod_{i<j}(i - alpha) / j!, j >= 1, 0 < alpha < 1.
double pmf(double alpha, std::uint64_t j);
double log_pmf(double alpha, std::uint64_t j);

// P(X > i) = (i - alpha) * pmf(alpha, i) / alpha for i >= 1; 1 at i = 0.
double tail(double alpha, std::uint64_t i);

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
  bool certified = false;
};

// Information of the single-observation model in two algebraic forms:
// size-weighted mean of 1/(alpha*(j-alpha)) plus 1/alpha^2 (the cheap form),
// and the squared-score form used as a cross-check.
SeriesValue fisher_info_series(double alpha, const TruncationPolicy& policy = {});
SeriesValue fisher_info_sq_series(double alpha, const TruncationPolicy& policy = {});

// Throwing wrappers that enforce policy.tail_tol.
double fisher_info(double alpha, const TruncationPolicy& policy = {});

// fisher_info with the cutoff escalated (x10 up to 10^7) until the tail
// certificate meets tail_tol; the bound T(J) <= 1 guarantees success at
// j_max = 10^7 for every alpha >= 1e-4.
double fisher_info_auto(double alpha, double tail_tol = 1e-6);

// Psi(x) = 1/x - E[sum_{i<X} 1/(i-x)] for x in (0,1). One Abel step on the
// tail makes the truncation error vanish at x = alpha and stay below
// |x-alpha|/alpha * T(J)/(J+1-x) elsewhere.
SeriesValue limit_score_psi_series(double alpha, double x, const TruncationPolicy& policy = {});
double limit_score_psi(double alpha, double x, const TruncationPolicy& policy = {});

}  // namespace epkit::sibuya
