#pragma once

// Small Monte-Carlo summaries shared by the experiment runners and the test
// binaries: moments, quantiles, KS distances, chi-squared survival.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace epkit::mcstats {

inline double mean(const std::vector<double>& xs) {
  long double s = 0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : static_cast<double>(s / xs.size());
}

inline double variance(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  long double s = 0;
  for (double x : xs) s += (x - m) * (x - m);
  return static_cast<double>(s / (xs.size() - 1));
}

inline double skewness(const std::vector<double>& xs) {
  if (xs.size() < 3) return 0.0;
  const double m = mean(xs);
  long double s2 = 0, s3 = 0;
  for (double x : xs) {
    const long double d = x - m;
    s2 += d * d;
    s3 += d * d * d;
  }
  const double sd = std::sqrt(static_cast<double>(s2) / xs.size());
  if (sd == 0.0) return 0.0;
  return static_cast<double>(s3) / (xs.size() * sd * sd * sd);
}

// Linear-interpolation quantile of an already sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  const double pos = p * (sorted.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] * (1.0 - frac) + sorted[i + 1] * frac;
}

// One-sample KS distance of a sorted sample against a cdf.
inline double ks_distance(const std::vector<double>& sorted,
                          const std::function<double(double)>& cdf) {
  const std::size_t n = sorted.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

// Two-sample KS distance; both inputs sorted.
inline double ks_distance_two(const std::vector<double>& a, const std::vector<double>& b) {
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// Regularized upper incomplete gamma Q(a, x): series for x < a+1, Lentz
// continued fraction otherwise.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 0.0;
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - lg);
  }
  double b = x + 1.0 - a;
  double c = 1e308;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - lg) * h;
}

// Survival function of the chi-squared law.
inline double chi2_sf(double x, double dof) { return gamma_q(0.5 * dof, 0.5 * x); }

}  // namespace epkit::mcstats
