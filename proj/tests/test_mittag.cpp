#include <cmath>
#include <vector>

#include "doctest.h"
#include "errors.hpp"
#include "mittag.hpp"
#include "rng.hpp"
#include "specfun.hpp"

using epkit::Rng;
using epkit::domain_error;
using namespace epkit::mittag;

namespace {

double moment_closed(double alpha, double theta, double p) {
  return std::exp(std::lgamma(theta + 1.0) + std::lgamma(theta / alpha + p + 1.0) -
                  std::lgamma(theta / alpha + 1.0) - std::lgamma(theta + p * alpha + 1.0));
}

}  // namespace

TEST_CASE("zolotarev kernel closed form at alpha = 1/2") {
  // B(u) = 1/(4 cos^2(pi u / 2)) when alpha = 1/2.
  for (double u : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double c = std::cos(0.5 * M_PI * u);
    CHECK(std::abs(zolotarev_b(0.5, u) - 1.0 / (4.0 * c * c)) < 1e-12);
  }
}

TEST_CASE("zolotarev kernel infimum and monotonicity") {
  for (double a : {0.2, 0.5, 0.8}) {
    const double inf_b = a * std::pow(1.0 - a, (1.0 - a) / a);
    CHECK(std::abs(zolotarev_b(a, 1e-9) - inf_b) < 1e-6 * inf_b);
    double prev = zolotarev_b(a, 0.01);
    for (double u = 0.05; u < 0.999; u += 0.02) {
      const double cur = zolotarev_b(a, u);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("stable law satisfies its Laplace transform") {
  Rng rng(11, 0);
  const double alpha = 0.7;
  const int n = 200000;
  double m05 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = stable_sample(alpha, rng);
    m05 += std::exp(-0.5 * s);
    m2 += std::exp(-2.0 * s);
  }
  m05 /= n;
  m2 /= n;
  const double se = 0.5 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(m05 - std::exp(-std::pow(0.5, alpha))) < 5.0 * se);
  CHECK(std::abs(m2 - std::exp(-std::pow(2.0, alpha))) < 5.0 * se);
}

TEST_CASE("stable law at alpha = 1/2 equals 1/(2 Z^2) in distribution") {
  // One-sample KS against F(s) = erfc(1/(2 sqrt(s))).
  Rng rng(5, 3);
  const int n = 50000;
  std::vector<double> xs(n);
  for (auto& x : xs) x = stable_sample(0.5, rng);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = std::erfc(1.0 / (2.0 * std::sqrt(xs[i])));
    ks = std::max(ks, std::abs(f - (i + 1.0) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("tilted sampler with theta = 0 matches the stable power") {
  for (double a : {0.3, 0.6}) {
    Rng r1(42, 9), r2(42, 9);
    const double s = stable_sample(a, r1);
    const double m = gmtl_sample(a, 0.0, r2);
    CHECK(std::abs(m / std::pow(s, -a) - 1.0) < 1e-10);
  }
}

TEST_CASE("moment formula closed values") {
  CHECK(std::abs(gmtl_moment(0.5, 0.0, 1.0) - 2.0 / std::sqrt(M_PI)) < 1e-14);
  CHECK(std::abs(gmtl_moment(0.5, 1.0, 1.0) - 2.2567583341910251) < 1e-12);
  CHECK(std::abs(gmtl_moment(0.5, 1.0, 2.0) - 6.0) < 1e-12);
  CHECK(std::abs(gmtl_moment(0.3, 2.0, 0.0) - 1.0) < 1e-15);
  for (double a : {0.25, 0.6}) {
    for (double p : {0.5, 1.0, 3.0}) {
      CHECK(std::abs(gmtl_moment(a, 0.0, p) -
                     std::exp(std::lgamma(p + 1.0) - std::lgamma(p * a + 1.0))) < 1e-13);
    }
  }
}

TEST_CASE("moment formula domain") {
  CHECK_THROWS_AS(gmtl_moment(0.5, 1.0, -3.0), domain_error);
  CHECK_THROWS_AS(gmtl_moment(0.5, -0.6, 1.0), domain_error);
  CHECK_NOTHROW(gmtl_moment(0.5, 1.0, -2.9));
}

TEST_CASE("tilted sampler matches moments across the parameter box") {
  const int n = 20000;
  for (double a : {0.3, 0.6}) {
    for (double t : {-0.2, 1.5}) {
      if (t <= -a) continue;
      Rng rng(77, static_cast<std::uint64_t>(a * 100 + t * 10 + 1000));
      double sum = 0.0, sumh = 0.0;
      for (int i = 0; i < n; ++i) {
        const double m = gmtl_sample(a, t, rng);
        CHECK(m > 0.0);
        sum += m;
        sumh += std::sqrt(m);
      }
      const double mean1 = sum / n;
      const double meanh = sumh / n;
      const double var1 = moment_closed(a, t, 2.0) - std::pow(moment_closed(a, t, 1.0), 2);
      const double varh = moment_closed(a, t, 1.0) - std::pow(moment_closed(a, t, 0.5), 2);
      CHECK(std::abs(mean1 - moment_closed(a, t, 1.0)) < 5.0 * std::sqrt(var1 / n));
      CHECK(std::abs(meanh - moment_closed(a, t, 0.5)) < 5.0 * std::sqrt(varh / n));
    }
  }
}

TEST_CASE("theta limit draws stay above -alpha and center near theta") {
  const double a = 0.5, t = 1.0;
  Rng rng(123, 4);
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = theta_limit_sample(a, t, rng);
    CHECK(v > -a);
    sum += v;
  }
  const double mean = sum / n;
  const double ref_sd = std::sqrt(a * a / epkit::specfun::f_alpha_prime(a, t / a));
  // The limit law has positive bias, so the mean sits at or above theta.
  CHECK(mean > t - 5.0 * ref_sd / std::sqrt(static_cast<double>(n)));
  CHECK(mean < t + 1.0);
}

TEST_CASE("samplers are reproducible by (seed, stream)") {
  Rng a1(9, 2), a2(9, 2), b(9, 3);
  std::vector<double> xs, ys, zs;
  for (int i = 0; i < 32; ++i) {
    xs.push_back(gmtl_sample(0.4, 0.7, a1));
    ys.push_back(gmtl_sample(0.4, 0.7, a2));
    zs.push_back(gmtl_sample(0.4, 0.7, b));
  }
  CHECK(xs == ys);
  CHECK(xs != zs);
}

TEST_CASE("sampler domain checks") {
  Rng rng(1, 1);
  CHECK_THROWS_AS(stable_sample(0.0, rng), domain_error);
  CHECK_THROWS_AS(stable_sample(1.0, rng), domain_error);
  CHECK_THROWS_AS(gmtl_sample(0.5, -0.5, rng), domain_error);
  CHECK_THROWS_AS(theta_limit_sample(0.5, -0.6, rng), domain_error);
}
