#pragma once

#include <cstdint>

#include "rng.hpp"

namespace epkit::mittag {

// Zolotarev kernel B(u) on (0,1):
//   B(u) = sin(alpha*pi*u) * sin((1-alpha)*pi*u)^{(1-alpha)/alpha} / sin(pi*u)^{1/alpha}.
// B is increasing with infimum alpha*(1-alpha)^{(1-alpha)/alpha} at u -> 0+.
double zolotarev_b(double alpha, double u);

// One draw of the positive alpha-stable law with Laplace transform
// E[exp(-lambda*S)] = exp(-lambda^alpha): S = B(U) * E^{-(1-alpha)/alpha}.
double stable_sample(double alpha, Rng& rng);

// One draw of the polynomially tilted inverse-stable law M with density
// proportional to m^{theta/alpha} times the density of S^{-alpha}.
// Requires 0 < alpha < 1, theta > -alpha. Exact two-part sampler: a Gamma
// draw for the exponential factor and a bounded rejection step on U.
double gmtl_sample(double alpha, double theta, Rng& rng, std::uint64_t max_iter = 1000000);

// E[M^p] = Gamma(theta+1)Gamma(theta/alpha+p+1) / (Gamma(theta/alpha+1)Gamma(theta+p*alpha+1)),
// valid for p > -(1 + theta/alpha).
double gmtl_moment(double alpha, double theta, double p);

// alpha * f_alpha^{-1}(log M): the large-n law of the shape-known location
// estimate. Always exceeds -alpha.
double theta_limit_sample(double alpha, double theta, Rng& rng,
                          std::uint64_t max_iter = 1000000);

}  // namespace epkit::mittag
