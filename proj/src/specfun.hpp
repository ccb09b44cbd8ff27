#pragma once

namespace epkit::specfun {

// psi(x). Poles at 0, -1, -2, ... raise domain_error.
double digamma(double x);

// psi'(x). Same pole behaviour as digamma.
double trigamma(double x);

// f_alpha(z) = psi(1+z) - alpha*psi(1+alpha*z) on z > -1, 0 < alpha < 1.
// Strictly increasing and concave in z.
double f_alpha(double alpha, double z);

// d/dz f_alpha(z) = psi'(1+z) - alpha^2*psi'(1+alpha*z) > 0.
double f_alpha_prime(double alpha, double z);

// Unique z > -1 with f_alpha(alpha, z) = w. Bracketed Newton iteration;
// terminates when |f_alpha(z) - w| <= 1e-10 * max(1, |w|) and the last
// step is below 1e-12 * max(1, |z|).
double f_alpha_inv(double alpha, double w);

}  // namespace epkit::specfun
