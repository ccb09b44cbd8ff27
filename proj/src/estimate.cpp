#include "estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "mittag.hpp"
#include "specfun.hpp"

namespace epkit::estimate {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_config(const FitConfig& cfg) {
  if (!(cfg.alpha_lo > 0.0) || !(cfg.alpha_hi < 1.0) || !(cfg.alpha_lo < cfg.alpha_hi)) {
    throw domain_error("fit config: need 0 < alpha_lo < alpha_hi < 1");
  }
  if (!(cfg.root_tol > 0.0)) throw domain_error("fit config: root_tol must be positive");
  if (cfg.max_iter < 8) throw domain_error("fit config: max_iter must be at least 8");
}

void check_point(double x, double y) {
  if (!(x > 0.0) || !(x < 1.0) || !std::isfinite(x)) {
    throw domain_error("estimate: shape x must lie in (0,1)");
  }
  if (!(y > -x) || !std::isfinite(y)) {
    throw domain_error("estimate: location y must exceed -x");
  }
}

// Sums over i = 1..K-1 of 1/(y+ix) weighted by powers of i; extended
// precision keeps the score residual resolvable at root_tol for large K.
struct ClassSums {
  double a1 = 0.0;    // sum 1/(y+ix)
  double a1i = 0.0;   // sum i/(y+ix)
  double a2 = 0.0;    // sum 1/(y+ix)^2
  double a2i = 0.0;   // sum i/(y+ix)^2
  double a2ii = 0.0;  // sum i^2/(y+ix)^2
};

ClassSums class_sums(std::uint64_t k, double x, double y) {
  long double a1 = 0, a1i = 0, a2 = 0, a2i = 0, a2ii = 0;
  for (std::uint64_t i = 1; i < k; ++i) {
    const long double id = static_cast<long double>(i);
    const long double inv = 1.0L / (static_cast<long double>(y) + id * x);
    const long double inv2 = inv * inv;
    a1 += inv;
    a1i += id * inv;
    a2 += inv2;
    a2i += id * inv2;
    a2ii += id * id * inv2;
  }
  return {static_cast<double>(a1), static_cast<double>(a1i), static_cast<double>(a2),
          static_cast<double>(a2i), static_cast<double>(a2ii)};
}

// Location score at fixed shape and its y-derivative.
double phi_value(const partition::PartitionStats& st, double x, double y) {
  const ClassSums cs = class_sums(st.k, x, y);
  return cs.a1 - (specfun::digamma(y + static_cast<double>(st.n)) - specfun::digamma(y + 1.0));
}

double phi_slope(const partition::PartitionStats& st, double x, double y) {
  const ClassSums cs = class_sums(st.k, x, y);
  return -cs.a2 +
         (specfun::trigamma(y + 1.0) - specfun::trigamma(y + static_cast<double>(st.n)));
}

double solve_profile(const partition::PartitionStats& st, double x, const FitConfig& cfg,
                     const double* hint) {
  double gap = 1e-8;
  double ylo = -x + gap;
  for (int guard = 0; phi_value(st, x, ylo) <= 0.0; ++guard) {
    if (guard > 40) throw internal_error("profile solve: no positive bracket end near -x");
    gap /= 16.0;
    ylo = -x + gap;
  }
  double yhi = std::max(static_cast<double>(st.k), 1.0);
  while (phi_value(st, x, yhi) >= 0.0) {
    ylo = yhi;
    yhi *= 2.0;
    if (yhi > 0x1p60) throw internal_error("profile solve: root bracket exceeded 2^60");
  }

  double z = (hint && *hint > ylo && *hint < yhi) ? *hint : 0.5 * (ylo + yhi);
  for (int it = 0; it < cfg.max_iter; ++it) {
    const double f = phi_value(st, x, z);
    if (f > 0.0) {
      ylo = z;
    } else {
      yhi = z;
    }
    if (std::abs(f) <= cfg.root_tol) break;
    const double fp = phi_slope(st, x, z);
    double next = fp < 0.0 ? z - f / fp : kNan;
    if (!(next > ylo && next < yhi)) next = 0.5 * (ylo + yhi);
    z = next;
  }
  return z;
}

struct SizeSums {
  double lgam = 0.0;  // sum c*(lgamma(j-x) - lgamma(1-x))
  double dig = 0.0;   // sum c*(digamma(j-x) - digamma(1-x))
  double trig = 0.0;  // sum c*(trigamma(1-x) - trigamma(j-x))
};

SizeSums size_sums(const partition::PartitionStats& st, double x, bool want_lgam,
                   bool want_dig, bool want_trig) {
  long double lg = 0, dg = 0, tg = 0;
  const double l1 = want_lgam ? std::lgamma(1.0 - x) : 0.0;
  const double d1 = want_dig ? specfun::digamma(1.0 - x) : 0.0;
  const double t1 = want_trig ? specfun::trigamma(1.0 - x) : 0.0;
  for (const auto& [j, c] : st.sizes) {
    if (j < 2) continue;
    const double jx = static_cast<double>(j) - x;
    const long double cd = static_cast<long double>(c);
    if (want_lgam) lg += cd * (std::lgamma(jx) - l1);
    if (want_dig) dg += cd * (specfun::digamma(jx) - d1);
    if (want_trig) tg += cd * (t1 - specfun::trigamma(jx));
  }
  return {static_cast<double>(lg), static_cast<double>(dg), static_cast<double>(tg)};
}

}  // namespace

double log_likelihood(const partition::PartitionStats& stats, double x, double y) {
  stats.check();
  check_point(x, y);
  long double head = 0;
  for (std::uint64_t i = 1; i < stats.k; ++i) {
    head += std::log(y + static_cast<double>(i) * x);
  }
  const double nd = static_cast<double>(stats.n);
  const SizeSums ss = size_sums(stats, x, true, false, false);
  return static_cast<double>(head) - (std::lgamma(y + nd) - std::lgamma(y + 1.0)) + ss.lgam;
}

Score score(const partition::PartitionStats& stats, double x, double y) {
  stats.check();
  check_point(x, y);
  const ClassSums cs = class_sums(stats.k, x, y);
  const SizeSums ss = size_sums(stats, x, false, true, false);
  const double nd = static_cast<double>(stats.n);
  Score s;
  s.dx = cs.a1i - ss.dig;
  s.dy = cs.a1 - (specfun::digamma(y + nd) - specfun::digamma(y + 1.0));
  return s;
}

Hessian hessian(const partition::PartitionStats& stats, double x, double y) {
  stats.check();
  check_point(x, y);
  const ClassSums cs = class_sums(stats.k, x, y);
  const SizeSums ss = size_sums(stats, x, false, false, true);
  const double nd = static_cast<double>(stats.n);
  Hessian h;
  h.dxx = -cs.a2ii - ss.trig;
  h.dxy = -cs.a2i;
  h.dyy = -cs.a2 + (specfun::trigamma(y + 1.0) - specfun::trigamma(y + nd));
  return h;
}

ThetaThreshold theta_threshold(const partition::PartitionStats& stats) {
  stats.check();
  ThetaThreshold t;
  t.k_is_one = stats.k == 1;
  t.k_is_n = stats.k == stats.n;
  long double denom = 0;
  for (const auto& [j, c] : stats.sizes) {
    if (j < 2) continue;
    denom += static_cast<long double>(c) *
             (specfun::digamma(static_cast<double>(j)) - specfun::digamma(1.0));
  }
  if (denom == 0) {
    t.finite = false;
    t.value = std::numeric_limits<double>::infinity();
    return t;
  }
  t.finite = true;
  const double kd = static_cast<double>(stats.k);
  t.value = kd * (kd - 1.0) / (2.0 * static_cast<double>(denom));
  return t;
}

double profile_theta(const partition::PartitionStats& stats, double x, const FitConfig& config) {
  stats.check();
  check_config(config);
  if (!(x > 0.0) || !(x < 1.0) || !std::isfinite(x)) {
    throw domain_error("profile_theta: shape x must lie in (0,1)");
  }
  if (!(stats.k > 1 && stats.k < stats.n)) {
    throw degeneracy_error("profile_theta requires 1 < K_n < n (observed K_n=" +
                           std::to_string(stats.k) + ", n=" + std::to_string(stats.n) + ")");
  }
  return solve_profile(stats, x, config, nullptr);
}

FitResult fit_qmle(const partition::PartitionStats& stats, double theta_star,
                   const FitConfig& config) {
  stats.check();
  check_config(config);
  if (!(theta_star > -config.alpha_hi) || !std::isfinite(theta_star)) {
    throw domain_error("fit_qmle: theta_star must exceed -alpha_hi");
  }
  double xlo = config.alpha_lo;
  if (theta_star < 0.0) xlo = std::max(xlo, -theta_star + 1e-12);
  const double xhi = config.alpha_hi;
  if (!(xlo < xhi)) throw domain_error("fit_qmle: admissible shape interval is empty");

  FitResult r;
  r.k = stats.k;
  r.n = stats.n;
  r.has_theta = false;
  r.theta_hat = kNan;

  const auto g = [&](double x) { return score(stats, x, theta_star).dx; };
  const double ktol = config.root_tol * static_cast<double>(stats.k);
  const double glo = g(xlo);
  const double ghi = g(xhi);
  if (glo <= 0.0 || ghi >= 0.0) {
    // Monotone decreasing score with no interior zero: take the better end.
    const bool low = glo <= 0.0;
    r.alpha_hat = low ? xlo : xhi;
    r.boundary_hit = true;
    r.converged = true;
    r.residual = std::abs(low ? glo : ghi);
    r.profile_slope = hessian(stats, r.alpha_hat, theta_star).dxx / static_cast<double>(stats.k);
  } else {
    double lo = xlo, hi = xhi;
    double z = 0.5 * (lo + hi);
    int it = 0;
    for (; it < config.max_iter; ++it) {
      const double f = g(z);
      if (f > 0.0) {
        lo = z;
      } else {
        hi = z;
      }
      if (std::abs(f) <= ktol) {
        r.converged = true;
        r.residual = std::abs(f);
        break;
      }
      const double fp = hessian(stats, z, theta_star).dxx;
      double next = fp < 0.0 ? z - f / fp : kNan;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      z = next;
    }
    if (!r.converged) r.residual = std::abs(g(z));
    r.alpha_hat = z;
    r.iterations = it;
    r.sign_changes = 1;
    r.profile_slope = hessian(stats, z, theta_star).dxx / static_cast<double>(stats.k);
  }
  r.fisher_at_hat = sibuya::fisher_info_auto(r.alpha_hat);
  return r;
}

FitResult fit_mle(const partition::PartitionStats& stats, const FitConfig& config) {
  stats.check();
  check_config(config);
  if (!(stats.k > 1 && stats.k < stats.n)) {
    throw degeneracy_error("fit_mle requires 1 < K_n < n (observed K_n=" +
                           std::to_string(stats.k) + ", n=" + std::to_string(stats.n) + ")");
  }
  const double kd = static_cast<double>(stats.k);

  const int grid = 65;
  std::vector<double> xs(grid), ys(grid), psi(grid);
  double warm = kNan;
  for (int i = 0; i < grid; ++i) {
    xs[i] = config.alpha_lo + (config.alpha_hi - config.alpha_lo) * i / (grid - 1);
    ys[i] = solve_profile(stats, xs[i], config, std::isnan(warm) ? nullptr : &warm);
    warm = ys[i];
    psi[i] = score(stats, xs[i], ys[i]).dx / kd;
  }

  int flips = 0;
  for (int i = 0; i + 1 < grid; ++i) {
    if ((psi[i] > 0.0 && psi[i + 1] < 0.0) || (psi[i] < 0.0 && psi[i + 1] > 0.0)) ++flips;
  }

  struct Candidate {
    double x = 0.0, y = 0.0, ll = 0.0, resid = 0.0, slope = 0.0;
    bool converged = false, boundary = false;
  };
  std::vector<Candidate> candidates;
  int iterations = 0;

  const auto profile_score_slope = [&](double x, double y) {
    const Hessian h = hessian(stats, x, y);
    return (h.dxx - h.dxy * h.dxy / h.dyy) / kd;
  };

  // Polish every downward crossing: those bracket profile-likelihood maxima.
  for (int i = 0; i + 1 < grid; ++i) {
    if (!(psi[i] >= 0.0 && psi[i + 1] < 0.0)) continue;
    double lo = xs[i], hi = xs[i + 1];
    double ywarm = ys[i];
    double z = 0.5 * (lo + hi);
    Candidate c;
    for (int it = 0; it < config.max_iter; ++it) {
      ++iterations;
      ywarm = solve_profile(stats, z, config, &ywarm);
      const double f = score(stats, z, ywarm).dx / kd;
      if (f > 0.0) {
        lo = z;
      } else {
        hi = z;
      }
      c.x = z;
      c.y = ywarm;
      c.resid = std::abs(f) * kd;
      if (std::abs(f) <= config.root_tol) {
        c.converged = true;
        break;
      }
      const double sl = profile_score_slope(z, ywarm);
      double next = sl < 0.0 ? z - f / sl : kNan;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      z = next;
    }
    c.slope = profile_score_slope(c.x, c.y);
    c.ll = log_likelihood(stats, c.x, c.y);
    candidates.push_back(c);
  }

  // Endpoints compete as boundary solutions.
  for (int i : {0, grid - 1}) {
    Candidate c;
    c.x = xs[i];
    c.y = ys[i];
    c.ll = log_likelihood(stats, c.x, c.y);
    c.resid = std::abs(psi[i]) * kd;
    c.slope = profile_score_slope(c.x, c.y);
    c.converged = true;
    c.boundary = true;
    candidates.push_back(c);
  }

  const Candidate* best = &candidates.front();
  for (const Candidate& c : candidates) {
    if (c.ll > best->ll) best = &c;
  }

  FitResult r;
  r.k = stats.k;
  r.n = stats.n;
  r.alpha_hat = best->x;
  r.theta_hat = best->y;
  r.has_theta = true;
  r.converged = best->converged;
  r.boundary_hit = best->boundary;
  r.iterations = iterations;
  r.residual = best->resid;
  r.sign_changes = flips;
  r.profile_slope = best->slope;
  r.fisher_at_hat = sibuya::fisher_info_auto(r.alpha_hat);
  return r;
}

FisherLeading asymptotic_fisher(double alpha, double theta, double n,
                                const sibuya::TruncationPolicy& policy) {
  if (!(alpha > 0.0) || !(alpha < 1.0) || !std::isfinite(alpha)) {
    throw domain_error("asymptotic_fisher: alpha must lie in (0,1)");
  }
  if (!(theta > -alpha) || !std::isfinite(theta)) {
    throw domain_error("asymptotic_fisher: theta must exceed -alpha");
  }
  if (!(n >= 1.0) || !std::isfinite(n)) {
    throw domain_error("asymptotic_fisher: n must be at least 1");
  }
  FisherLeading f;
  f.i_aa = std::pow(n, alpha) * mittag::gmtl_moment(alpha, theta, 1.0) *
           sibuya::fisher_info(alpha, policy);
  f.i_at = std::log(n) / alpha;
  f.i_tt = specfun::f_alpha_prime(alpha, theta / alpha) / (alpha * alpha);
  return f;
}

}  // namespace epkit::estimate
