#include "epkit/epkit.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "estimate.hpp"
#include "experiments.hpp"
#include "inference.hpp"
#include "mittag.hpp"
#include "partition.hpp"
#include "rng.hpp"
#include "sibuya.hpp"
#include "specfun.hpp"
#include "stats_io.hpp"

struct epk_rng {
  epkit::Rng impl;
};

struct epk_stats {
  epkit::partition::PartitionStats impl;
};

struct epk_fit {
  epkit::estimate::FitResult impl;
};

namespace {

thread_local std::string g_last_error;

epk_status fail(epk_status status, const char* message) {
  g_last_error = message ? message : "";
  return status;
}

template <typename Fn>
epk_status guarded(Fn&& fn) {
  try {
    fn();
    return EPK_OK;
  } catch (const epkit::domain_error& e) {
    return fail(EPK_ERR_DOMAIN, e.what());
  } catch (const epkit::degeneracy_error& e) {
    return fail(EPK_ERR_DEGENERATE, e.what());
  } catch (const epkit::truncation_error& e) {
    return fail(EPK_ERR_TRUNCATION, e.what());
  } catch (const epkit::sampling_error& e) {
    return fail(EPK_ERR_SAMPLING, e.what());
  } catch (const epkit::io_error& e) {
    return fail(EPK_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(EPK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EPK_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(EPK_ERR_INTERNAL, "unknown error");
  }
}

bool missing(const void* p) { return p == nullptr; }

epk_status invalid(const char* message) { return fail(EPK_ERR_INVALID, message); }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

epkit::estimate::FitConfig to_config(const epk_fit_config* config) {
  epkit::estimate::FitConfig out;
  if (config) {
    out.alpha_lo = config->alpha_lo;
    out.alpha_hi = config->alpha_hi;
    out.root_tol = config->root_tol;
    out.max_iter = config->max_iter;
  }
  return out;
}

epkit::sibuya::TruncationPolicy to_policy(const epk_trunc_policy* policy) {
  epkit::sibuya::TruncationPolicy out;
  if (policy) {
    out.j_max = policy->j_max;
    out.tail_tol = policy->tail_tol;
  }
  return out;
}

epk_fit_result to_fit_result(const epkit::estimate::FitResult& fit) {
  epk_fit_result out;
  out.alpha_hat = fit.alpha_hat;
  out.theta_hat = fit.theta_hat;
  out.has_theta = fit.has_theta ? 1 : 0;
  out.k = fit.k;
  out.n = fit.n;
  out.fisher_at_hat = fit.fisher_at_hat;
  out.converged = fit.converged ? 1 : 0;
  out.boundary_hit = fit.boundary_hit ? 1 : 0;
  out.iterations = fit.iterations;
  out.residual = fit.residual;
  out.sign_changes = fit.sign_changes;
  out.profile_slope = fit.profile_slope;
  return out;
}

epk_status make_stats(epkit::partition::PartitionStats stats, epk_stats** out) {
  *out = new epk_stats{std::move(stats)};
  return EPK_OK;
}

}  // namespace

extern "C" {

const char* epk_version(void) { return "0.1.0"; }

const char* epk_status_name(epk_status status) {
  switch (status) {
    case EPK_OK:
      return "ok";
    case EPK_ERR_DOMAIN:
      return "domain";
    case EPK_ERR_DEGENERATE:
      return "degenerate";
    case EPK_ERR_TRUNCATION:
      return "truncation";
    case EPK_ERR_SAMPLING:
      return "sampling";
    case EPK_ERR_IO:
      return "io";
    case EPK_ERR_INVALID:
      return "invalid";
    case EPK_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* epk_last_error(void) { return g_last_error.c_str(); }

void epk_string_free(char* text) { std::free(text); }

epk_status epk_rng_new(uint64_t seed, uint64_t stream, epk_rng** out) {
  if (missing(out)) return invalid("epk_rng_new: out is null");
  return guarded([&] { *out = new epk_rng{epkit::Rng(seed, stream)}; });
}

void epk_rng_free(epk_rng* rng) { delete rng; }

epk_status epk_rng_uniform(epk_rng* rng, double* out) {
  if (missing(rng) || missing(out)) return invalid("epk_rng_uniform: null argument");
  return guarded([&] { *out = rng->impl.uniform(); });
}

epk_status epk_digamma(double x, double* out) {
  if (missing(out)) return invalid("epk_digamma: out is null");
  return guarded([&] { *out = epkit::specfun::digamma(x); });
}

epk_status epk_trigamma(double x, double* out) {
  if (missing(out)) return invalid("epk_trigamma: out is null");
  return guarded([&] { *out = epkit::specfun::trigamma(x); });
}

epk_status epk_f_alpha(double alpha, double z, double* out) {
  if (missing(out)) return invalid("epk_f_alpha: out is null");
  return guarded([&] { *out = epkit::specfun::f_alpha(alpha, z); });
}

epk_status epk_f_alpha_prime(double alpha, double z, double* out) {
  if (missing(out)) return invalid("epk_f_alpha_prime: out is null");
  return guarded([&] { *out = epkit::specfun::f_alpha_prime(alpha, z); });
}

epk_status epk_f_alpha_inv(double alpha, double w, double* out) {
  if (missing(out)) return invalid("epk_f_alpha_inv: out is null");
  return guarded([&] { *out = epkit::specfun::f_alpha_inv(alpha, w); });
}

epk_trunc_policy epk_trunc_policy_default(void) {
  const epkit::sibuya::TruncationPolicy d;
  return epk_trunc_policy{d.j_max, d.tail_tol};
}

epk_status epk_sibuya_pmf(double alpha, uint64_t j, double* out) {
  if (missing(out)) return invalid("epk_sibuya_pmf: out is null");
  return guarded([&] { *out = epkit::sibuya::pmf(alpha, j); });
}

epk_status epk_fisher_info_series(double alpha, const epk_trunc_policy* policy, double* out,
                                  double* tail_bound, int* certified) {
  if (missing(out) || missing(tail_bound) || missing(certified))
    return invalid("epk_fisher_info_series: null output");
  return guarded([&] {
    const auto series = epkit::sibuya::fisher_info_series(alpha, to_policy(policy));
    *out = series.value;
    *tail_bound = series.tail_bound;
    *certified = series.certified ? 1 : 0;
  });
}

epk_status epk_fisher_info(double alpha, const epk_trunc_policy* policy, double* out) {
  if (missing(out)) return invalid("epk_fisher_info: out is null");
  return guarded([&] { *out = epkit::sibuya::fisher_info(alpha, to_policy(policy)); });
}

epk_status epk_fisher_info_auto(double alpha, double tail_tol, double* out) {
  if (missing(out)) return invalid("epk_fisher_info_auto: out is null");
  return guarded([&] { *out = epkit::sibuya::fisher_info_auto(alpha, tail_tol); });
}

epk_status epk_limit_score_psi(double alpha, double x, const epk_trunc_policy* policy,
                               double* out) {
  if (missing(out)) return invalid("epk_limit_score_psi: out is null");
  return guarded([&] { *out = epkit::sibuya::limit_score_psi(alpha, x, to_policy(policy)); });
}

epk_status epk_stable_sample(double alpha, epk_rng* rng, double* out) {
  if (missing(rng) || missing(out)) return invalid("epk_stable_sample: null argument");
  return guarded([&] { *out = epkit::mittag::stable_sample(alpha, rng->impl); });
}

epk_status epk_gmtl_sample(double alpha, double theta, epk_rng* rng, double* out) {
  if (missing(rng) || missing(out)) return invalid("epk_gmtl_sample: null argument");
  return guarded([&] { *out = epkit::mittag::gmtl_sample(alpha, theta, rng->impl); });
}

epk_status epk_gmtl_moment(double alpha, double theta, double p, double* out) {
  if (missing(out)) return invalid("epk_gmtl_moment: out is null");
  return guarded([&] { *out = epkit::mittag::gmtl_moment(alpha, theta, p); });
}

epk_status epk_theta_limit_sample(double alpha, double theta, epk_rng* rng, double* out) {
  if (missing(rng) || missing(out)) return invalid("epk_theta_limit_sample: null argument");
  return guarded([&] { *out = epkit::mittag::theta_limit_sample(alpha, theta, rng->impl); });
}

epk_status epk_simulate(epk_rng* rng, double alpha, double theta, uint64_t n, epk_stats** out) {
  if (missing(rng) || missing(out)) return invalid("epk_simulate: null argument");
  return guarded([&] {
    make_stats(epkit::partition::simulate({alpha, theta}, n, rng->impl), out);
  });
}

epk_status epk_simulate_trajectory(epk_rng* rng, double alpha, double theta,
                                   const uint64_t* checkpoints, size_t count, epk_stats** out) {
  if (missing(rng) || missing(out) || (count > 0 && missing(checkpoints)))
    return invalid("epk_simulate_trajectory: null argument");
  return guarded([&] {
    const std::vector<std::uint64_t> sizes(checkpoints, checkpoints + count);
    auto stats_list = epkit::partition::simulate_trajectory({alpha, theta}, sizes, rng->impl);
    std::vector<epk_stats*> handles(count, nullptr);
    try {
      for (size_t i = 0; i < count; ++i) handles[i] = new epk_stats{std::move(stats_list[i])};
    } catch (...) {
      for (epk_stats* h : handles) delete h;
      throw;
    }
    for (size_t i = 0; i < count; ++i) out[i] = handles[i];
  });
}

epk_status epk_stats_from_blocks(const uint64_t* block_sizes, size_t count, epk_stats** out) {
  if (missing(out) || (count > 0 && missing(block_sizes)))
    return invalid("epk_stats_from_blocks: null argument");
  return guarded([&] {
    const std::vector<std::uint64_t> sizes(block_sizes, block_sizes + count);
    make_stats(epkit::partition::stats_from_blocks(sizes), out);
  });
}

epk_status epk_stats_from_degrees(const uint64_t* degrees, size_t count, epk_stats** out) {
  if (missing(out) || (count > 0 && missing(degrees)))
    return invalid("epk_stats_from_degrees: null argument");
  return guarded([&] {
    const std::vector<std::uint64_t> sizes(degrees, degrees + count);
    make_stats(epkit::partition::stats_from_degrees(sizes), out);
  });
}

epk_status epk_stats_from_json(const char* text, epk_stats** out) {
  if (missing(text) || missing(out)) return invalid("epk_stats_from_json: null argument");
  return guarded([&] { make_stats(epkit::io::stats_from_json_text(text), out); });
}

epk_status epk_stats_read_json(const char* path, epk_stats** out) {
  if (missing(path) || missing(out)) return invalid("epk_stats_read_json: null argument");
  return guarded([&] { make_stats(epkit::io::read_stats_json(path), out); });
}

epk_status epk_stats_read_blocks(const char* path, epk_stats** out) {
  if (missing(path) || missing(out)) return invalid("epk_stats_read_blocks: null argument");
  return guarded([&] { make_stats(epkit::io::read_blocks_file(path), out); });
}

epk_status epk_stats_read_edges(const char* path, int allow_multi, epk_stats** out) {
  if (missing(path) || missing(out)) return invalid("epk_stats_read_edges: null argument");
  return guarded([&] { make_stats(epkit::io::read_edges_file(path, allow_multi != 0), out); });
}

epk_status epk_stats_to_json(const epk_stats* stats, char** out) {
  if (missing(stats) || missing(out)) return invalid("epk_stats_to_json: null argument");
  return guarded([&] { *out = dup_string(epkit::io::stats_to_json(stats->impl)); });
}

void epk_stats_free(epk_stats* stats) { delete stats; }

uint64_t epk_stats_n(const epk_stats* stats) { return stats ? stats->impl.n : 0; }

uint64_t epk_stats_k(const epk_stats* stats) { return stats ? stats->impl.k : 0; }

size_t epk_stats_distinct_sizes(const epk_stats* stats) {
  return stats ? stats->impl.sizes.size() : 0;
}

epk_status epk_stats_size_counts(const epk_stats* stats, uint64_t* sizes, uint64_t* counts,
                                 size_t capacity, size_t* total) {
  if (missing(stats) || missing(total) || (capacity > 0 && (missing(sizes) || missing(counts))))
    return invalid("epk_stats_size_counts: null argument");
  const auto& pairs = stats->impl.sizes;
  *total = pairs.size();
  const size_t m = capacity < pairs.size() ? capacity : pairs.size();
  for (size_t i = 0; i < m; ++i) {
    sizes[i] = pairs[i].first;
    counts[i] = pairs[i].second;
  }
  return EPK_OK;
}

epk_fit_config epk_fit_config_default(void) {
  const epkit::estimate::FitConfig d;
  return epk_fit_config{d.alpha_lo, d.alpha_hi, d.root_tol, d.max_iter};
}

epk_status epk_log_likelihood(const epk_stats* stats, double x, double y, double* out) {
  if (missing(stats) || missing(out)) return invalid("epk_log_likelihood: null argument");
  return guarded([&] { *out = epkit::estimate::log_likelihood(stats->impl, x, y); });
}

epk_status epk_score(const epk_stats* stats, double x, double y, double* dx, double* dy) {
  if (missing(stats) || missing(dx) || missing(dy)) return invalid("epk_score: null argument");
  return guarded([&] {
    const auto s = epkit::estimate::score(stats->impl, x, y);
    *dx = s.dx;
    *dy = s.dy;
  });
}

epk_status epk_hessian(const epk_stats* stats, double x, double y, double* dxx, double* dxy,
                       double* dyy) {
  if (missing(stats) || missing(dxx) || missing(dxy) || missing(dyy))
    return invalid("epk_hessian: null argument");
  return guarded([&] {
    const auto h = epkit::estimate::hessian(stats->impl, x, y);
    *dxx = h.dxx;
    *dxy = h.dxy;
    *dyy = h.dyy;
  });
}

epk_status epk_profile_theta(const epk_stats* stats, double x, const epk_fit_config* config,
                             double* out) {
  if (missing(stats) || missing(out)) return invalid("epk_profile_theta: null argument");
  return guarded([&] { *out = epkit::estimate::profile_theta(stats->impl, x, to_config(config)); });
}

epk_status epk_fit_mle(const epk_stats* stats, const epk_fit_config* config, epk_fit** out) {
  if (missing(stats) || missing(out)) return invalid("epk_fit_mle: null argument");
  return guarded([&] {
    *out = new epk_fit{epkit::estimate::fit_mle(stats->impl, to_config(config))};
  });
}

epk_status epk_fit_qmle(const epk_stats* stats, double theta_star, const epk_fit_config* config,
                        epk_fit** out) {
  if (missing(stats) || missing(out)) return invalid("epk_fit_qmle: null argument");
  return guarded([&] {
    *out = new epk_fit{epkit::estimate::fit_qmle(stats->impl, theta_star, to_config(config))};
  });
}

epk_status epk_fit_get(const epk_fit* fit, epk_fit_result* out) {
  if (missing(fit) || missing(out)) return invalid("epk_fit_get: null argument");
  *out = to_fit_result(fit->impl);
  return EPK_OK;
}

void epk_fit_free(epk_fit* fit) { delete fit; }

epk_status epk_asymptotic_fisher(double alpha, double theta, double n,
                                 const epk_trunc_policy* policy, double* i_aa, double* i_at,
                                 double* i_tt) {
  if (missing(i_aa) || missing(i_at) || missing(i_tt))
    return invalid("epk_asymptotic_fisher: null output");
  return guarded([&] {
    const auto info = epkit::estimate::asymptotic_fisher(alpha, theta, n, to_policy(policy));
    *i_aa = info.i_aa;
    *i_at = info.i_at;
    *i_tt = info.i_tt;
  });
}

epk_status epk_normal_quantile(double p, double* out) {
  if (missing(out)) return invalid("epk_normal_quantile: out is null");
  return guarded([&] { *out = epkit::inference::normal_quantile(p); });
}

epk_status epk_confidence_interval_get(const epk_fit* fit, double level,
                                       epk_confidence_interval* out) {
  if (missing(fit) || missing(out)) return invalid("epk_confidence_interval_get: null argument");
  return guarded([&] {
    const auto ci = epkit::inference::confidence_interval(fit->impl, level);
    out->lo = ci.lo;
    out->hi = ci.hi;
    out->level = ci.level;
    out->alpha_hat = ci.alpha_hat;
    out->k = ci.k;
    out->fisher = ci.fisher;
  });
}

epk_status epk_standardized_error(const epk_fit* fit, double alpha_true, double* out) {
  if (missing(fit) || missing(out)) return invalid("epk_standardized_error: null argument");
  return guarded([&] { *out = epkit::inference::standardized_error(fit->impl, alpha_true); });
}

epk_status epk_sparsity_test(const epk_stats* stats, double mu, double delta,
                             const epk_fit_config* config, int two_sided,
                             epk_sparsity_result* out) {
  if (missing(stats) || missing(out)) return invalid("epk_sparsity_test: null argument");
  return guarded([&] {
    const auto test =
        epkit::inference::sparsity_test(stats->impl, mu, delta, to_config(config), two_sided != 0);
    out->mu = test.mu;
    out->delta = test.delta;
    out->z_stat = test.z_stat;
    out->critical = test.critical;
    out->p_value = test.p_value;
    out->reject = test.reject ? 1 : 0;
    out->small_sample = test.small_sample ? 1 : 0;
    out->two_sided = test.two_sided ? 1 : 0;
    out->fit = to_fit_result(test.fit);
  });
}

epk_plan epk_plan_default(void) {
  epk_plan plan;
  plan.alpha = 0.6;
  plan.theta = 1.0;
  plan.n_grid = nullptr;
  plan.n_grid_len = 0;
  plan.replications = 500;
  plan.estimators = nullptr;
  plan.estimators_len = 0;
  plan.level = 0.95;
  plan.seed = 0;
  plan.stream = 0;
  plan.threads = 0;
  plan.fit = epk_fit_config_default();
  return plan;
}

epk_status epk_run_coverage(const epk_plan* plan, epk_format format, char** out) {
  if (missing(plan) || missing(out)) return invalid("epk_run_coverage: null argument");
  if (plan->n_grid_len > 0 && missing(plan->n_grid))
    return invalid("epk_run_coverage: n_grid is null");
  if (plan->estimators_len > 0 && missing(plan->estimators))
    return invalid("epk_run_coverage: estimators is null");
  if (format != EPK_FORMAT_CSV && format != EPK_FORMAT_JSON)
    return invalid("epk_run_coverage: unknown format");
  epkit::experiments::Plan native;
  native.alpha = plan->alpha;
  native.theta = plan->theta;
  native.n_grid.assign(plan->n_grid, plan->n_grid + plan->n_grid_len);
  native.replications = plan->replications;
  if (plan->estimators_len > 0) {
    native.estimators.clear();
    for (size_t i = 0; i < plan->estimators_len; ++i) {
      switch (plan->estimators[i]) {
        case EPK_EST_MLE:
          native.estimators.push_back(epkit::experiments::Estimator::mle);
          break;
        case EPK_EST_QMLE_KNOWN_THETA:
          native.estimators.push_back(epkit::experiments::Estimator::qmle_known_theta);
          break;
        case EPK_EST_QMLE_ZERO:
          native.estimators.push_back(epkit::experiments::Estimator::qmle_zero);
          break;
        default:
          return invalid("epk_run_coverage: unknown estimator code");
      }
    }
  }
  native.level = plan->level;
  native.seed = plan->seed;
  native.stream = plan->stream;
  native.threads = plan->threads;
  native.fit = to_config(&plan->fit);
  return guarded([&] {
    const auto report = epkit::experiments::run_coverage(native);
    *out = dup_string(format == EPK_FORMAT_CSV ? epkit::experiments::coverage_csv(report)
                                               : epkit::experiments::coverage_json(report));
  });
}

epk_status epk_run_theta_limit(double alpha, double theta, uint64_t draws, uint64_t seed,
                               uint64_t stream, int threads, epk_format format, char** out) {
  if (missing(out)) return invalid("epk_run_theta_limit: out is null");
  if (format != EPK_FORMAT_CSV && format != EPK_FORMAT_JSON)
    return invalid("epk_run_theta_limit: unknown format");
  return guarded([&] {
    const auto report =
        epkit::experiments::run_theta_limit(alpha, theta, draws, seed, stream, threads);
    *out = dup_string(format == EPK_FORMAT_CSV ? epkit::experiments::theta_limit_csv(report)
                                               : epkit::experiments::theta_limit_json(report));
  });
}

epk_status epk_run_ialpha(const double* grid, size_t count, const epk_trunc_policy* policy,
                          epk_format format, char** out) {
  if (missing(out) || (count > 0 && missing(grid)))
    return invalid("epk_run_ialpha: null argument");
  if (format != EPK_FORMAT_CSV && format != EPK_FORMAT_JSON)
    return invalid("epk_run_ialpha: unknown format");
  return guarded([&] {
    const std::vector<double> alphas(grid, grid + count);
    const auto points = epkit::experiments::run_ialpha(alphas, to_policy(policy));
    *out = dup_string(format == EPK_FORMAT_CSV ? epkit::experiments::ialpha_csv(points)
                                               : epkit::experiments::ialpha_json(points));
  });
}

}  // extern "C"
