/* C interface to the Ewens-Pitman partition toolkit.
 *
 * Conventions:
 *   - Every fallible call returns epk_status and writes results through out
 *     pointers; outputs are untouched on failure.
 *   - epk_last_error() returns a thread-local message for the most recent
 *     failure on the calling thread.
 *   - Handles (epk_rng, epk_stats, epk_fit) are opaque; free them with the
 *     matching *_free. Strings returned through char** are heap-allocated
 *     and released with epk_string_free.
 *   - Handles are not internally synchronized; do not share one across
 *     threads without external locking. Distinct handles are independent.
 */

#ifndef EPKIT_EPKIT_H
#define EPKIT_EPKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EPK_API __declspec(dllexport)
#else
#define EPK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum epk_status {
  EPK_OK = 0,
  EPK_ERR_DOMAIN = 1,     /* parameter outside its mathematical domain */
  EPK_ERR_DEGENERATE = 2, /* statistic undefined unless 1 < K < n */
  EPK_ERR_TRUNCATION = 3, /* series tail bound exceeds the tolerance */
  EPK_ERR_SAMPLING = 4,   /* rejection sampler exhausted its budget */
  EPK_ERR_IO = 5,         /* file or parse failure */
  EPK_ERR_INVALID = 6,    /* null handle or malformed argument */
  EPK_ERR_INTERNAL = 7
} epk_status;

typedef enum epk_format { EPK_FORMAT_CSV = 0, EPK_FORMAT_JSON = 1 } epk_format;

typedef enum epk_estimator {
  EPK_EST_MLE = 0,
  EPK_EST_QMLE_KNOWN_THETA = 1,
  EPK_EST_QMLE_ZERO = 2
} epk_estimator;

typedef struct epk_rng epk_rng;
typedef struct epk_stats epk_stats;
typedef struct epk_fit epk_fit;

EPK_API const char* epk_version(void);
EPK_API const char* epk_status_name(epk_status status);
EPK_API const char* epk_last_error(void);
EPK_API void epk_string_free(char* text);

/* ---- random source: xoshiro256++ seeded from (seed, stream) ---- */

EPK_API epk_status epk_rng_new(uint64_t seed, uint64_t stream, epk_rng** out);
EPK_API void epk_rng_free(epk_rng* rng);
EPK_API epk_status epk_rng_uniform(epk_rng* rng, double* out);

/* ---- special functions ---- */

EPK_API epk_status epk_digamma(double x, double* out);
EPK_API epk_status epk_trigamma(double x, double* out);
/* f_a(z) = psi(1+z) - a*psi(1+a*z) on z > -1, its z-derivative, and its
 * inverse in z for fixed shape 0 < a < 1. */
EPK_API epk_status epk_f_alpha(double alpha, double z, double* out);
EPK_API epk_status epk_f_alpha_prime(double alpha, double z, double* out);
EPK_API epk_status epk_f_alpha_inv(double alpha, double w, double* out);

/* ---- heavy-tailed class-size law and its information series ---- */

typedef struct epk_trunc_policy {
  uint64_t j_max;
  double tail_tol;
} epk_trunc_policy;

EPK_API epk_trunc_policy epk_trunc_policy_default(void);

EPK_API epk_status epk_sibuya_pmf(double alpha, uint64_t j, double* out);
/* Certified truncation: *out carries the partial sum, *tail_bound an upper
 * bound on the discarded tail. Fails with EPK_ERR_TRUNCATION only in the
 * checked variants below. */
EPK_API epk_status epk_fisher_info_series(double alpha, const epk_trunc_policy* policy,
                                          double* out, double* tail_bound, int* certified);
EPK_API epk_status epk_fisher_info(double alpha, const epk_trunc_policy* policy, double* out);
EPK_API epk_status epk_fisher_info_auto(double alpha, double tail_tol, double* out);
/* Population score of the shape at x when the truth is alpha; zero at
 * x == alpha, slope -I_alpha there. */
EPK_API epk_status epk_limit_score_psi(double alpha, double x, const epk_trunc_policy* policy,
                                       double* out);

/* ---- scaled-class-count limit law ---- */

EPK_API epk_status epk_stable_sample(double alpha, epk_rng* rng, double* out);
EPK_API epk_status epk_gmtl_sample(double alpha, double theta, epk_rng* rng, double* out);
EPK_API epk_status epk_gmtl_moment(double alpha, double theta, double p, double* out);
/* One draw of the large-n location-estimate limit alpha * f^{-1}(log M). */
EPK_API epk_status epk_theta_limit_sample(double alpha, double theta, epk_rng* rng, double* out);

/* ---- partitions ---- */

EPK_API epk_status epk_simulate(epk_rng* rng, double alpha, double theta, uint64_t n,
                                epk_stats** out);
/* One growing trajectory observed at `count` strictly increasing checkpoint
 * sizes; fills caller-provided out[0..count-1] with new handles. */
EPK_API epk_status epk_simulate_trajectory(epk_rng* rng, double alpha, double theta,
                                           const uint64_t* checkpoints, size_t count,
                                           epk_stats** out);

EPK_API epk_status epk_stats_from_blocks(const uint64_t* block_sizes, size_t count,
                                         epk_stats** out);
EPK_API epk_status epk_stats_from_degrees(const uint64_t* degrees, size_t count, epk_stats** out);
EPK_API epk_status epk_stats_from_json(const char* text, epk_stats** out);
EPK_API epk_status epk_stats_read_json(const char* path, epk_stats** out);
EPK_API epk_status epk_stats_read_blocks(const char* path, epk_stats** out);
EPK_API epk_status epk_stats_read_edges(const char* path, int allow_multi, epk_stats** out);
EPK_API epk_status epk_stats_to_json(const epk_stats* stats, char** out);
EPK_API void epk_stats_free(epk_stats* stats);

/* Getters return 0 on a null handle. */
EPK_API uint64_t epk_stats_n(const epk_stats* stats);
EPK_API uint64_t epk_stats_k(const epk_stats* stats);
EPK_API size_t epk_stats_distinct_sizes(const epk_stats* stats);
/* Fills up to capacity (size, count) pairs in ascending size order and
 * reports the total number available. */
EPK_API epk_status epk_stats_size_counts(const epk_stats* stats, uint64_t* sizes,
                                         uint64_t* counts, size_t capacity, size_t* total);

/* ---- likelihood and estimation; x is the shape, y the location ---- */

typedef struct epk_fit_config {
  double alpha_lo;
  double alpha_hi;
  double root_tol;
  int max_iter;
} epk_fit_config;

EPK_API epk_fit_config epk_fit_config_default(void);

EPK_API epk_status epk_log_likelihood(const epk_stats* stats, double x, double y, double* out);
EPK_API epk_status epk_score(const epk_stats* stats, double x, double y, double* dx, double* dy);
EPK_API epk_status epk_hessian(const epk_stats* stats, double x, double y, double* dxx,
                               double* dxy, double* dyy);
EPK_API epk_status epk_profile_theta(const epk_stats* stats, double x,
                                     const epk_fit_config* config, double* out);

typedef struct epk_fit_result {
  double alpha_hat;
  double theta_hat;
  int has_theta;
  uint64_t k;
  uint64_t n;
  double fisher_at_hat;
  int converged;
  int boundary_hit;
  int iterations;
  double residual;
  int sign_changes;
  double profile_slope;
} epk_fit_result;

EPK_API epk_status epk_fit_mle(const epk_stats* stats, const epk_fit_config* config,
                               epk_fit** out);
EPK_API epk_status epk_fit_qmle(const epk_stats* stats, double theta_star,
                                const epk_fit_config* config, epk_fit** out);
EPK_API epk_status epk_fit_get(const epk_fit* fit, epk_fit_result* out);
EPK_API void epk_fit_free(epk_fit* fit);

/* Leading-order information pairing at sample size n. */
EPK_API epk_status epk_asymptotic_fisher(double alpha, double theta, double n,
                                         const epk_trunc_policy* policy, double* i_aa,
                                         double* i_at, double* i_tt);

/* ---- intervals and the sparsity test ---- */

typedef struct epk_confidence_interval {
  double lo;
  double hi;
  double level;
  double alpha_hat;
  uint64_t k;
  double fisher;
} epk_confidence_interval;

EPK_API epk_status epk_normal_quantile(double p, double* out);
EPK_API epk_status epk_confidence_interval_get(const epk_fit* fit, double level,
                                               epk_confidence_interval* out);
EPK_API epk_status epk_standardized_error(const epk_fit* fit, double alpha_true, double* out);

typedef struct epk_sparsity_result {
  double mu;
  double delta;
  double z_stat;
  double critical;
  double p_value;
  int reject;
  int small_sample;
  int two_sided;
  epk_fit_result fit;
} epk_sparsity_result;

/* Tests "shape <= 1/mu" against the sparse alternative at level delta. */
EPK_API epk_status epk_sparsity_test(const epk_stats* stats, double mu, double delta,
                                     const epk_fit_config* config, int two_sided,
                                     epk_sparsity_result* out);

/* ---- Monte Carlo studies; reports serialized to CSV or JSON ---- */

typedef struct epk_plan {
  double alpha;
  double theta;
  const uint64_t* n_grid;        /* NULL selects 2^7..2^17 by powers of two */
  size_t n_grid_len;
  uint32_t replications;
  const int* estimators;         /* epk_estimator values; NULL selects all three */
  size_t estimators_len;
  double level;
  uint64_t seed;
  uint64_t stream;
  int threads;                   /* 0 picks the hardware count */
  epk_fit_config fit;
} epk_plan;

EPK_API epk_plan epk_plan_default(void);

EPK_API epk_status epk_run_coverage(const epk_plan* plan, epk_format format, char** out);
EPK_API epk_status epk_run_theta_limit(double alpha, double theta, uint64_t draws, uint64_t seed,
                                       uint64_t stream, int threads, epk_format format,
                                       char** out);
EPK_API epk_status epk_run_ialpha(const double* grid, size_t count,
                                  const epk_trunc_policy* policy, epk_format format, char** out);

#ifdef __cplusplus
}
#endif

#endif /* EPKIT_EPKIT_H */
