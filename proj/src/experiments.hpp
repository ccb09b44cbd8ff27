#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "estimate.hpp"
#include "sibuya.hpp"

namespace epkit::experiments {

enum class Estimator { mle, qmle_known_theta, qmle_zero };
const char* estimator_name(Estimator e);

struct Plan {
  double alpha = 0.6;
  double theta = 1.0;
  std::vector<std::uint64_t> n_grid;  // empty selects 2^7 .. 2^17
  std::uint32_t replications = 500;
  std::vector<Estimator> estimators = {Estimator::mle, Estimator::qmle_known_theta,
                                       Estimator::qmle_zero};
  double level = 0.95;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int threads = 0;  // 0 picks the hardware count
  estimate::FitConfig fit;
};

// Replication r simulates one growing trajectory on stream (plan.stream + r)
// and every estimator reads the same checkpoints, so columns are paired and
// results do not depend on the thread count.
struct CoverageCell {
  Estimator estimator = Estimator::mle;
  std::uint64_t n = 0;
  std::uint32_t requested = 0;
  std::uint32_t completed = 0;
  std::uint32_t dropped = 0;  // degenerate profile, boundary hit, or no convergence
  double mean_alpha = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double coverage = 0.0;
  double mean_k_fisher = 0.0;
  double efficiency = 0.0;  // 1 / (mse * mean_k_fisher)
  bool has_theta = false;   // location columns populated (joint fits only)
  double theta_mean = 0.0;
  double theta_sd = 0.0;
  double theta_q05 = 0.0;
  double theta_q25 = 0.0;
  double theta_q50 = 0.0;
  double theta_q75 = 0.0;
  double theta_q95 = 0.0;
};

struct CoverageReport {
  Plan plan;
  std::vector<CoverageCell> cells;  // grid-major, estimator-minor
};

CoverageReport run_coverage(const Plan& plan);
std::string coverage_csv(const CoverageReport& report);
std::string coverage_json(const CoverageReport& report);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
  double density = 0.0;
};

struct ThetaLimitReport {
  double alpha = 0.0;
  double theta = 0.0;
  std::uint64_t draws = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double ref_mean = 0.0;  // center of the reference normal
  double ref_sd = 0.0;    // alpha / sqrt(f'_alpha(theta/alpha))
  double min = 0.0;
  double max = 0.0;
  std::vector<HistogramBin> bins;  // Freedman-Diaconis widths
};

ThetaLimitReport run_theta_limit(double alpha, double theta, std::uint64_t draws,
                                 std::uint64_t seed, std::uint64_t stream, int threads);
std::string theta_limit_csv(const ThetaLimitReport& report);
std::string theta_limit_json(const ThetaLimitReport& report);

struct IalphaPoint {
  double alpha = 0.0;
  double value = 0.0;
  double tail_bound = 0.0;
  bool certified = false;
};

std::vector<IalphaPoint> run_ialpha(const std::vector<double>& grid,
                                    const sibuya::TruncationPolicy& policy);
std::string ialpha_csv(const std::vector<IalphaPoint>& points);
std::string ialpha_json(const std::vector<IalphaPoint>& points);

}  // namespace epkit::experiments
