#pragma once

#include "estimate.hpp"
#include "partition.hpp"

namespace epkit::inference {

double normal_cdf(double x);

// Inverse of normal_cdf on (0,1); bracketed Newton, |cdf(z) - p| <= 1e-15.
double normal_quantile(double p);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;
  double alpha_hat = 0.0;
  std::uint64_t k = 0;
  double fisher = 0.0;
};

// Wald interval alpha_hat +- z_{(1+level)/2} / sqrt(K * I_{alpha_hat}),
// clamped to [0,1]. Requires a converged interior fit.
ConfidenceInterval confidence_interval(const estimate::FitResult& fit, double level = 0.95);

struct SparsityTest {
  double mu = 0.0;
  double delta = 0.0;
  double z_stat = 0.0;
  double critical = 0.0;
  double p_value = 0.0;
  bool reject = false;
  bool small_sample = false;  // fewer than 50 classes behind the estimate
  bool two_sided = false;
  estimate::FitResult fit;
};

// Tests the null "shape <= 1/mu" (dense enough for mean degree mu) against
// the sparse alternative via z = sqrt(K*I) * (alpha_hat - 1/mu).
SparsityTest sparsity_test(const partition::PartitionStats& stats, double mu, double delta,
                           const estimate::FitConfig& config = {}, bool two_sided = false);

// sqrt(K * I_{alpha_hat}) * (alpha_hat - alpha_true).
double standardized_error(const estimate::FitResult& fit, double alpha_true);

}  // namespace epkit::inference
