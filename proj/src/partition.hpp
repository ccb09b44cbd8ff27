#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace epkit::partition {

struct EpParams {
  double alpha = 0.5;
  double theta = 0.0;
};

// Throws domain_error unless 0 < alpha < 1 and theta > -alpha.
void check_params(const EpParams& params);

// Size-indexed summary of a set partition: s[j] counts the classes of size j.
// Only occupied sizes are stored, in ascending size order.
struct PartitionStats {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sizes;

  // Enforces n >= 1, ascending unique sizes, positive counts,
  // sum of counts = k and size-weighted sum = n.
  void check() const;
};

// Sequential seating scheme: item m+1 starts a new class with probability
// (theta + k*alpha)/(theta + m), otherwise joins a class of size j with
// probability proportional to s[j]*(j - alpha).
PartitionStats simulate(const EpParams& params, std::uint64_t n, Rng& rng);

// One growing trajectory observed at the given sizes (sorted, distinct).
std::vector<PartitionStats> simulate_trajectory(const EpParams& params,
                                                const std::vector<std::uint64_t>& checkpoints,
                                                Rng& rng);

PartitionStats stats_from_blocks(const std::vector<std::uint64_t>& block_sizes);

// Degree-sequence entry point for graphs: every vertex degree is a class
// size. Zero degrees are rejected; drop isolated vertices upstream.
PartitionStats stats_from_degrees(const std::vector<std::uint64_t>& degrees);

// Fractions of classes per size: (j, s[j]/k).
std::vector<std::pair<std::uint64_t, double>> empirical_measure(const PartitionStats& stats);

// Visits every set partition of {1..n} (restricted growth strings); n <= 10.
void enumerate_partitions(std::uint64_t n,
                          const std::function<void(const PartitionStats&)>& visit);

// log k / log n; requires n >= 2.
double naive_alpha(const PartitionStats& stats);

}  // namespace epkit::partition
