#include "partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace epkit::partition {

void check_params(const EpParams& params) {
  if (!(params.alpha > 0.0) || !(params.alpha < 1.0) || !std::isfinite(params.alpha)) {
    throw domain_error("partition: alpha must lie in (0,1)");
  }
  if (!(params.theta > -params.alpha) || !std::isfinite(params.theta)) {
    throw domain_error("partition: theta must exceed -alpha");
  }
}

void PartitionStats::check() const {
  if (n < 1) throw domain_error("stats: n must be at least 1");
  if (k < 1 || k > n) throw domain_error("stats: class count out of range");
  if (sizes.empty()) throw domain_error("stats: empty size profile");
  std::uint64_t total_classes = 0;
  std::uint64_t total_items = 0;
  std::uint64_t prev = 0;
  for (const auto& [size, count] : sizes) {
    if (size <= prev) throw domain_error("stats: sizes must be ascending and distinct");
    if (size > n) throw domain_error("stats: size exceeds n");
    if (count == 0) throw domain_error("stats: zero count stored");
    total_classes += count;
    total_items += size * count;
    prev = size;
  }
  if (total_classes != k) throw domain_error("stats: counts do not sum to k");
  if (total_items != n) throw domain_error("stats: sizes do not sum to n");
}

namespace {

// Fenwick tree over class sizes; entry j carries count[j]*(j - alpha) so a
// single prefix search implements the size-biased pick in O(log cap).
class SizeUrn {
 public:
  explicit SizeUrn(double alpha) : alpha_(alpha) { resize(8); }

  void insert_new_class() {
    count_[1] += 1;
    add(1, 1.0 - alpha_);
    if (max_size_ < 1) max_size_ = 1;
  }

  void grow_class(std::uint64_t j) {
    count_[j] -= 1;
    add(j, -(static_cast<double>(j) - alpha_));
    if (j + 1 > cap_) resize(cap_ * 2);
    count_[j + 1] += 1;
    add(j + 1, static_cast<double>(j + 1) - alpha_);
    if (j + 1 > max_size_) max_size_ = j + 1;
  }

  // Largest occupied size with cumulative weight <= t, clamped to occupied
  // cells to absorb floating-point drift at the boundary.
  std::uint64_t pick(double t) const {
    std::uint64_t pos = 0;
    std::uint64_t step = top_;
    double rest = t;
    while (step > 0) {
      const std::uint64_t next = pos + step;
      if (next <= cap_ && tree_[next] <= rest) {
        pos = next;
        rest -= tree_[next];
      }
      step >>= 1;
    }
    std::uint64_t j = pos + 1;
    if (j > max_size_) j = max_size_;
    while (j > 1 && count_[j] == 0) --j;
    while (j < max_size_ && count_[j] == 0) ++j;
    return j;
  }

  const std::vector<std::uint64_t>& counts() const { return count_; }
  std::uint64_t max_size() const { return max_size_; }

 private:
  void add(std::uint64_t i, double w) {
    for (; i <= cap_; i += i & (~i + 1)) tree_[i] += w;
  }

  void resize(std::uint64_t new_cap) {
    count_.resize(new_cap + 1, 0);
    cap_ = new_cap;
    top_ = 1;
    while (top_ * 2 <= cap_) top_ *= 2;
    tree_.assign(cap_ + 1, 0.0);
    for (std::uint64_t j = 1; j <= max_size_; ++j) {
      if (count_[j] > 0) {
        add(j, static_cast<double>(count_[j]) * (static_cast<double>(j) - alpha_));
      }
    }
  }

  double alpha_;
  std::uint64_t cap_ = 0;
  std::uint64_t top_ = 1;
  std::uint64_t max_size_ = 0;
  std::vector<std::uint64_t> count_;
  std::vector<double> tree_;
};

PartitionStats snapshot(const SizeUrn& urn, std::uint64_t n, std::uint64_t k) {
  PartitionStats st;
  st.n = n;
  st.k = k;
  const auto& count = urn.counts();
  for (std::uint64_t j = 1; j <= urn.max_size(); ++j) {
    if (count[j] > 0) st.sizes.emplace_back(j, count[j]);
  }
  st.check();
  return st;
}

PartitionStats build_from_sizes(const std::vector<std::uint64_t>& sizes, const char* what,
                                const char* zero_message) {
  if (sizes.empty()) throw domain_error(std::string(what) + ": empty input");
  std::vector<std::uint64_t> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == 0) throw domain_error(std::string(what) + ": " + zero_message);
  PartitionStats st;
  st.k = sorted.size();
  for (std::uint64_t v : sorted) {
    st.n += v;
    if (!st.sizes.empty() && st.sizes.back().first == v) {
      st.sizes.back().second += 1;
    } else {
      st.sizes.emplace_back(v, 1);
    }
  }
  st.check();
  return st;
}

}  // namespace

std::vector<PartitionStats> simulate_trajectory(const EpParams& params,
                                                const std::vector<std::uint64_t>& checkpoints,
                                                Rng& rng) {
  check_params(params);
  if (checkpoints.empty()) throw domain_error("trajectory: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1) throw domain_error("trajectory: checkpoints must be positive");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw domain_error("trajectory: checkpoints must be strictly increasing");
    }
  }

  std::vector<PartitionStats> out;
  out.reserve(checkpoints.size());
  SizeUrn urn(params.alpha);
  urn.insert_new_class();  // the first item always opens a class
  std::uint64_t k = 1;
  std::size_t next = 0;
  if (checkpoints[0] == 1) {
    out.push_back(snapshot(urn, 1, k));
    ++next;
  }
  const std::uint64_t target = checkpoints.back();
  for (std::uint64_t m = 1; m < target; ++m) {
    const double total = params.theta + static_cast<double>(m);
    const double fresh = params.theta + static_cast<double>(k) * params.alpha;
    const double r = rng.uniform() * total;
    if (r < fresh) {
      urn.insert_new_class();
      ++k;
    } else {
      urn.grow_class(urn.pick(r - fresh));
    }
    if (next < checkpoints.size() && m + 1 == checkpoints[next]) {
      out.push_back(snapshot(urn, m + 1, k));
      ++next;
    }
  }
  return out;
}

PartitionStats simulate(const EpParams& params, std::uint64_t n, Rng& rng) {
  return simulate_trajectory(params, {n}, rng).front();
}

PartitionStats stats_from_blocks(const std::vector<std::uint64_t>& block_sizes) {
  return build_from_sizes(block_sizes, "stats_from_blocks", "class sizes must be positive");
}

PartitionStats stats_from_degrees(const std::vector<std::uint64_t>& degrees) {
  return build_from_sizes(degrees, "stats_from_degrees",
                          "zero degree found; drop isolated vertices upstream");
}

std::vector<std::pair<std::uint64_t, double>> empirical_measure(const PartitionStats& stats) {
  stats.check();
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(stats.sizes.size());
  for (const auto& [j, c] : stats.sizes) {
    out.emplace_back(j, static_cast<double>(c) / static_cast<double>(stats.k));
  }
  return out;
}

void enumerate_partitions(std::uint64_t n,
                          const std::function<void(const PartitionStats&)>& visit) {
  if (n < 1) throw domain_error("enumerate_partitions: n must be at least 1");
  if (n > 10) throw domain_error("enumerate_partitions: n must not exceed 10");
  std::vector<std::uint64_t> label(n, 0);
  std::vector<std::uint64_t> block_sizes;

  const std::function<void(std::uint64_t, std::uint64_t)> walk = [&](std::uint64_t i,
                                                                     std::uint64_t used) {
    if (i == n) {
      block_sizes.assign(used, 0);
      for (std::uint64_t b : label) block_sizes[b] += 1;
      visit(stats_from_blocks(block_sizes));
      return;
    }
    for (std::uint64_t b = 0; b <= used; ++b) {
      label[i] = b;
      walk(i + 1, std::max(used, b + 1));
    }
  };
  walk(0, 0);
}

double naive_alpha(const PartitionStats& stats) {
  stats.check();
  if (stats.n < 2) throw domain_error("naive_alpha: requires n >= 2");
  return std::log(static_cast<double>(stats.k)) / std::log(static_cast<double>(stats.n));
}

}  // namespace epkit::partition
