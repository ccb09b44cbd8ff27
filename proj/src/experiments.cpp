#include "experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "inference.hpp"
#include "mcstats.hpp"
#include "mittag.hpp"
#include "rng.hpp"
#include "specfun.hpp"
#include "stats_io.hpp"

namespace epkit::experiments {

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, count) on a small pool. Workers pull indices from
// a shared counter, so the partition of work is nondeterministic but all
// results land in index-addressed slots and reductions stay order-fixed.
void parallel_for(std::uint64_t count, int threads, const std::function<void(std::uint64_t)>& body) {
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(threads)),
                                               count == 0 ? 1 : count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto drain = [&] {
    while (true) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct CellDraw {
  bool kept = false;
  bool covered = false;
  bool has_theta = false;
  double alpha_hat = 0.0;
  double k_fisher = 0.0;
  double theta_hat = 0.0;
};

void validate_plan(Plan& plan) {
  partition::check_params({plan.alpha, plan.theta});
  if (plan.replications == 0) throw domain_error("run_coverage: replications must be positive");
  if (plan.estimators.empty()) throw domain_error("run_coverage: no estimators requested");
  if (!(plan.level > 0.0 && plan.level < 1.0))
    throw domain_error("run_coverage: level must lie in (0,1)");
  if (plan.n_grid.empty())
    for (std::uint64_t n = 128; n <= 131072; n *= 2) plan.n_grid.push_back(n);
  for (std::size_t i = 0; i < plan.n_grid.size(); ++i) {
    if (plan.n_grid[i] == 0) throw domain_error("run_coverage: sample sizes must be positive");
    if (i > 0 && plan.n_grid[i] <= plan.n_grid[i - 1])
      throw domain_error("run_coverage: n_grid must be strictly increasing");
  }
}

void run_replication(const Plan& plan, std::uint64_t r, CellDraw* out) {
  Rng rng(plan.seed, plan.stream + r);
  const auto trajectory =
      partition::simulate_trajectory({plan.alpha, plan.theta}, plan.n_grid, rng);
  for (std::size_t gi = 0; gi < plan.n_grid.size(); ++gi) {
    const auto& stats = trajectory[gi];
    for (std::size_t ei = 0; ei < plan.estimators.size(); ++ei) {
      CellDraw& draw = out[gi * plan.estimators.size() + ei];
      estimate::FitResult fit;
      try {
        switch (plan.estimators[ei]) {
          case Estimator::mle:
            fit = estimate::fit_mle(stats, plan.fit);
            break;
          case Estimator::qmle_known_theta:
            fit = estimate::fit_qmle(stats, plan.theta, plan.fit);
            break;
          case Estimator::qmle_zero:
            fit = estimate::fit_qmle(stats, 0.0, plan.fit);
            break;
        }
      } catch (const degeneracy_error&) {
        continue;
      }
      if (!fit.converged || fit.boundary_hit) continue;
      const auto ci = inference::confidence_interval(fit, plan.level);
      draw.kept = true;
      draw.covered = ci.lo <= plan.alpha && plan.alpha <= ci.hi;
      draw.alpha_hat = fit.alpha_hat;
      draw.k_fisher = static_cast<double>(fit.k) * fit.fisher_at_hat;
      draw.has_theta = fit.has_theta;
      draw.theta_hat = fit.theta_hat;
    }
  }
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

}  // namespace

const char* estimator_name(Estimator e) {
  switch (e) {
    case Estimator::mle:
      return "mle";
    case Estimator::qmle_known_theta:
      return "qmle_known_theta";
    case Estimator::qmle_zero:
      return "qmle_zero";
  }
  return "unknown";
}

CoverageReport run_coverage(const Plan& plan_in) {
  CoverageReport report;
  report.plan = plan_in;
  Plan& plan = report.plan;
  validate_plan(plan);

  const std::size_t cells = plan.n_grid.size() * plan.estimators.size();
  std::vector<CellDraw> draws(static_cast<std::size_t>(plan.replications) * cells);
  parallel_for(plan.replications, plan.threads,
               [&](std::uint64_t r) { run_replication(plan, r, &draws[r * cells]); });

  report.cells.resize(cells);
  for (std::size_t gi = 0; gi < plan.n_grid.size(); ++gi) {
    for (std::size_t ei = 0; ei < plan.estimators.size(); ++ei) {
      CoverageCell& cell = report.cells[gi * plan.estimators.size() + ei];
      cell.estimator = plan.estimators[ei];
      cell.n = plan.n_grid[gi];
      cell.requested = plan.replications;
      long double sum_alpha = 0, sum_sq = 0, sum_kf = 0;
      std::uint32_t covered = 0;
      std::vector<double> thetas;
      for (std::uint64_t r = 0; r < plan.replications; ++r) {
        const CellDraw& draw = draws[r * cells + gi * plan.estimators.size() + ei];
        if (!draw.kept) continue;
        ++cell.completed;
        covered += draw.covered ? 1 : 0;
        sum_alpha += draw.alpha_hat;
        const double err = draw.alpha_hat - plan.alpha;
        sum_sq += err * err;
        sum_kf += draw.k_fisher;
        if (draw.has_theta) thetas.push_back(draw.theta_hat);
      }
      cell.dropped = cell.requested - cell.completed;
      if (cell.completed == 0) continue;
      const double m = static_cast<double>(cell.completed);
      cell.mean_alpha = static_cast<double>(sum_alpha) / m;
      cell.bias = cell.mean_alpha - plan.alpha;
      cell.mse = static_cast<double>(sum_sq) / m;
      cell.coverage = covered / m;
      cell.mean_k_fisher = static_cast<double>(sum_kf) / m;
      if (cell.mse > 0.0 && cell.mean_k_fisher > 0.0)
        cell.efficiency = 1.0 / (cell.mse * cell.mean_k_fisher);
      if (!thetas.empty()) {
        cell.has_theta = true;
        cell.theta_mean = mcstats::mean(thetas);
        cell.theta_sd = std::sqrt(mcstats::variance(thetas));
        std::sort(thetas.begin(), thetas.end());
        cell.theta_q05 = mcstats::quantile_sorted(thetas, 0.05);
        cell.theta_q25 = mcstats::quantile_sorted(thetas, 0.25);
        cell.theta_q50 = mcstats::quantile_sorted(thetas, 0.50);
        cell.theta_q75 = mcstats::quantile_sorted(thetas, 0.75);
        cell.theta_q95 = mcstats::quantile_sorted(thetas, 0.95);
      }
    }
  }
  return report;
}

std::string coverage_csv(const CoverageReport& report) {
  std::ostringstream out;
  out << "estimator,n,requested,completed,dropped,mean_alpha,bias,mse,coverage,"
         "mean_k_fisher,efficiency,theta_mean,theta_sd,theta_q05,theta_q25,theta_q50,"
         "theta_q75,theta_q95\n";
  for (const auto& cell : report.cells) {
    out << estimator_name(cell.estimator) << ',' << cell.n << ',' << cell.requested << ','
        << cell.completed << ',' << cell.dropped << ',' << io::format_double(cell.mean_alpha)
        << ',' << io::format_double(cell.bias) << ',' << io::format_double(cell.mse) << ','
        << io::format_double(cell.coverage) << ',' << io::format_double(cell.mean_k_fisher)
        << ',' << io::format_double(cell.efficiency);
    if (cell.has_theta) {
      out << ',' << io::format_double(cell.theta_mean) << ',' << io::format_double(cell.theta_sd)
          << ',' << io::format_double(cell.theta_q05) << ',' << io::format_double(cell.theta_q25)
          << ',' << io::format_double(cell.theta_q50) << ',' << io::format_double(cell.theta_q75)
          << ',' << io::format_double(cell.theta_q95);
    } else {
      out << ",,,,,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string coverage_json(const CoverageReport& report) {
  std::ostringstream out;
  const Plan& plan = report.plan;
  out << "{\"plan\":{\"alpha\":" << io::format_double(plan.alpha)
      << ",\"theta\":" << io::format_double(plan.theta) << ",\"replications\":" << plan.replications
      << ",\"level\":" << io::format_double(plan.level) << ",\"seed\":" << plan.seed
      << ",\"stream\":" << plan.stream << ",\"n_grid\":[";
  for (std::size_t i = 0; i < plan.n_grid.size(); ++i)
    out << (i ? "," : "") << plan.n_grid[i];
  out << "],\"estimators\":[";
  for (std::size_t i = 0; i < plan.estimators.size(); ++i)
    out << (i ? "," : "") << '"' << estimator_name(plan.estimators[i]) << '"';
  out << "]},\"cells\":[";
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& cell = report.cells[i];
    out << (i ? "," : "") << "{\"estimator\":\"" << estimator_name(cell.estimator)
        << "\",\"n\":" << cell.n << ",\"requested\":" << cell.requested
        << ",\"completed\":" << cell.completed << ",\"dropped\":" << cell.dropped
        << ",\"mean_alpha\":" << io::format_double(cell.mean_alpha)
        << ",\"bias\":" << io::format_double(cell.bias)
        << ",\"mse\":" << io::format_double(cell.mse)
        << ",\"coverage\":" << io::format_double(cell.coverage)
        << ",\"mean_k_fisher\":" << io::format_double(cell.mean_k_fisher)
        << ",\"efficiency\":" << io::format_double(cell.efficiency) << ",\"theta\":";
    if (cell.has_theta) {
      out << "{\"mean\":" << io::format_double(cell.theta_mean)
          << ",\"sd\":" << io::format_double(cell.theta_sd)
          << ",\"q05\":" << io::format_double(cell.theta_q05)
          << ",\"q25\":" << io::format_double(cell.theta_q25)
          << ",\"q50\":" << io::format_double(cell.theta_q50)
          << ",\"q75\":" << io::format_double(cell.theta_q75)
          << ",\"q95\":" << io::format_double(cell.theta_q95) << '}';
    } else {
      out << "null";
    }
    out << '}';
  }
  out << "]}\n";
  return out.str();
}

ThetaLimitReport run_theta_limit(double alpha, double theta, std::uint64_t draws,
                                 std::uint64_t seed, std::uint64_t stream, int threads) {
  partition::check_params({alpha, theta});
  if (draws == 0) throw domain_error("run_theta_limit: draws must be positive");

  ThetaLimitReport report;
  report.alpha = alpha;
  report.theta = theta;
  report.draws = draws;
  report.seed = seed;
  report.stream = stream;
  report.ref_mean = theta;
  report.ref_sd = alpha / std::sqrt(specfun::f_alpha_prime(alpha, theta / alpha));

  constexpr std::uint64_t kChunk = 65536;
  const std::uint64_t chunks = (draws + kChunk - 1) / kChunk;
  std::vector<double> samples(draws);
  parallel_for(chunks, threads, [&](std::uint64_t c) {
    Rng rng(seed, stream + c);
    const std::uint64_t lo = c * kChunk;
    const std::uint64_t hi = std::min(draws, lo + kChunk);
    for (std::uint64_t i = lo; i < hi; ++i)
      samples[i] = mittag::theta_limit_sample(alpha, theta, rng);
  });

  report.mean = mcstats::mean(samples);
  report.variance = mcstats::variance(samples);
  report.skewness = mcstats::skewness(samples);

  std::sort(samples.begin(), samples.end());
  report.min = samples.front();
  report.max = samples.back();
  const double iqr = mcstats::quantile_sorted(samples, 0.75) - mcstats::quantile_sorted(samples, 0.25);
  const double span = report.max - report.min;
  std::uint64_t bins = 1;
  if (span > 0.0) {
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(draws));
    if (!(width > 0.0)) width = span / 64.0;
    bins = std::min<std::uint64_t>(4096, std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(span / width))));
  }
  report.bins.resize(bins);
  const double width = span > 0.0 ? span / static_cast<double>(bins) : 1.0;
  for (std::uint64_t b = 0; b < bins; ++b) {
    report.bins[b].lo = report.min + width * static_cast<double>(b);
    report.bins[b].hi = (b + 1 == bins) ? std::max(report.max, report.min + width)
                                        : report.min + width * static_cast<double>(b + 1);
  }
  for (double x : samples) {
    std::uint64_t b = span > 0.0 ? static_cast<std::uint64_t>((x - report.min) / width) : 0;
    if (b >= bins) b = bins - 1;
    ++report.bins[b].count;
  }
  for (auto& bin : report.bins)
    bin.density = static_cast<double>(bin.count) /
                  (static_cast<double>(draws) * (bin.hi - bin.lo));
  return report;
}

std::string theta_limit_csv(const ThetaLimitReport& report) {
  std::ostringstream out;
  out << "bin_left,bin_right,count,density\n";
  for (const auto& bin : report.bins)
    out << io::format_double(bin.lo) << ',' << io::format_double(bin.hi) << ',' << bin.count
        << ',' << io::format_double(bin.density) << '\n';
  return out.str();
}

std::string theta_limit_json(const ThetaLimitReport& report) {
  std::ostringstream out;
  out << "{\"alpha\":" << io::format_double(report.alpha)
      << ",\"theta\":" << io::format_double(report.theta) << ",\"draws\":" << report.draws
      << ",\"seed\":" << report.seed << ",\"stream\":" << report.stream
      << ",\"mean\":" << io::format_double(report.mean)
      << ",\"variance\":" << io::format_double(report.variance)
      << ",\"skewness\":" << io::format_double(report.skewness)
      << ",\"ref_mean\":" << io::format_double(report.ref_mean)
      << ",\"ref_sd\":" << io::format_double(report.ref_sd)
      << ",\"min\":" << io::format_double(report.min)
      << ",\"max\":" << io::format_double(report.max) << ",\"bins\":[";
  for (std::size_t i = 0; i < report.bins.size(); ++i) {
    const auto& bin = report.bins[i];
    out << (i ? "," : "") << "{\"lo\":" << io::format_double(bin.lo)
        << ",\"hi\":" << io::format_double(bin.hi) << ",\"count\":" << bin.count
        << ",\"density\":" << io::format_double(bin.density) << '}';
  }
  out << "]}\n";
  return out.str();
}

std::vector<IalphaPoint> run_ialpha(const std::vector<double>& grid,
                                    const sibuya::TruncationPolicy& policy) {
  if (grid.empty()) throw domain_error("run_ialpha: empty grid");
  std::vector<IalphaPoint> points;
  points.reserve(grid.size());
  for (double alpha : grid) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw domain_error("run_ialpha: grid values must lie in (0,1)");
    const auto series = sibuya::fisher_info_series(alpha, policy);
    points.push_back({alpha, series.value, series.tail_bound, series.certified});
  }
  return points;
}

std::string ialpha_csv(const std::vector<IalphaPoint>& points) {
  std::ostringstream out;
  out << "alpha,value,tail_bound,certified\n";
  for (const auto& point : points)
    out << io::format_double(point.alpha) << ',' << io::format_double(point.value) << ','
        << io::format_double(point.tail_bound) << ',' << bool_text(point.certified) << '\n';
  return out.str();
}

std::string ialpha_json(const std::vector<IalphaPoint>& points) {
  std::ostringstream out;
  out << "{\"points\":[";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& point = points[i];
    out << (i ? "," : "") << "{\"alpha\":" << io::format_double(point.alpha)
        << ",\"value\":" << io::format_double(point.value)
        << ",\"tail_bound\":" << io::format_double(point.tail_bound)
        << ",\"certified\":" << bool_text(point.certified) << '}';
  }
  out << "]}\n";
  return out.str();
}

}  // namespace epkit::experiments
