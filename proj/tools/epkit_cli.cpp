#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epkit/epkit.h"

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

int exit_code(epk_status status) { return status == EPK_ERR_DEGENERATE ? 3 : 2; }

int report_failure(epk_status status) {
  std::cerr << "error (" << epk_status_name(status) << "): " << epk_last_error() << '\n';
  return exit_code(status);
}

int write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error (io): cannot open " << path << " for writing\n";
    return 2;
  }
  out << text;
  if (!out.flush()) {
    std::cerr << "error (io): short write to " << path << '\n';
    return 2;
  }
  return 0;
}

struct RngHandle {
  epk_rng* ptr = nullptr;
  ~RngHandle() { epk_rng_free(ptr); }
};

struct StatsHandle {
  epk_stats* ptr = nullptr;
  ~StatsHandle() { epk_stats_free(ptr); }
};

struct FitHandle {
  epk_fit* ptr = nullptr;
  ~FitHandle() { epk_fit_free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { epk_string_free(ptr); }
};

std::string fit_result_json(const epk_fit_result& fit) {
  std::ostringstream out;
  out << "{\"alpha_hat\":" << format_double(fit.alpha_hat) << ",\"theta_hat\":";
  if (fit.has_theta)
    out << format_double(fit.theta_hat);
  else
    out << "null";
  out << ",\"k\":" << fit.k << ",\"n\":" << fit.n
      << ",\"fisher\":" << format_double(fit.fisher_at_hat)
      << ",\"converged\":" << bool_text(fit.converged != 0)
      << ",\"boundary_hit\":" << bool_text(fit.boundary_hit != 0)
      << ",\"iterations\":" << fit.iterations
      << ",\"residual\":" << format_double(fit.residual)
      << ",\"sign_changes\":" << fit.sign_changes << '}';
  return out.str();
}

int load_stats(const std::string& input, const std::string& blocks, const std::string& edges,
               bool multi, StatsHandle& stats) {
  const int given = (!input.empty()) + (!blocks.empty()) + (!edges.empty());
  if (given != 1) {
    std::cerr << "error (invalid): provide exactly one of --input, --blocks, --edges\n";
    return 2;
  }
  epk_status status = EPK_OK;
  if (!input.empty())
    status = epk_stats_read_json(input.c_str(), &stats.ptr);
  else if (!blocks.empty())
    status = epk_stats_read_blocks(blocks.c_str(), &stats.ptr);
  else
    status = epk_stats_read_edges(edges.c_str(), multi ? 1 : 0, &stats.ptr);
  if (status != EPK_OK) return report_failure(status);
  return 0;
}

int parse_alpha_grid(const std::string& text, std::vector<double>& grid) {
  grid.clear();
  if (text.find(':') != std::string::npos) {
    double start = 0, stop = 0, step = 0;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &extra) != 3 ||
        step <= 0) {
      std::cerr << "error (invalid): --grid expects start:stop:step or a comma list\n";
      return 2;
    }
    for (int i = 0;; ++i) {
      const double value = start + step * i;
      if (value > stop + 1e-12) break;
      grid.push_back(value);
    }
  } else {
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        std::size_t used = 0;
        const double value = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        grid.push_back(value);
      } catch (const std::exception&) {
        std::cerr << "error (invalid): bad --grid entry '" << item << "'\n";
        return 2;
      }
    }
  }
  if (grid.empty()) {
    std::cerr << "error (invalid): --grid produced no points\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ewens-Pitman partition toolkit: simulation, estimation, inference, studies"};
  app.fallthrough();
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int threads = 0;
  std::string format = "json";
  std::string out_path;
  app.add_option("--seed", seed, "RNG seed")->capture_default_str();
  app.add_option("--stream", stream, "RNG stream id")->capture_default_str();
  app.add_option("--threads", threads, "worker threads, 0 = hardware count")
      ->capture_default_str();
  app.add_option("--format", format, "report format for experiment subcommand")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "output file (default stdout)");

  auto* sim = app.add_subcommand("simulate", "draw a partition or a growing trajectory");
  double sim_alpha = 0.5;
  double sim_theta = 0.0;
  std::uint64_t sim_n = 0;
  std::vector<std::uint64_t> sim_trajectory;
  sim->add_option("--alpha", sim_alpha, "shape in (0,1)")->required();
  sim->add_option("--theta", sim_theta, "location > -alpha")->required();
  sim->add_option("--n", sim_n, "sample size");
  sim->add_option("--trajectory", sim_trajectory, "comma-separated checkpoint sizes")
      ->delimiter(',');

  auto* fit = app.add_subcommand("fit", "estimate (alpha, theta) from observed class sizes");
  std::string fit_input, fit_blocks, fit_edges;
  bool fit_multi = false;
  double plug_theta = 0.0;
  std::vector<double> alpha_bounds;
  double fit_level = 0.95;
  fit->add_option("--input", fit_input, "stats JSON file");
  fit->add_option("--blocks", fit_blocks, "text file, one class size per line");
  fit->add_option("--edges", fit_edges, "edge list file; degrees become class sizes");
  fit->add_flag("--multi", fit_multi, "allow parallel edges and self-loops");
  auto* plug_opt =
      fit->add_option("--plug-theta", plug_theta, "pin the location, estimate the shape only");
  fit->add_option("--alpha-bounds", alpha_bounds, "search interval lo,hi for the shape")
      ->delimiter(',')
      ->expected(2);
  fit->add_option("--level", fit_level, "confidence level")->capture_default_str();

  auto* sparsity = app.add_subcommand("test-sparsity", "test shape <= 1/mu against sparser");
  std::string sp_edges;
  bool sp_multi = false;
  double sp_mu = 2.0;
  double sp_delta = 0.05;
  bool sp_two_sided = false;
  sparsity->add_option("--edges", sp_edges, "edge list file")->required();
  sparsity->add_flag("--multi", sp_multi, "allow parallel edges and self-loops");
  sparsity->add_option("--mu", sp_mu, "mean-degree bound under the null")->capture_default_str();
  sparsity->add_option("--delta", sp_delta, "test level")->capture_default_str();
  sparsity->add_flag("--two-sided", sp_two_sided, "two-sided alternative");

  auto* experiment = app.add_subcommand("experiment", "Monte Carlo studies");
  std::string preset;
  double ex_alpha = 0.6;
  double ex_theta = 1.0;
  std::uint32_t ex_reps = 500;
  std::vector<std::uint64_t> ex_n_grid;
  std::vector<std::string> ex_estimators;
  double ex_level = 0.95;
  std::uint64_t ex_draws = 100000;
  std::string ex_grid = "0.1:0.9:0.1";
  std::uint64_t ex_j_max = 100000;
  double ex_tail_tol = 1e-6;
  experiment->add_option("--preset", preset, "coverage|efficiency|theta-limit|ialpha")
      ->required()
      ->check(CLI::IsMember({"coverage", "efficiency", "theta-limit", "ialpha"}));
  experiment->add_option("--alpha", ex_alpha, "true shape")->capture_default_str();
  experiment->add_option("--theta", ex_theta, "true location")->capture_default_str();
  experiment->add_option("--reps", ex_reps, "replications per sample size")
      ->capture_default_str();
  experiment->add_option("--n-grid", ex_n_grid, "comma-separated sample sizes")->delimiter(',');
  experiment
      ->add_option("--estimators", ex_estimators, "subset of mle,qmle_known_theta,qmle_zero")
      ->delimiter(',')
      ->check(CLI::IsMember({"mle", "qmle_known_theta", "qmle_zero"}));
  experiment->add_option("--level", ex_level, "interval level")->capture_default_str();
  experiment->add_option("--draws", ex_draws, "limit-law sample count")->capture_default_str();
  experiment->add_option("--grid", ex_grid, "shape grid start:stop:step or comma list")
      ->capture_default_str();
  experiment->add_option("--j-max", ex_j_max, "series truncation point")->capture_default_str();
  experiment->add_option("--tail-tol", ex_tail_tol, "certified tail tolerance")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (const char* env = std::getenv("EP_KIT_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end == nullptr || *end != '\0') {
      std::cerr << "error (invalid): EP_KIT_THREADS must be an integer\n";
      return 2;
    }
    threads = static_cast<int>(parsed);
  }

  if (sim->parsed()) {
    if ((sim_n == 0) == sim_trajectory.empty()) {
      std::cerr << "error (invalid): provide exactly one of --n or --trajectory\n";
      return 2;
    }
    RngHandle rng;
    if (const epk_status status = epk_rng_new(seed, stream, &rng.ptr); status != EPK_OK)
      return report_failure(status);
    std::string text;
    if (!sim_trajectory.empty()) {
      std::vector<epk_stats*> checkpoints(sim_trajectory.size(), nullptr);
      const epk_status status =
          epk_simulate_trajectory(rng.ptr, sim_alpha, sim_theta, sim_trajectory.data(),
                                  sim_trajectory.size(), checkpoints.data());
      if (status != EPK_OK) return report_failure(status);
      text += '[';
      for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        StringHandle json;
        StatsHandle owner;
        owner.ptr = checkpoints[i];
        if (const epk_status s = epk_stats_to_json(checkpoints[i], &json.ptr); s != EPK_OK) {
          for (std::size_t j = i + 1; j < checkpoints.size(); ++j)
            epk_stats_free(checkpoints[j]);
          return report_failure(s);
        }
        if (i > 0) text += ',';
        text += json.ptr;
      }
      text += "]\n";
    } else {
      StatsHandle stats;
      if (const epk_status status = epk_simulate(rng.ptr, sim_alpha, sim_theta, sim_n, &stats.ptr);
          status != EPK_OK)
        return report_failure(status);
      StringHandle json;
      if (const epk_status status = epk_stats_to_json(stats.ptr, &json.ptr); status != EPK_OK)
        return report_failure(status);
      text = json.ptr;
      text += '\n';
    }
    return write_output(out_path, text);
  }

  if (fit->parsed()) {
    StatsHandle stats;
    if (const int rc = load_stats(fit_input, fit_blocks, fit_edges, fit_multi, stats); rc != 0)
      return rc;
    epk_fit_config config = epk_fit_config_default();
    if (!alpha_bounds.empty()) {
      config.alpha_lo = alpha_bounds[0];
      config.alpha_hi = alpha_bounds[1];
    }
    FitHandle fitted;
    const bool pinned = plug_opt->count() > 0;
    const epk_status status = pinned
                                  ? epk_fit_qmle(stats.ptr, plug_theta, &config, &fitted.ptr)
                                  : epk_fit_mle(stats.ptr, &config, &fitted.ptr);
    if (status != EPK_OK) return report_failure(status);
    epk_fit_result result;
    epk_fit_get(fitted.ptr, &result);
    std::ostringstream text;
    text << "{\"estimator\":\"" << (pinned ? "qmle" : "mle") << "\",\"plug_theta\":";
    if (pinned)
      text << format_double(plug_theta);
    else
      text << "null";
    text << ",\"fit\":" << fit_result_json(result) << ",\"ci\":";
    epk_confidence_interval ci;
    if (epk_confidence_interval_get(fitted.ptr, fit_level, &ci) == EPK_OK)
      text << "{\"level\":" << format_double(ci.level) << ",\"lo\":" << format_double(ci.lo)
           << ",\"hi\":" << format_double(ci.hi) << '}';
    else
      text << "null";
    text << "}\n";
    return write_output(out_path, text.str());
  }

  if (sparsity->parsed()) {
    StatsHandle stats;
    if (const int rc = load_stats("", "", sp_edges, sp_multi, stats); rc != 0) return rc;
    epk_sparsity_result result;
    const epk_status status =
        epk_sparsity_test(stats.ptr, sp_mu, sp_delta, nullptr, sp_two_sided ? 1 : 0, &result);
    if (status != EPK_OK) return report_failure(status);
    std::ostringstream text;
    text << "{\"mu\":" << format_double(result.mu) << ",\"delta\":" << format_double(result.delta)
         << ",\"z\":" << format_double(result.z_stat)
         << ",\"critical\":" << format_double(result.critical)
         << ",\"p_value\":" << format_double(result.p_value)
         << ",\"reject\":" << bool_text(result.reject != 0)
         << ",\"two_sided\":" << bool_text(result.two_sided != 0)
         << ",\"small_sample\":" << bool_text(result.small_sample != 0) << ",\"warning\":";
    if (result.small_sample)
      text << "\"fewer than 50 classes; the normal calibration is unreliable\"";
    else
      text << "null";
    text << ",\"fit\":" << fit_result_json(result.fit) << "}\n";
    return write_output(out_path, text.str());
  }

  const epk_format report_format = format == "csv" ? EPK_FORMAT_CSV : EPK_FORMAT_JSON;
  if (preset == "coverage" || preset == "efficiency") {
    epk_plan plan = epk_plan_default();
    plan.alpha = ex_alpha;
    plan.theta = ex_theta;
    plan.replications = ex_reps;
    plan.level = ex_level;
    plan.seed = seed;
    plan.stream = stream;
    plan.threads = threads;
    if (!ex_n_grid.empty()) {
      plan.n_grid = ex_n_grid.data();
      plan.n_grid_len = ex_n_grid.size();
    }
    std::vector<int> estimators;
    for (const std::string& name : ex_estimators) {
      if (name == "mle")
        estimators.push_back(EPK_EST_MLE);
      else if (name == "qmle_known_theta")
        estimators.push_back(EPK_EST_QMLE_KNOWN_THETA);
      else
        estimators.push_back(EPK_EST_QMLE_ZERO);
    }
    if (!estimators.empty()) {
      plan.estimators = estimators.data();
      plan.estimators_len = estimators.size();
    }
    StringHandle text;
    if (const epk_status status = epk_run_coverage(&plan, report_format, &text.ptr);
        status != EPK_OK)
      return report_failure(status);
    return write_output(out_path, text.ptr);
  }
  if (preset == "theta-limit") {
    StringHandle text;
    if (const epk_status status = epk_run_theta_limit(ex_alpha, ex_theta, ex_draws, seed, stream,
                                                      threads, report_format, &text.ptr);
        status != EPK_OK)
      return report_failure(status);
    return write_output(out_path, text.ptr);
  }
  std::vector<double> grid;
  if (const int rc = parse_alpha_grid(ex_grid, grid); rc != 0) return rc;
  epk_trunc_policy policy = epk_trunc_policy_default();
  policy.j_max = ex_j_max;
  policy.tail_tol = ex_tail_tol;
  StringHandle text;
  if (const epk_status status =
          epk_run_ialpha(grid.data(), grid.size(), &policy, report_format, &text.ptr);
      status != EPK_OK)
    return report_failure(status);
  return write_output(out_path, text.ptr);
}
