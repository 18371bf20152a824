#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pricelab/config.hpp"
#include "pricelab/harness.hpp"
#include "pricelab/io.hpp"

namespace {

using nlohmann::json;
using namespace pricelab;

double round6(double v) { return std::round(v * 1e6) / 1e6; }

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> seeds;
  bool quiet = false;
};

FileConfig effective_config(const CommonOpts& opts) {
  FileConfig config = opts.config_path.empty()
                          ? FileConfig{}
                          : load_config_file(opts.config_path);
  if (opts.seed) config.run_config.seed = *opts.seed;
  if (opts.seeds) config.replications = *opts.seeds;
  config.run_config.validate();
  if (config.replications == 0)
    throw std::invalid_argument("replications must be >= 1");
  return config;
}

std::vector<std::uint64_t> replicate_seeds(const FileConfig& config) {
  std::vector<std::uint64_t> seeds(config.replications);
  for (std::size_t i = 0; i < seeds.size(); ++i)
    seeds[i] = config.run_config.seed + i;
  return seeds;
}

void note(const CommonOpts& opts, const std::string& line) {
  if (!opts.quiet) std::cout << line << "\n";
}

std::string curve_csv(const RunResult& result) {
  std::string out = "iteration,rolling_mean_reward\n";
  for (const CurvePoint& p : result.curve) {
    out += std::to_string(p.iteration);
    out += ',';
    out += format_fixed(p.rolling_mean);
    out += '\n';
  }
  return out;
}

std::string qtable_csv(const EnvConfig& env, const QTable& q) {
  std::string out = "state_index,beta_prob,action_index,discount,q_value,visits\n";
  for (std::size_t s = 0; s < q.n_states(); ++s)
    for (std::size_t a = 0; a < q.n_actions(); ++a) {
      out += std::to_string(s);
      out += ',';
      out += format_fixed(env.state_grid[s]);
      out += ',';
      out += std::to_string(a);
      out += ',';
      out += format_fixed(env.action_grid[a]);
      out += ',';
      out += format_fixed(q.value(s, a));
      out += ',';
      out += std::to_string(q.visit_count(s, a));
      out += '\n';
    }
  return out;
}

json result_json(const FileConfig& config, const RunResult& result) {
  json j;
  j["config"] = to_json(config);
  j["seed"] = result.seed;
  j["total_reward"] = round6(result.total_reward);
  j["final_reward"] = round6(result.final_reward);
  j["greedy_eval_reward"] = round6(result.greedy_eval_reward);
  j["benchmark_mean_optimum"] = round6(result.benchmark_mean_optimum);
  if (result.convergence_iteration)
    j["convergence_iteration"] = *result.convergence_iteration;
  else
    j["convergence_iteration"] = nullptr;
  j["curve_points"] = result.curve.size();
  j["tracked_points"] = result.tracked_trajectory.size();
  return j;
}

int cmd_run(const CommonOpts& opts) {
  const FileConfig config = effective_config(opts);
  const RunResult result = run(config.run_config);

  OutputStager stager(opts.out_dir);
  stager.stage("curve.csv", curve_csv(result));
  stager.stage("result.json", result_json(config, result).dump(2) + "\n");
  stager.stage("qtable.csv", qtable_csv(config.run_config.env, result.qtable));
  stager.commit();
  note(opts, "wrote curve.csv, result.json, qtable.csv to " + opts.out_dir);
  note(opts, "total=" + format_fixed(result.total_reward) +
                 " final=" + format_fixed(result.final_reward) +
                 " greedy_eval=" + format_fixed(result.greedy_eval_reward));
  return 0;
}

int cmd_factorial(const CommonOpts& opts) {
  const FileConfig config = effective_config(opts);
  const std::vector<std::uint64_t> seeds = replicate_seeds(config);
  const std::vector<FactorialCell> cells =
      run_factorial(config.run_config, seeds);

  std::string csv =
      "action_space_size,state_space_size,update_method,mean_final_reward,"
      "std_final_reward,mean_total_reward,std_total_reward,"
      "mean_greedy_eval_reward,mean_convergence_iteration,n_seeds\n";
  for (const FactorialCell& cell : cells) {
    csv += std::to_string(cell.n_actions);
    csv += ',';
    csv += std::to_string(cell.n_states);
    csv += ',';
    csv += cell.mode == UpdateMode::batch ? "batch" : "single";
    csv += ',';
    csv += format_fixed(cell.mean_final);
    csv += ',';
    csv += format_fixed(cell.std_final);
    csv += ',';
    csv += format_fixed(cell.mean_total);
    csv += ',';
    csv += format_fixed(cell.std_total);
    csv += ',';
    csv += format_fixed(cell.mean_greedy_eval);
    csv += ',';
    if (cell.n_converged > 0) csv += format_fixed(cell.mean_convergence);
    csv += ',';
    csv += std::to_string(seeds.size());
    csv += '\n';
  }

  OutputStager stager(opts.out_dir);
  stager.stage("factorial.csv", csv);
  stager.commit();
  note(opts, "wrote factorial.csv (" + std::to_string(cells.size()) +
                 " cells x " + std::to_string(seeds.size()) + " seeds) to " +
                 opts.out_dir);
  return 0;
}

std::string trace_csv(const RunResult& result, double oracle_expectation) {
  std::string out = "iteration,q_value,observed_reward,oracle_expectation\n";
  for (const TrackedPoint& p : result.tracked_trajectory) {
    out += std::to_string(p.iteration);
    out += ',';
    out += format_fixed(p.q_value);
    out += ',';
    out += format_fixed(p.reward);
    out += ',';
    out += format_fixed(oracle_expectation);
    out += '\n';
  }
  return out;
}

int cmd_illustrate(const CommonOpts& opts) {
  const FileConfig config = effective_config(opts);
  const std::vector<std::uint64_t> seeds = replicate_seeds(config);

  RunConfig base = config.run_config;
  base.store_curve = false;

  std::vector<RunResult> singles, batches;
  std::optional<IllustrativePair> first;
  for (const std::uint64_t seed : seeds) {
    base.seed = seed;
    IllustrativePair pair = run_illustrative(base);
    if (!first) first = pair;
    singles.push_back(std::move(pair.single_run));
    batches.push_back(std::move(pair.batch_run));
  }
  const ComparisonReport report = compare_totals(singles, batches);

  json improvement;
  improvement["n_pairs"] = seeds.size();
  improvement["tracked_discount"] = round6(kIllustrativeTrackedDiscount);
  improvement["oracle_expectation"] = round6(first->oracle_expectation);
  improvement["mean_relative_improvement"] =
      round6(report.mean_relative_improvement);
  improvement["sign_test_p"] = round6(report.sign_test_p);
  json pairs = json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    json p;
    p["seed"] = seeds[i];
    p["total_single"] = round6(singles[i].total_reward);
    p["total_batch"] = round6(batches[i].total_reward);
    p["delta"] = round6(report.deltas[i]);
    pairs.push_back(p);
  }
  improvement["pairs"] = pairs;

  OutputStager stager(opts.out_dir);
  stager.stage("trace_single.csv",
               trace_csv(singles.front(), first->oracle_expectation));
  stager.stage("trace_batch.csv",
               trace_csv(batches.front(), first->oracle_expectation));
  stager.stage("improvement.json", improvement.dump(2) + "\n");
  stager.commit();
  note(opts, "wrote trace_single.csv, trace_batch.csv, improvement.json to " +
                 opts.out_dir);
  note(opts,
       "batch over single: " +
           format_fixed(report.mean_relative_improvement * 100.0, 3) +
           "% (sign-test p=" + format_fixed(report.sign_test_p, 6) + ")");
  return 0;
}

json benchmark_json(const EnvConfig& env, const BenchmarkReport& report) {
  json j;
  j["method"] = report.method == BenchmarkMethod::monte_carlo ? "monte_carlo"
                                                              : "closed_form";
  j["mean_optimum"] = round6(report.mean_optimum);
  j["mc_std_error"] = round6(report.mc_std_error);
  j["samples_per_cell"] = report.samples_per_cell;
  json per_state = json::array();
  for (const BenchmarkReport::StateOptimum& opt : report.per_state) {
    json s;
    s["state_index"] = opt.state_index;
    s["beta_prob"] = round6(env.state_grid[opt.state_index]);
    s["best_action_index"] = opt.best_action_index;
    s["best_discount"] = round6(env.action_grid[opt.best_action_index]);
    s["expected_reward"] = round6(opt.expected_reward);
    per_state.push_back(s);
  }
  j["per_state"] = per_state;
  return j;
}

int cmd_oracle(const CommonOpts& opts) {
  const FileConfig config = effective_config(opts);
  const EnvConfig& env = config.run_config.env;

  const BenchmarkReport closed = benchmark_closed_form(env);
  const BenchmarkReport mc = benchmark_monte_carlo(
      env, config.oracle.mc_samples_per_cell, config.run_config.seed);

  json oracle;
  oracle["closed_form"] = benchmark_json(env, closed);
  oracle["monte_carlo"] = benchmark_json(env, mc);

  std::string csv = "beta_prob,discount,expected_reward\n";
  for (const double beta : env.state_grid)
    for (const double discount : env.action_grid) {
      csv += format_fixed(beta);
      csv += ',';
      csv += format_fixed(discount);
      csv += ',';
      csv += format_fixed(
          expected_reward(beta, discount, env.base_price, env.steepness));
      csv += '\n';
    }

  OutputStager stager(opts.out_dir);
  stager.stage("oracle.json", oracle.dump(2) + "\n");
  stager.stage("revenue_curves.csv", csv);
  stager.commit();
  note(opts, "wrote oracle.json, revenue_curves.csv to " + opts.out_dir);
  note(opts, "mean optimum: closed_form=" + format_fixed(closed.mean_optimum) +
                 " monte_carlo=" + format_fixed(mc.mean_optimum) +
                 " (max cell SE=" + format_fixed(mc.mc_std_error) + ")");
  return 0;
}

int cmd_histogram(const CommonOpts& opts, std::optional<std::uint64_t> n_flag) {
  const FileConfig config = effective_config(opts);
  const EnvConfig& env = config.run_config.env;
  const HistogramSettings& settings = config.histogram;
  const std::uint64_t n = n_flag ? *n_flag : settings.samples;
  if (n == 0) throw std::invalid_argument("histogram: n must be >= 1");
  if (settings.state_index >= env.state_grid.size())
    throw std::invalid_argument("histogram: state_index out of range");

  RandomStream rng =
      derive_stream(config.run_config.seed, StreamPurpose::histogram);
  const CustomerState state{settings.state_index,
                            env.state_grid[settings.state_index]};
  const std::vector<HistogramBin> bins =
      reward_histogram(env, state, settings.policy, n, rng);

  std::string csv = "reward_value,count\n";
  for (const HistogramBin& bin : bins) {
    csv += format_fixed(bin.reward);
    csv += ',';
    csv += std::to_string(bin.count);
    csv += '\n';
  }

  OutputStager stager(opts.out_dir);
  stager.stage("histogram.csv", csv);
  stager.commit();
  note(opts, "wrote histogram.csv (" + std::to_string(bins.size()) +
                 " bins over " + std::to_string(n) + " draws) to " +
                 opts.out_dir);
  return 0;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_seeds) {
  cmd->add_option("-c,--config", opts.config_path,
                  "Path to a JSON run-config file");
  cmd->add_option("-o,--out", opts.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Override the config-file seed");
  if (with_seeds)
    cmd->add_option("--seeds", opts.seeds,
                    "Number of replicate seeds (master seed + i)");
  cmd->add_flag("-q,--quiet", opts.quiet, "Suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pricelab: discount-pricing simulation lab with tabular Q-learning "
      "(single and batch updates), a perfect-knowledge oracle, and a "
      "deterministic experiment harness"};
  app.require_subcommand(1);

  CommonOpts run_opts, factorial_opts, illustrate_opts, oracle_opts,
      histogram_opts;
  std::optional<std::uint64_t> n_flag;

  CLI::App* c_run = app.add_subcommand(
      "run", "One training run; writes curve.csv, result.json, qtable.csv");
  add_common(c_run, run_opts, false);

  CLI::App* c_factorial = app.add_subcommand(
      "factorial",
      "2x2x2 grid/update-mode suite over replicate seeds; writes factorial.csv");
  add_common(c_factorial, factorial_opts, true);

  CLI::App* c_illustrate = app.add_subcommand(
      "illustrate",
      "Fixed-consideration (beta=0.6) paired single/batch traces; writes "
      "trace_single.csv, trace_batch.csv, improvement.json");
  add_common(c_illustrate, illustrate_opts, true);

  CLI::App* c_oracle = app.add_subcommand(
      "oracle",
      "Perfect-knowledge benchmark, closed form and Monte Carlo; writes "
      "oracle.json, revenue_curves.csv");
  add_common(c_oracle, oracle_opts, false);

  CLI::App* c_histogram = app.add_subcommand(
      "histogram", "Sampled reward distribution; writes histogram.csv");
  add_common(c_histogram, histogram_opts, false);
  c_histogram->add_option("-n", n_flag, "Number of sampled rewards");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) return cmd_run(run_opts);
    if (c_factorial->parsed()) return cmd_factorial(factorial_opts);
    if (c_illustrate->parsed()) return cmd_illustrate(illustrate_opts);
    if (c_oracle->parsed()) return cmd_oracle(oracle_opts);
    if (c_histogram->parsed()) return cmd_histogram(histogram_opts, n_flag);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
