#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pricelab/env.hpp"
#include "pricelab/oracle.hpp"
#include "pricelab/qlearn.hpp"
#include "pricelab/rng.hpp"
#include "pricelab/rolling.hpp"

namespace pricelab {

struct RunConfig {
  EnvConfig env;
  AgentConfig agent;
  std::uint64_t iterations = 100000;
  std::uint64_t seed = 1;
  std::size_t rolling_window = 1000;
  double convergence_fraction = 0.95;
  // (state_index, action_index) whose Q-value and rewards are recorded at the
  // iterations where that exact cell is played.
  std::optional<std::pair<std::size_t, std::size_t>> tracked_cell;
  // Programmatic knobs, not part of the config file surface.
  bool store_curve = true;
  std::optional<QTable> initial_qtable;

  std::size_t state_count() const { return env.state_grid.size(); }
  std::size_t action_count() const { return env.action_grid.size(); }

  void validate() const {
    env.validate();
    agent.validate();
    if (rolling_window == 0)
      throw std::invalid_argument("RunConfig: rolling_window must be >= 1");
    if (iterations < rolling_window)
      throw std::invalid_argument(
          "RunConfig: iterations must be >= rolling_window");
    if (!(convergence_fraction > 0.0 && convergence_fraction <= 1.0))
      throw std::invalid_argument(
          "RunConfig: convergence_fraction outside (0, 1]");
    if (tracked_cell && (tracked_cell->first >= state_count() ||
                         tracked_cell->second >= action_count()))
      throw std::invalid_argument("RunConfig: tracked_cell out of range");
    if (initial_qtable && (initial_qtable->n_states() != state_count() ||
                           initial_qtable->n_actions() != action_count()))
      throw std::invalid_argument(
          "RunConfig: initial_qtable dimensions do not match the grids");
  }
};

struct CurvePoint {
  std::uint64_t iteration = 0;
  double rolling_mean = 0.0;
};

struct TrackedPoint {
  std::uint64_t iteration = 0;
  double q_value = 0.0;
  double reward = 0.0;
};

struct RunResult {
  double total_reward = 0.0;
  double final_reward = 0.0;        // rolling mean over the last window
  double greedy_eval_reward = 0.0;  // oracle value of the final greedy policy
  std::optional<std::uint64_t> convergence_iteration;
  std::vector<CurvePoint> curve;
  std::vector<TrackedPoint> tracked_trajectory;
  QTable qtable;
  double benchmark_mean_optimum = 0.0;
  std::uint64_t seed = 0;
};

using StepObserver =
    std::function<void(std::uint64_t iteration, const Observation&)>;

// Full-resolution curves are kept up to this many points; longer runs are
// strided down to it.
inline constexpr std::uint64_t kMaxCurvePoints = 100000;

// First curve iteration whose rolling mean reaches fraction * benchmark_mean.
inline std::optional<std::uint64_t> detect_convergence(
    const std::vector<CurvePoint>& curve, double benchmark_mean,
    double fraction) {
  if (curve.empty())
    throw std::invalid_argument("detect_convergence: empty curve");
  const double threshold = fraction * benchmark_mean;
  for (const CurvePoint& point : curve)
    if (point.rolling_mean >= threshold) return point.iteration;
  return std::nullopt;
}

// One training run: iterations of sample -> select -> step -> update, with
// rolling statistics and optional trajectory capture. Deterministic in the
// seed: customer arrivals, purchase events and exploration each consume a
// substream derived from it. The exploration substream is salted with the
// update mode, so single/batch runs on the same seed share identical
// environment randomness while keeping their own exploration draws.
inline RunResult run(const RunConfig& config,
                     const StepObserver& observer = {}) {
  config.validate();
  const EnvConfig& env = config.env;
  const double alpha = config.agent.learning_rate;
  const bool batch_mode = config.agent.update_mode == UpdateMode::batch;

  const BenchmarkReport benchmark = benchmark_closed_form(env);
  const double threshold = config.convergence_fraction * benchmark.mean_optimum;

  RandomStream customer_rng =
      derive_stream(config.seed, StreamPurpose::customer);
  RandomStream purchase_rng =
      derive_stream(config.seed, StreamPurpose::purchase);
  RandomStream explore_rng = derive_stream(
      config.seed, StreamPurpose::exploration, batch_mode ? 1 : 0);

  RunResult result;
  result.seed = config.seed;
  result.benchmark_mean_optimum = benchmark.mean_optimum;
  result.qtable = config.initial_qtable
                      ? *config.initial_qtable
                      : QTable(config.state_count(), config.action_count());
  QTable& q = result.qtable;
  BatchBuffer buffer(batch_mode ? config.agent.batch_size : 1);
  RollingMean rolling(config.rolling_window);

  const std::uint64_t n_points = config.iterations - config.rolling_window + 1;
  const std::uint64_t stride =
      n_points <= kMaxCurvePoints
          ? 1
          : (n_points + kMaxCurvePoints - 1) / kMaxCurvePoints;
  if (config.store_curve)
    result.curve.reserve(static_cast<std::size_t>(n_points / stride + 1));

  for (std::uint64_t t = 1; t <= config.iterations; ++t) {
    const CustomerState state = sample_customer(env, customer_rng);
    const std::size_t action = select_action(
        q, state.state_index, config.agent.explore_prob, explore_rng);
    const Observation obs = step(env, state, action, purchase_rng);

    if (batch_mode)
      record_and_maybe_flush(q, buffer, obs, alpha);
    else
      update_single(q, obs, alpha);

    result.total_reward += obs.reward;
    rolling.push(obs.reward);
    if (rolling.full()) {
      const double mean = rolling.mean();
      if (config.store_curve && (t - config.rolling_window) % stride == 0)
        result.curve.push_back({t, mean});
      if (!result.convergence_iteration && mean >= threshold)
        result.convergence_iteration = t;
    }
    if (config.tracked_cell &&
        state.state_index == config.tracked_cell->first &&
        action == config.tracked_cell->second)
      result.tracked_trajectory.push_back(
          {t, q.value(state.state_index, action), obs.reward});
    if (observer) observer(t, obs);
  }

  if (batch_mode && config.agent.flush_residual) flush_buffer(q, buffer, alpha);

  result.final_reward = rolling.mean();
  const std::vector<std::size_t> policy = greedy_policy(q);
  double eval = 0.0;
  for (std::size_t s = 0; s < config.state_count(); ++s)
    eval += expected_reward(env.state_grid[s], env.action_grid[policy[s]],
                            env.base_price, env.steepness);
  result.greedy_eval_reward = eval / static_cast<double>(config.state_count());
  return result;
}

inline double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

inline double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// P(X >= k) for X ~ Binomial(n, 1/2): the one-sided sign-test tail.
inline double binomial_tail_one_sided(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  long double total = 0.0L;
  const long double ln_half = -0.69314718055994530942L;
  for (std::size_t i = k; i <= n; ++i) {
    const long double log_choose =
        std::lgammal(static_cast<long double>(n) + 1.0L) -
        std::lgammal(static_cast<long double>(i) + 1.0L) -
        std::lgammal(static_cast<long double>(n - i) + 1.0L);
    total += std::exp(log_choose + static_cast<long double>(n) * ln_half);
  }
  return static_cast<double>(total < 1.0L ? total : 1.0L);
}

// Paired comparison of total rewards, b over a: mean relative improvement,
// one-sided sign-test p-value, and raw per-pair deltas. Pairs with a zero
// baseline are excluded from the relative mean; zero deltas are dropped from
// the sign test.
struct ComparisonReport {
  double mean_relative_improvement = 0.0;
  double sign_test_p = 1.0;
  std::vector<double> deltas;  // b.total_reward - a.total_reward per pair
};

inline ComparisonReport compare_totals(const std::vector<RunResult>& a,
                                       const std::vector<RunResult>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("compare_totals: length mismatch");
  if (a.empty()) throw std::invalid_argument("compare_totals: empty input");
  ComparisonReport report;
  report.deltas.reserve(a.size());
  double rel_sum = 0.0;
  std::size_t rel_count = 0;
  std::size_t positives = 0;
  std::size_t nonzero = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double delta = b[i].total_reward - a[i].total_reward;
    report.deltas.push_back(delta);
    if (a[i].total_reward > 0.0) {
      rel_sum += delta / a[i].total_reward;
      ++rel_count;
    }
    if (delta != 0.0) {
      ++nonzero;
      if (delta > 0.0) ++positives;
    }
  }
  if (rel_count > 0)
    report.mean_relative_improvement =
        rel_sum / static_cast<double>(rel_count);
  report.sign_test_p =
      nonzero == 0 ? 1.0 : binomial_tail_one_sided(nonzero, positives);
  return report;
}

// One cell of the 2x2x2 factorial: a state grid x action grid x update mode
// combination, aggregated over seeds.
struct FactorialCell {
  std::string state_space;   // "sparse" or "granular"
  std::string action_space;  // "sparse" or "granular"
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  UpdateMode mode = UpdateMode::single;
  std::vector<RunResult> runs;  // one per seed, in seed order, curves omitted

  double mean_total = 0.0;
  double std_total = 0.0;
  double mean_final = 0.0;
  double std_final = 0.0;
  double mean_greedy_eval = 0.0;
  double mean_convergence = 0.0;  // over the seeds that converged
  std::size_t n_converged = 0;
};

// Runs all eight factorial cells for every seed. Env parameters, agent
// parameters and run settings come from `base`; the grids and update mode are
// overridden per cell. Cell order matches the canonical results table:
// action space major (sparse first), then state space, then single/batch.
inline std::vector<FactorialCell> run_factorial(
    const RunConfig& base, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty())
    throw std::invalid_argument("run_factorial: seeds must be non-empty");
  const std::pair<std::string, std::vector<double>> action_grids[] = {
      {"sparse", sparse_action_grid()}, {"granular", granular_action_grid()}};
  const std::pair<std::string, std::vector<double>> state_grids[] = {
      {"sparse", sparse_state_grid()}, {"granular", granular_state_grid()}};

  std::vector<FactorialCell> cells;
  for (const auto& [action_label, action_grid] : action_grids) {
    for (const auto& [state_label, state_grid] : state_grids) {
      for (const UpdateMode mode : {UpdateMode::single, UpdateMode::batch}) {
        FactorialCell cell;
        cell.state_space = state_label;
        cell.action_space = action_label;
        cell.n_states = state_grid.size();
        cell.n_actions = action_grid.size();
        cell.mode = mode;

        std::vector<double> totals, finals, greedys, convergences;
        for (const std::uint64_t seed : seeds) {
          RunConfig config = base;
          config.env.state_grid = state_grid;
          config.env.action_grid = action_grid;
          config.agent.update_mode = mode;
          config.seed = seed;
          config.store_curve = false;
          config.tracked_cell.reset();
          try {
            cell.runs.push_back(run(config));
          } catch (const std::exception& e) {
            throw std::runtime_error(
                "run_factorial: cell " + action_label + "x" + state_label +
                (mode == UpdateMode::batch ? "/batch" : "/single") + " seed " +
                std::to_string(seed) + ": " + e.what());
          }
          const RunResult& r = cell.runs.back();
          totals.push_back(r.total_reward);
          finals.push_back(r.final_reward);
          greedys.push_back(r.greedy_eval_reward);
          if (r.convergence_iteration)
            convergences.push_back(
                static_cast<double>(*r.convergence_iteration));
        }
        cell.mean_total = mean_of(totals);
        cell.std_total = sample_std(totals);
        cell.mean_final = mean_of(finals);
        cell.std_final = sample_std(finals);
        cell.mean_greedy_eval = mean_of(greedys);
        cell.n_converged = convergences.size();
        cell.mean_convergence = mean_of(convergences);
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

// The simplified fixed-consideration experiment: one state with beta = 0.6,
// the granular 80-discount action grid, and the 0.17 discount cell tracked.
// Both update modes run on the same seed, so they face identical customer
// and purchase randomness.
inline constexpr double kIllustrativeBeta = 0.6;
inline constexpr double kIllustrativeTrackedDiscount = 0.17;

struct IllustrativePair {
  RunResult single_run;
  RunResult batch_run;
  std::size_t tracked_action_index = 0;
  double oracle_expectation = 0.0;  // closed-form value of the tracked cell
};

inline IllustrativePair run_illustrative(const RunConfig& base) {
  RunConfig config = base;
  config.env.state_grid = {kIllustrativeBeta};
  config.env.action_grid = granular_action_grid();

  std::size_t tracked = 0;
  double best_gap = std::abs(config.env.action_grid[0] -
                             kIllustrativeTrackedDiscount);
  for (std::size_t a = 1; a < config.env.action_grid.size(); ++a) {
    const double gap =
        std::abs(config.env.action_grid[a] - kIllustrativeTrackedDiscount);
    if (gap < best_gap) {
      best_gap = gap;
      tracked = a;
    }
  }
  config.tracked_cell = {std::size_t{0}, tracked};

  IllustrativePair pair;
  pair.tracked_action_index = tracked;
  pair.oracle_expectation =
      expected_reward(kIllustrativeBeta, config.env.action_grid[tracked],
                      config.env.base_price, config.env.steepness);

  config.agent.update_mode = UpdateMode::single;
  pair.single_run = run(config);
  config.agent.update_mode = UpdateMode::batch;
  pair.batch_run = run(config);
  return pair;
}

}  // namespace pricelab
