#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pricelab/env.hpp"
#include "pricelab/rng.hpp"

namespace pricelab {

// Closed-form expectation of the reward from offering `discount` to a
// customer with consideration probability `beta_prob`:
//   E(R) = beta * (1 - e^{zeta d}) * pi * (1 - d).
// beta enters as the leading factor so the expectation is exactly linear
// in it, bit for bit.
inline double expected_reward(double beta_prob, double discount,
                              double base_price, double steepness) {
  if (!(beta_prob >= 0.0 && beta_prob <= 1.0))
    throw std::invalid_argument("expected_reward: beta_prob outside [0, 1]");
  if (!(discount >= 0.0 && discount < 1.0))
    throw std::invalid_argument("expected_reward: discount outside [0, 1)");
  if (!(base_price > 0.0))
    throw std::invalid_argument("expected_reward: base_price must be > 0");
  if (!(steepness < 0.0))
    throw std::invalid_argument("expected_reward: steepness must be < 0");
  return beta_prob *
         ((1.0 - std::exp(steepness * discount)) * base_price *
          (1.0 - discount));
}

// Continuous-discount optimum: the stationary point of
// (1 - e^{z d})(1 - d), i.e. the root of e^{z d}(1 - z(1 - d)) = 1 on (0, 1).
// Independent of beta and the base price. The residual is strictly
// decreasing (positive at 0, negative at 1), so bisection converges to the
// unique root; 200 halvings land at machine precision.
inline double optimal_discount_continuous(double steepness) {
  if (!(steepness < 0.0))
    throw std::invalid_argument(
        "optimal_discount_continuous: steepness must be < 0");
  const auto residual = [steepness](double d) {
    return std::exp(steepness * d) * (1.0 - steepness * (1.0 - d)) - 1.0;
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

enum class BenchmarkMethod { closed_form, monte_carlo };

// Perfect-knowledge performance report: per-state optimal action and its
// expected reward, plus their uniform average over states.
struct BenchmarkReport {
  struct StateOptimum {
    std::size_t state_index = 0;
    std::size_t best_action_index = 0;
    double expected_reward = 0.0;
  };
  std::vector<StateOptimum> per_state;
  double mean_optimum = 0.0;
  BenchmarkMethod method = BenchmarkMethod::closed_form;
  double mc_std_error = 0.0;  // max per-cell standard error, 0 for closed form
  std::uint64_t samples_per_cell = 0;
};

inline BenchmarkReport benchmark_closed_form(const EnvConfig& env) {
  env.validate();
  BenchmarkReport report;
  report.method = BenchmarkMethod::closed_form;
  double sum = 0.0;
  for (std::size_t s = 0; s < env.state_grid.size(); ++s) {
    std::size_t best = 0;
    double best_value = expected_reward(env.state_grid[s], env.action_grid[0],
                                        env.base_price, env.steepness);
    for (std::size_t a = 1; a < env.action_grid.size(); ++a) {
      const double value = expected_reward(
          env.state_grid[s], env.action_grid[a], env.base_price, env.steepness);
      if (value > best_value) {  // ties keep the lowest action index
        best_value = value;
        best = a;
      }
    }
    report.per_state.push_back({s, best, best_value});
    sum += best_value;
  }
  report.mean_optimum = sum / static_cast<double>(env.state_grid.size());
  return report;
}

struct CellEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of one cell's expected reward, sampled through the
// environment's step() so it exercises the generative path rather than the
// closed form. Each cell owns a substream derived from (seed, cell index),
// which makes the result independent of any sharding of the cell loop.
inline CellEstimate mc_cell_estimate(const EnvConfig& env,
                                     std::size_t state_index,
                                     std::size_t action_index,
                                     std::uint64_t samples,
                                     std::uint64_t seed) {
  if (samples == 0)
    throw std::invalid_argument("mc_cell_estimate: samples must be >= 1");
  const std::uint64_t cell =
      static_cast<std::uint64_t>(state_index) * env.action_grid.size() +
      action_index;
  RandomStream rng = derive_stream(seed, StreamPurpose::benchmark, cell);
  const CustomerState state{state_index, env.state_grid[state_index]};
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double r = step(env, state, action_index, rng).reward;
    sum += r;
    sum_sq += r * r;
  }
  CellEstimate est;
  const double n = static_cast<double>(samples);
  est.mean = sum / n;
  if (samples > 1) {
    const double var = (sum_sq - n * est.mean * est.mean) / (n - 1.0);
    est.std_error = std::sqrt(var > 0.0 ? var : 0.0) / std::sqrt(n);
  }
  return est;
}

inline BenchmarkReport benchmark_monte_carlo(const EnvConfig& env,
                                             std::uint64_t samples_per_cell,
                                             std::uint64_t seed) {
  env.validate();
  if (samples_per_cell == 0)
    throw std::invalid_argument(
        "benchmark_monte_carlo: samples_per_cell must be >= 1");
  BenchmarkReport report;
  report.method = BenchmarkMethod::monte_carlo;
  report.samples_per_cell = samples_per_cell;
  double sum = 0.0;
  for (std::size_t s = 0; s < env.state_grid.size(); ++s) {
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t a = 0; a < env.action_grid.size(); ++a) {
      const CellEstimate est =
          mc_cell_estimate(env, s, a, samples_per_cell, seed);
      if (a == 0 || est.mean > best_value) {
        best_value = est.mean;
        best = a;
      }
      if (est.std_error > report.mc_std_error)
        report.mc_std_error = est.std_error;
    }
    report.per_state.push_back({s, best, best_value});
    sum += best_value;
  }
  report.mean_optimum = sum / static_cast<double>(env.state_grid.size());
  return report;
}

}  // namespace pricelab
