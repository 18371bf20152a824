#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pricelab/rng.hpp"

namespace pricelab {

inline std::vector<double> make_grid(double start, double step,
                                     std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = start + step * static_cast<double>(i);
  return grid;
}

// Preset grids. The sparse/granular split covers the consideration
// probabilities (states) and the discount levels (actions).
inline std::vector<double> sparse_state_grid() { return make_grid(0.2, 0.1, 7); }
inline std::vector<double> granular_state_grid() {
  return make_grid(0.2, 0.015, 40);
}
inline std::vector<double> sparse_action_grid() {
  return make_grid(0.0, 0.1, 10);
}
inline std::vector<double> granular_action_grid() {
  return make_grid(0.0, 0.01, 80);
}

struct EnvConfig {
  double base_price = 100.0;  // undiscounted price, > 0
  double steepness = -35.0;   // discount response exponent, < 0
  std::vector<double> state_grid = sparse_state_grid();    // probs in (0, 1]
  std::vector<double> action_grid = sparse_action_grid();  // discounts in [0, 1)

  void validate() const {
    if (!(base_price > 0.0))
      throw std::invalid_argument("EnvConfig: base_price must be > 0");
    if (!(steepness < 0.0))
      throw std::invalid_argument("EnvConfig: steepness must be < 0");
    if (state_grid.empty() || action_grid.empty())
      throw std::invalid_argument("EnvConfig: grids must be non-empty");
    for (std::size_t i = 0; i < state_grid.size(); ++i) {
      if (!(state_grid[i] > 0.0 && state_grid[i] <= 1.0))
        throw std::invalid_argument(
            "EnvConfig: state_grid values must lie in (0, 1]");
      if (i > 0 && !(state_grid[i] > state_grid[i - 1]))
        throw std::invalid_argument(
            "EnvConfig: state_grid must be strictly increasing");
    }
    for (std::size_t i = 0; i < action_grid.size(); ++i) {
      if (!(action_grid[i] >= 0.0 && action_grid[i] < 1.0))
        throw std::invalid_argument(
            "EnvConfig: action_grid values must lie in [0, 1)");
      if (i > 0 && !(action_grid[i] > action_grid[i - 1]))
        throw std::invalid_argument(
            "EnvConfig: action_grid must be strictly increasing");
    }
  }
};

struct CustomerState {
  std::size_t state_index = 0;
  double beta_prob = 0.0;  // probability the customer considers buying at all
};

struct Observation {
  std::size_t state_index = 0;
  std::size_t action_index = 0;
  double reward = 0.0;
  bool purchased = false;
};

// P(purchase) = P(consider) * (1 - e^{steepness * discount}).
// Zero at discount 0, saturating toward beta_prob as the discount grows.
inline double purchase_probability(double beta_prob, double discount,
                                   double steepness) {
  if (!(beta_prob >= 0.0 && beta_prob <= 1.0))
    throw std::invalid_argument(
        "purchase_probability: beta_prob outside [0, 1]");
  if (!(discount >= 0.0 && discount < 1.0))
    throw std::invalid_argument("purchase_probability: discount outside [0, 1)");
  if (!(steepness < 0.0))
    throw std::invalid_argument("purchase_probability: steepness must be < 0");
  return beta_prob * (1.0 - std::exp(steepness * discount));
}

// Customers arrive uniformly over the state grid.
inline CustomerState sample_customer(const EnvConfig& env, RandomStream& rng) {
  if (env.state_grid.empty())
    throw std::invalid_argument("sample_customer: empty state grid");
  const std::size_t idx = rng.next_index(env.state_grid.size());
  return CustomerState{idx, env.state_grid[idx]};
}

// Two-stage draw: does the customer consider buying at all, then does the
// discount convert the consideration into a purchase. The conversion draw is
// only consumed when the consideration succeeds, so the stream position never
// depends on the chosen action.
inline Observation step(const EnvConfig& env, const CustomerState& state,
                        std::size_t action_index, RandomStream& rng) {
  if (action_index >= env.action_grid.size())
    throw std::invalid_argument("step: action_index out of range");
  const double discount = env.action_grid[action_index];
  const bool considered = rng.bernoulli(state.beta_prob);
  const bool purchased =
      considered && rng.bernoulli(1.0 - std::exp(env.steepness * discount));
  Observation obs;
  obs.state_index = state.state_index;
  obs.action_index = action_index;
  obs.purchased = purchased;
  obs.reward = purchased ? env.base_price * (1.0 - discount) : 0.0;
  return obs;
}

// How the histogram sampler picks actions: uniform over the grid or one
// fixed discount level.
struct ActionPolicy {
  enum class Kind { uniform, fixed };
  Kind kind = Kind::uniform;
  std::size_t fixed_index = 0;

  std::size_t sample(std::size_t n_actions, RandomStream& rng) const {
    if (kind == Kind::fixed) {
      if (fixed_index >= n_actions)
        throw std::invalid_argument("ActionPolicy: fixed_index out of range");
      return fixed_index;
    }
    return rng.next_index(n_actions);
  }
};

struct HistogramBin {
  double reward = 0.0;
  std::uint64_t count = 0;
};

// Sampled reward distribution for one customer state under an action policy.
// The zero bin is always reported; price bins appear only when hit.
inline std::vector<HistogramBin> reward_histogram(const EnvConfig& env,
                                                  const CustomerState& state,
                                                  const ActionPolicy& policy,
                                                  std::uint64_t n,
                                                  RandomStream& rng) {
  if (n == 0)
    throw std::invalid_argument("reward_histogram: n must be positive");
  std::map<double, std::uint64_t> bins;
  bins[0.0] = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t action = policy.sample(env.action_grid.size(), rng);
    const Observation obs = step(env, state, action, rng);
    bins[obs.reward] += 1;
  }
  std::vector<HistogramBin> out;
  out.reserve(bins.size());
  for (const auto& [reward, count] : bins) out.push_back({reward, count});
  return out;
}

}  // namespace pricelab
