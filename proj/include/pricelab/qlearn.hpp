#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pricelab/env.hpp"
#include "pricelab/rng.hpp"

namespace pricelab {

// Dense |states| x |actions| table of value estimates plus visit counts.
// Zero-initialized: with rewards in [0, base_price] every estimate stays in
// that interval under both update rules.
class QTable {
 public:
  QTable() = default;
  QTable(std::size_t n_states, std::size_t n_actions)
      : n_states_(n_states),
        n_actions_(n_actions),
        values_(n_states * n_actions, 0.0),
        visits_(n_states * n_actions, 0) {
    if (n_states == 0 || n_actions == 0)
      throw std::invalid_argument("QTable: dimensions must be positive");
  }

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }

  double value(std::size_t s, std::size_t a) const {
    return values_[s * n_actions_ + a];
  }
  double& value(std::size_t s, std::size_t a) {
    return values_[s * n_actions_ + a];
  }
  std::uint64_t visit_count(std::size_t s, std::size_t a) const {
    return visits_[s * n_actions_ + a];
  }
  std::uint64_t& visit_count(std::size_t s, std::size_t a) {
    return visits_[s * n_actions_ + a];
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint64_t>& visits() const { return visits_; }

 private:
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> visits_;
};

enum class UpdateMode { single, batch };

struct AgentConfig {
  double learning_rate = 0.1;  // alpha in (0, 1]
  double explore_prob = 0.1;   // probability of a uniformly random action
  UpdateMode update_mode = UpdateMode::single;
  std::size_t batch_size = 1000;  // ignored in single mode
  bool flush_residual = false;    // flush a partial buffer at run end

  void validate() const {
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw std::invalid_argument("AgentConfig: learning_rate outside (0, 1]");
    if (!(explore_prob >= 0.0 && explore_prob <= 1.0))
      throw std::invalid_argument("AgentConfig: explore_prob outside [0, 1]");
    if (batch_size == 0)
      throw std::invalid_argument("AgentConfig: batch_size must be >= 1");
  }
};

// One relaxation step of an estimate toward a target. Both update rules go
// through this expression, which is what makes batch mode at B=1 bit-identical
// to single-observation updates.
inline double step_toward(double current, double target, double alpha) {
  return current + alpha * (target - current);
}

// Argmax over one state's row, ties broken by the lowest action index.
inline std::size_t greedy_action(const QTable& q, std::size_t state_index) {
  if (state_index >= q.n_states())
    throw std::invalid_argument("greedy_action: state_index out of range");
  std::size_t best = 0;
  double best_value = q.value(state_index, 0);
  for (std::size_t a = 1; a < q.n_actions(); ++a) {
    const double value = q.value(state_index, a);
    if (value > best_value) {
      best_value = value;
      best = a;
    }
  }
  return best;
}

// Epsilon-greedy: explore uniformly with probability explore_prob, otherwise
// take the greedy action.
inline std::size_t select_action(const QTable& q, std::size_t state_index,
                                 double explore_prob, RandomStream& rng) {
  if (state_index >= q.n_states())
    throw std::invalid_argument("select_action: state_index out of range");
  if (rng.bernoulli(explore_prob)) return rng.next_index(q.n_actions());
  return greedy_action(q, state_index);
}

// Episodes are single-decision, so the Bellman target has no successor term
// and the update reduces to Q += alpha * (r - Q).
inline void update_single(QTable& q, const Observation& obs, double alpha) {
  if (obs.state_index >= q.n_states() || obs.action_index >= q.n_actions())
    throw std::invalid_argument("update_single: observation index out of range");
  double& cell = q.value(obs.state_index, obs.action_index);
  cell = step_toward(cell, obs.reward, alpha);
  ++q.visit_count(obs.state_index, obs.action_index);
}

// Fixed-capacity accumulator of observations awaiting a flush.
class BatchBuffer {
 public:
  explicit BatchBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0)
      throw std::invalid_argument("BatchBuffer: capacity must be >= 1");
    entries_.reserve(capacity < 4096 ? capacity : 4096);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Observation>& entries() const { return entries_; }

  void append(const Observation& obs) {
    if (entries_.size() >= capacity_)
      throw std::logic_error("BatchBuffer: append past capacity");
    entries_.push_back(obs);
  }

  void clear() { entries_.clear(); }

 private:
  std::size_t capacity_;
  std::vector<Observation> entries_;
};

// Group buffered observations by cell and apply one alpha-step toward each
// group's mean reward; visits are credited per observation. Cells are
// independent, so the index-order walk is deterministic.
inline void flush_buffer(QTable& q, BatchBuffer& buffer, double alpha) {
  if (buffer.empty()) return;
  const std::size_t cells = q.n_states() * q.n_actions();
  std::vector<double> sums(cells, 0.0);
  std::vector<std::uint64_t> counts(cells, 0);
  for (const Observation& obs : buffer.entries()) {
    if (obs.state_index >= q.n_states() || obs.action_index >= q.n_actions())
      throw std::invalid_argument("flush_buffer: observation index out of range");
    const std::size_t cell = obs.state_index * q.n_actions() + obs.action_index;
    sums[cell] += obs.reward;
    counts[cell] += 1;
  }
  for (std::size_t cell = 0; cell < cells; ++cell) {
    if (counts[cell] == 0) continue;
    const std::size_t s = cell / q.n_actions();
    const std::size_t a = cell % q.n_actions();
    const double mean = sums[cell] / static_cast<double>(counts[cell]);
    q.value(s, a) = step_toward(q.value(s, a), mean, alpha);
    q.visit_count(s, a) += counts[cell];
  }
  buffer.clear();
}

// Append an observation; when the buffer reaches capacity, flush it and
// report that a flush happened.
inline bool record_and_maybe_flush(QTable& q, BatchBuffer& buffer,
                                   const Observation& obs, double alpha) {
  buffer.append(obs);
  if (buffer.size() < buffer.capacity()) return false;
  flush_buffer(q, buffer, alpha);
  return true;
}

inline std::vector<std::size_t> greedy_policy(const QTable& q) {
  std::vector<std::size_t> policy(q.n_states());
  for (std::size_t s = 0; s < q.n_states(); ++s) policy[s] = greedy_action(q, s);
  return policy;
}

}  // namespace pricelab
