#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "pricelab/env.hpp"
#include "pricelab/harness.hpp"
#include "pricelab/qlearn.hpp"

namespace pricelab {

// Settings for the histogram subcommand: which state to sample, under what
// action policy, and how many draws.
struct HistogramSettings {
  ActionPolicy policy;
  std::size_t state_index = 0;
  std::uint64_t samples = 100000;
};

struct OracleSettings {
  std::uint64_t mc_samples_per_cell = 100000;
};

// The parsed run-config file. Grid presets are remembered by name so the
// canonical serialization round-trips exactly what the user wrote.
struct FileConfig {
  RunConfig run_config;
  std::optional<std::string> state_preset = std::string("sparse");
  std::optional<std::string> action_preset = std::string("sparse");
  std::size_t replications = 20;  // seeds per cell in factorial/illustrate
  HistogramSettings histogram;
  OracleSettings oracle;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& section,
                                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw std::invalid_argument("config: unknown key '" + section +
                                  item.key() + "'");
  }
}

inline double get_double(const json& obj, const std::string& section,
                         const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    throw std::invalid_argument("config: '" + section + key +
                                "' must be a number");
  return v.get<double>();
}

inline std::uint64_t get_u64(const json& obj, const std::string& section,
                             const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!(v.is_number_unsigned() ||
        (v.is_number_integer() && v.get<std::int64_t>() >= 0)))
    throw std::invalid_argument("config: '" + section + key +
                                "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

inline bool get_bool(const json& obj, const std::string& section,
                     const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    throw std::invalid_argument("config: '" + section + key +
                                "' must be a boolean");
  return v.get<bool>();
}

inline std::string get_string(const json& obj, const std::string& section,
                              const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string())
    throw std::invalid_argument("config: '" + section + key +
                                "' must be a string");
  return v.get<std::string>();
}

inline void parse_grid(const json& value, const std::string& path,
                       bool is_state_grid, std::vector<double>& grid,
                       std::optional<std::string>& preset) {
  if (value.is_string()) {
    const std::string name = value.get<std::string>();
    if (name == "sparse")
      grid = is_state_grid ? sparse_state_grid() : sparse_action_grid();
    else if (name == "granular")
      grid = is_state_grid ? granular_state_grid() : granular_action_grid();
    else
      throw std::invalid_argument("config: '" + path +
                                  "' preset must be 'sparse' or 'granular'");
    preset = name;
    return;
  }
  if (value.is_array()) {
    grid.clear();
    for (const json& v : value) {
      if (!v.is_number())
        throw std::invalid_argument("config: '" + path +
                                    "' entries must be numbers");
      grid.push_back(v.get<double>());
    }
    preset.reset();
    return;
  }
  throw std::invalid_argument("config: '" + path +
                              "' must be a preset name or an array");
}

}  // namespace detail

inline FileConfig parse_config(const nlohmann::json& root) {
  using detail::get_bool;
  using detail::get_double;
  using detail::get_string;
  using detail::get_u64;
  using nlohmann::json;

  if (!root.is_object())
    throw std::invalid_argument("config: top level must be an object");
  detail::reject_unknown_keys(
      root, "", {"env", "agent", "run", "replications", "histogram", "oracle"});

  FileConfig config;
  RunConfig& rc = config.run_config;

  if (root.contains("env")) {
    const json& env = root.at("env");
    if (!env.is_object())
      throw std::invalid_argument("config: 'env' must be an object");
    detail::reject_unknown_keys(
        env, "env.", {"base_price", "steepness", "state_grid", "action_grid"});
    rc.env.base_price = get_double(env, "env.", "base_price", rc.env.base_price);
    rc.env.steepness = get_double(env, "env.", "steepness", rc.env.steepness);
    if (env.contains("state_grid"))
      detail::parse_grid(env.at("state_grid"), "env.state_grid", true,
                         rc.env.state_grid, config.state_preset);
    if (env.contains("action_grid"))
      detail::parse_grid(env.at("action_grid"), "env.action_grid", false,
                         rc.env.action_grid, config.action_preset);
  }

  if (root.contains("agent")) {
    const json& agent = root.at("agent");
    if (!agent.is_object())
      throw std::invalid_argument("config: 'agent' must be an object");
    detail::reject_unknown_keys(agent, "agent.",
                                {"learning_rate", "explore_prob", "update_mode",
                                 "batch_size", "flush_residual"});
    rc.agent.learning_rate =
        get_double(agent, "agent.", "learning_rate", rc.agent.learning_rate);
    rc.agent.explore_prob =
        get_double(agent, "agent.", "explore_prob", rc.agent.explore_prob);
    const std::string mode = get_string(agent, "agent.", "update_mode",
                                        rc.agent.update_mode == UpdateMode::batch
                                            ? "batch"
                                            : "single");
    if (mode == "single")
      rc.agent.update_mode = UpdateMode::single;
    else if (mode == "batch")
      rc.agent.update_mode = UpdateMode::batch;
    else
      throw std::invalid_argument(
          "config: 'agent.update_mode' must be 'single' or 'batch'");
    rc.agent.batch_size = static_cast<std::size_t>(
        get_u64(agent, "agent.", "batch_size", rc.agent.batch_size));
    rc.agent.flush_residual =
        get_bool(agent, "agent.", "flush_residual", rc.agent.flush_residual);
  }

  if (root.contains("run")) {
    const json& run = root.at("run");
    if (!run.is_object())
      throw std::invalid_argument("config: 'run' must be an object");
    detail::reject_unknown_keys(
        run, "run.",
        {"iterations", "seed", "rolling_window", "convergence_fraction",
         "tracked_state", "tracked_action"});
    rc.iterations = get_u64(run, "run.", "iterations", rc.iterations);
    rc.seed = get_u64(run, "run.", "seed", rc.seed);
    rc.rolling_window = static_cast<std::size_t>(
        get_u64(run, "run.", "rolling_window", rc.rolling_window));
    rc.convergence_fraction = get_double(run, "run.", "convergence_fraction",
                                         rc.convergence_fraction);
    const bool has_state = run.contains("tracked_state");
    const bool has_action = run.contains("tracked_action");
    if (has_state != has_action)
      throw std::invalid_argument(
          "config: 'run.tracked_state' and 'run.tracked_action' must be "
          "given together");
    if (has_state)
      rc.tracked_cell = {static_cast<std::size_t>(
                             get_u64(run, "run.", "tracked_state", 0)),
                         static_cast<std::size_t>(
                             get_u64(run, "run.", "tracked_action", 0))};
  }

  config.replications = static_cast<std::size_t>(
      get_u64(root, "", "replications", config.replications));

  if (root.contains("histogram")) {
    const json& hist = root.at("histogram");
    if (!hist.is_object())
      throw std::invalid_argument("config: 'histogram' must be an object");
    detail::reject_unknown_keys(
        hist, "histogram.", {"policy", "action_index", "state_index", "samples"});
    const std::string policy =
        get_string(hist, "histogram.", "policy", "uniform");
    if (policy == "uniform")
      config.histogram.policy.kind = ActionPolicy::Kind::uniform;
    else if (policy == "fixed")
      config.histogram.policy.kind = ActionPolicy::Kind::fixed;
    else
      throw std::invalid_argument(
          "config: 'histogram.policy' must be 'uniform' or 'fixed'");
    config.histogram.policy.fixed_index = static_cast<std::size_t>(
        get_u64(hist, "histogram.", "action_index", 0));
    config.histogram.state_index = static_cast<std::size_t>(
        get_u64(hist, "histogram.", "state_index", 0));
    config.histogram.samples =
        get_u64(hist, "histogram.", "samples", config.histogram.samples);
  }

  if (root.contains("oracle")) {
    const json& oracle = root.at("oracle");
    if (!oracle.is_object())
      throw std::invalid_argument("config: 'oracle' must be an object");
    detail::reject_unknown_keys(oracle, "oracle.", {"mc_samples_per_cell"});
    config.oracle.mc_samples_per_cell =
        get_u64(oracle, "oracle.", "mc_samples_per_cell",
                config.oracle.mc_samples_per_cell);
  }

  config.run_config.validate();  // fail fast on out-of-domain values
  if (config.replications == 0)
    throw std::invalid_argument("config: 'replications' must be >= 1");
  if (config.oracle.mc_samples_per_cell == 0)
    throw std::invalid_argument(
        "config: 'oracle.mc_samples_per_cell' must be >= 1");
  return config;
}

inline FileConfig parse_config_text(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  return parse_config(root);
}

inline FileConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("config: cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// Canonical form: every key present with its effective value; grids keep the
// preset name when one was used.
inline nlohmann::json to_json(const FileConfig& config) {
  using nlohmann::json;
  const RunConfig& rc = config.run_config;
  json env;
  env["base_price"] = rc.env.base_price;
  env["steepness"] = rc.env.steepness;
  env["state_grid"] = config.state_preset ? json(*config.state_preset)
                                          : json(rc.env.state_grid);
  env["action_grid"] = config.action_preset ? json(*config.action_preset)
                                            : json(rc.env.action_grid);
  json agent;
  agent["learning_rate"] = rc.agent.learning_rate;
  agent["explore_prob"] = rc.agent.explore_prob;
  agent["update_mode"] =
      rc.agent.update_mode == UpdateMode::batch ? "batch" : "single";
  agent["batch_size"] = rc.agent.batch_size;
  agent["flush_residual"] = rc.agent.flush_residual;

  json run;
  run["iterations"] = rc.iterations;
  run["seed"] = rc.seed;
  run["rolling_window"] = rc.rolling_window;
  run["convergence_fraction"] = rc.convergence_fraction;
  if (rc.tracked_cell) {
    run["tracked_state"] = rc.tracked_cell->first;
    run["tracked_action"] = rc.tracked_cell->second;
  }

  json histogram;
  histogram["policy"] = config.histogram.policy.kind == ActionPolicy::Kind::fixed
                            ? "fixed"
                            : "uniform";
  histogram["action_index"] = config.histogram.policy.fixed_index;
  histogram["state_index"] = config.histogram.state_index;
  histogram["samples"] = config.histogram.samples;

  json oracle;
  oracle["mc_samples_per_cell"] = config.oracle.mc_samples_per_cell;

  json root;
  root["env"] = env;
  root["agent"] = agent;
  root["run"] = run;
  root["replications"] = config.replications;
  root["histogram"] = histogram;
  root["oracle"] = oracle;
  return root;
}

inline bool operator==(const HistogramSettings& a, const HistogramSettings& b) {
  return a.policy.kind == b.policy.kind &&
         a.policy.fixed_index == b.policy.fixed_index &&
         a.state_index == b.state_index && a.samples == b.samples;
}

inline bool operator==(const OracleSettings& a, const OracleSettings& b) {
  return a.mc_samples_per_cell == b.mc_samples_per_cell;
}

// Equality over the file-visible surface (programmatic RunConfig knobs such
// as store_curve are not part of it).
inline bool operator==(const FileConfig& a, const FileConfig& b) {
  const RunConfig& x = a.run_config;
  const RunConfig& y = b.run_config;
  return x.env.base_price == y.env.base_price &&
         x.env.steepness == y.env.steepness &&
         x.env.state_grid == y.env.state_grid &&
         x.env.action_grid == y.env.action_grid &&
         x.agent.learning_rate == y.agent.learning_rate &&
         x.agent.explore_prob == y.agent.explore_prob &&
         x.agent.update_mode == y.agent.update_mode &&
         x.agent.batch_size == y.agent.batch_size &&
         x.agent.flush_residual == y.agent.flush_residual &&
         x.iterations == y.iterations && x.seed == y.seed &&
         x.rolling_window == y.rolling_window &&
         x.convergence_fraction == y.convergence_fraction &&
         x.tracked_cell == y.tracked_cell &&
         a.state_preset == b.state_preset &&
         a.action_preset == b.action_preset &&
         a.replications == b.replications && a.histogram == b.histogram &&
         a.oracle == b.oracle;
}

}  // namespace pricelab
