#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "zilot/envs.hpp"
#include "zilot/planner.hpp"
#include "zilot/pointmass.hpp"

namespace zilot {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// On-disk environment schema: {name, n_states, n_actions, transitions,
// initial_dist, goal_coords (per state), epsilon, labels?}. The goal set is
// rebuilt by uniquifying the per-state coordinates in first-appearance order.
nlohmann::json env_to_json(const TabularEnv& env, const GoalSpace& gs, const std::string& name);
std::pair<TabularEnv, GoalSpace> env_from_json(const nlohmann::json& j);

struct ResolvedEnv {
  std::string name;
  bool is_pointmass = false;
  TabularEnv env;
  GoalSpace gs;
  PointmassEnv pm;
};

// {"name": "chain"|"maze"|"slippery"|"pointmass", "params": {...}},
// {"file": "env.json"} or an inline tabular env object
ResolvedEnv resolve_env(const nlohmann::json& spec, const std::filesystem::path& base_dir);

struct ResolvedTask {
  std::string name;
  ResolvedEnv env;
  std::vector<std::vector<double>> goal_coords;
  std::vector<int> goal_indices;  // tabular envs
  std::vector<Vec2> pm_goals;     // pointmass
  int horizon = 1;
  int t_max = 1;

  EnvTaskConfig task_config() const { return {horizon, t_max, goal_indices}; }
};

// {"name", "env": {...}, "goals": [[coords]...], "horizon", "t_max"} or
// {"file": "task.json"}
ResolvedTask resolve_task(const nlohmann::json& spec, const std::filesystem::path& base_dir);

struct PlannerSpec {
  enum class Kind { zilot, zilot_h, zilot_cls, zilot_unbalanced, pi_cls, mpc_cls };
  Kind kind = Kind::zilot;
  std::string name;
  PlannerConfig planner;
  double threshold = 1.0;
  bool use_icem = false;
  IcemConfig icem;
  bool set_based = false;
  std::uint64_t seed_offset = 0;  // optional per-planner stream separation

  bool is_baseline() const { return kind == Kind::pi_cls || kind == Kind::mpc_cls; }
};

// {"planner": "zilot"|"zilot+h"|"zilot+cls"|"zilot+unbalanced"|"pi+cls"|
//  "mpc+cls", "horizon", "sinkhorn": {"eta", "iterations", "xi_b"?},
//  "ot_backend": "sinkhorn"|"exact", "threshold"?, "optimizer":
//  {"type": "exhaustive"|"icem", ...}, "seed"?}
PlannerSpec parse_planner(const nlohmann::json& spec);

nlohmann::json load_json_file(const std::filesystem::path& file);

}  // namespace zilot
