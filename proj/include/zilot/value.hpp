#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zilot/mdp.hpp"

namespace zilot {

// Exact expected first-hit times d(s,g) = -V*(s,g), clamped to [0, t_max].
// d(s,g) = 0 iff the goal is achieved in s.
struct DistanceTable {
  int n_states = 0;
  int n_goals = 0;
  double t_max = 0.0;
  std::vector<double> values;  // [s][g]

  double at(int s, int g) const { return values[static_cast<std::size_t>(s) * n_goals + g]; }
};

// W(g, g'): mean over the pre-image of g of d(s, g'); t_max when the pre-image
// is empty.
struct GoalPairTable {
  int n_goals = 0;
  double t_max = 0.0;
  std::vector<double> values;  // [g][g']

  double at(int g, int g2) const { return values[static_cast<std::size_t>(g) * n_goals + g2]; }
};

struct PolicyTable {
  int n_states = 0;
  int n_goals = 0;
  std::vector<int> actions;  // [s][g]

  int at(int s, int g) const { return actions[static_cast<std::size_t>(s) * n_goals + g]; }
};

using SweepObserver = std::function<void(int sweep, std::span<const double> values)>;

// Value iteration for one goal; iterates until the sup-norm change drops below
// 1e-10 or 10 * t_max sweeps ran. Values start at 0 so iterates are pointwise
// nondecreasing.
std::vector<double> first_hit_distance_goal(const TabularEnv& env, const GoalSpace& gs, int goal, double t_max,
                                            const SweepObserver& observer = nullptr);

// Per-goal value iterations run in parallel (OpenMP when available).
DistanceTable compute_first_hit_distance(const TabularEnv& env, const GoalSpace& gs, double t_max);

namespace serial {
// Plain single-threaded reference; must agree bitwise with the parallel kernel.
DistanceTable compute_first_hit_distance(const TabularEnv& env, const GoalSpace& gs, double t_max);
}  // namespace serial

GoalPairTable compute_goal_pair_times(const DistanceTable& d, const GoalSpace& gs);

// pi*(s,g) = argmin_a E[d(s',g)], ties broken by lowest action index
PolicyTable greedy_goal_policy(const TabularEnv& env, const DistanceTable& d);

// Cache keyed by (env hash, epsilon, t_max); load returns nothing on key
// mismatch or missing file.
std::uint64_t env_hash(const TabularEnv& env, const GoalSpace& gs);
void save_tables(const std::filesystem::path& file, std::uint64_t key, double epsilon, const DistanceTable& d,
                 const GoalPairTable& w);
std::optional<std::pair<DistanceTable, GoalPairTable>> load_tables(const std::filesystem::path& file,
                                                                   std::uint64_t key, double epsilon, double t_max);

}  // namespace zilot
