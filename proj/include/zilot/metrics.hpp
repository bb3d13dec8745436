#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zilot/mdp.hpp"

namespace zilot {

struct StepDiag {
  int k = 0;
  int goal_window_end = 0;  // K, index of the last goal in the OT window
  int h_actual = 0;
  double ot_cost = 0.0;
  bool window_empty = false;
  bool shooting_fallback = false;
  std::vector<std::vector<double>> plan;  // chosen action sequence
};

// One episode: realized trajectory (as phi-images), task goals and metrics.
struct TaskResult {
  std::vector<int> traj_states;  // tabular state indices; empty for continuous envs
  std::vector<std::vector<double>> traj_phi;
  std::vector<std::vector<double>> goal_coords;
  double epsilon = 0.0;
  double w_min = 0.0;
  double goal_fraction = 0.0;
  int n_steps = 0;
  bool early_done = false;
  std::vector<StepDiag> diagnostics;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
};

double coord_metric(std::span<const double> a, std::span<const double> b);

// min over trajectory prefixes of the exact W1 (transport simplex, Euclidean
// cost) between the prefix's uniform empirical measure and the uniform goal
// measure
double w_min(const std::vector<std::vector<double>>& traj_phi, const std::vector<std::vector<double>>& goals);

// fraction of goals achieved in the given order (forward pointer scan)
double goal_fraction(const std::vector<std::vector<double>>& traj_phi, const std::vector<std::vector<double>>& goals,
                     double epsilon);

// tabular convenience overloads
double w_min(std::span<const int> traj, std::span<const int> goals, const GoalSpace& gs);
double goal_fraction(std::span<const int> traj, std::span<const int> goals, const GoalSpace& gs);

}  // namespace zilot
