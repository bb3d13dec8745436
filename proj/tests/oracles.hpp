#pragma once

#include <deque>
#include <string>
#include <vector>

#include "zilot/mdp.hpp"

namespace zilot::testing {

// BFS shortest-path steps to the achievement set of `goal`, capped at t_max.
// Valid for deterministic environments only.
inline std::vector<double> bfs_hit_distance(const TabularEnv& env, const GoalSpace& gs, int goal, double t_max) {
  std::vector<double> dist(static_cast<std::size_t>(env.n_states), t_max);
  std::deque<int> queue;
  for (int s = 0; s < env.n_states; ++s) {
    if (goal_achieved(gs, s, goal)) {
      dist[static_cast<std::size_t>(s)] = 0.0;
      queue.push_back(s);
    }
  }
  std::vector<std::vector<int>> precursors(static_cast<std::size_t>(env.n_states));
  for (int s = 0; s < env.n_states; ++s) {
    for (int a = 0; a < env.n_actions; ++a) {
      const auto row = env.row(s, a);
      for (int s2 = 0; s2 < env.n_states; ++s2) {
        if (row[static_cast<std::size_t>(s2)] == 1.0) precursors[static_cast<std::size_t>(s2)].push_back(s);
      }
    }
  }
  while (!queue.empty()) {
    const int settled = queue.front();
    queue.pop_front();
    for (int s : precursors[static_cast<std::size_t>(settled)]) {
      if (goal_achieved(gs, s, goal)) continue;
      const double candidate = std::min(t_max, dist[static_cast<std::size_t>(settled)] + 1.0);
      if (candidate < dist[static_cast<std::size_t>(s)]) {
        dist[static_cast<std::size_t>(s)] = candidate;
        queue.push_back(s);
      }
    }
  }
  return dist;
}

inline const std::vector<std::string> kTestMaze{
    "S....",
    ".##..",
    ".#...",
    ".#.#.",
    "...#.",
};

}  // namespace zilot::testing
