#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zilot/mdp.hpp"

namespace zilot {

struct BuiltEnv {
  TabularEnv env;
  GoalSpace gs;
  std::string name;
};

// Four-state chain (0,0) -> {(1,0), (1,1)} -> (2,1) with phi(x,y) = x and a
// stochastic self-loop of weight p on the a1 edge at (0,0). a1 aliases a0
// everywhere else so the action space stays uniform.
BuiltEnv build_chain(double p);

// Deterministic gridworld from a wall bitmap ('#' wall, '.' free, 'S' start).
// Actions: right, down, left, up, stay; moves into walls keep the agent in
// place. phi is the identity on free cells, h Euclidean on cell centers.
// An explicit start overrides any 'S' marker; a start inside a wall is a
// validation error.
BuiltEnv build_maze(const std::vector<std::string>& bitmap,
                    std::optional<std::pair<int, int>> start = std::nullopt);

struct SlipperySpec {
  int width = 6;
  int height = 4;
  int band_lo = 0;  // inclusive agent column range, strict subset of columns
  int band_hi = 3;
  int friction = 2;  // cells a pushed puck slides
  int agent_x = 0, agent_y = 0;
  int puck_x = 1, puck_y = 1;
};

// Joint (agent, puck) grid. The agent moves in 4 directions inside its column
// band; walking into the puck launches it `friction` cells (stopping at the
// grid edge). A puck outside the band can no longer be pushed. phi is the puck
// cell, h Euclidean.
BuiltEnv build_slippery(const SlipperySpec& spec);

// state index helpers for the slippery env
int slippery_state_index(const SlipperySpec& spec, int agent_x, int agent_y, int puck_x, int puck_y);
int slippery_goal_index(const SlipperySpec& spec, int puck_x, int puck_y);

int maze_cell_index(const std::vector<std::string>& bitmap, int x, int y);

}  // namespace zilot
