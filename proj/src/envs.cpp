#include "zilot/envs.hpp"

#include <array>
#include <map>
#include <stdexcept>
#include <string>

namespace zilot {

BuiltEnv build_chain(double p) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("build_chain: need 0 <= p < 1");
  BuiltEnv b;
  b.name = "chain";
  TabularEnv& env = b.env;
  env.n_states = 4;
  env.n_actions = 2;
  env.transitions.assign(4 * 2 * 4, 0.0);
  env.initial_dist = {1.0, 0.0, 0.0, 0.0};
  env.labels = {"(0,0)", "(1,0)", "(1,1)", "(2,1)"};
  const auto at = [&env](int s, int a, int s2) -> double& {
    return env.transitions[(static_cast<std::size_t>(s) * 2 + a) * 4 + s2];
  };
  // states: 0=(0,0) 1=(1,0) 2=(1,1) 3=(2,1)
  at(0, 0, 1) = 1.0;
  at(0, 1, 0) = p;
  at(0, 1, 2) = 1.0 - p;
  at(1, 0, 1) = 1.0;
  at(1, 1, 1) = 1.0;  // a1 aliased to a0 away from (0,0)
  at(2, 0, 3) = 1.0;
  at(2, 1, 3) = 1.0;
  at(3, 0, 3) = 1.0;
  at(3, 1, 3) = 1.0;
  env.validate();

  GoalSpace& gs = b.gs;
  gs.state_goal = {0, 1, 1, 2};
  gs.goal_coords = {{0.0}, {1.0}, {2.0}};
  gs.epsilon = 0.5;
  gs.validate(env.n_states);
  return b;
}

int maze_cell_index(const std::vector<std::string>& bitmap, int x, int y) {
  int idx = 0;
  for (int row = 0; row < static_cast<int>(bitmap.size()); ++row) {
    for (int col = 0; col < static_cast<int>(bitmap[static_cast<std::size_t>(row)].size()); ++col) {
      const char c = bitmap[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
      if (c == '#') continue;
      if (col == x && row == y) return idx;
      ++idx;
    }
  }
  throw std::invalid_argument("maze_cell_index: (" + std::to_string(x) + "," + std::to_string(y) +
                              ") is a wall or out of bounds");
}

BuiltEnv build_maze(const std::vector<std::string>& bitmap, std::optional<std::pair<int, int>> start) {
  if (bitmap.empty() || bitmap.front().empty()) throw std::invalid_argument("build_maze: empty bitmap");
  const int height = static_cast<int>(bitmap.size());
  const int width = static_cast<int>(bitmap.front().size());
  for (const auto& row : bitmap) {
    if (static_cast<int>(row.size()) != width) throw std::invalid_argument("build_maze: ragged bitmap");
  }
  const auto wall = [&](int x, int y) {
    if (x < 0 || x >= width || y < 0 || y >= height) return true;
    return bitmap[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == '#';
  };

  std::vector<std::pair<int, int>> cells;
  std::optional<std::pair<int, int>> marked;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (wall(x, y)) continue;
      cells.emplace_back(x, y);
      if (bitmap[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] == 'S') marked = {x, y};
    }
  }
  if (cells.empty()) throw std::invalid_argument("build_maze: no free cells");
  const auto start_cell = start ? *start : marked.value_or(cells.front());
  if (wall(start_cell.first, start_cell.second)) {
    throw std::invalid_argument("build_maze: start cell is inside a wall");
  }

  BuiltEnv b;
  b.name = "maze";
  TabularEnv& env = b.env;
  const int n = static_cast<int>(cells.size());
  env.n_states = n;
  env.n_actions = 5;  // right, down, left, up, stay
  env.transitions.assign(static_cast<std::size_t>(n) * 5 * n, 0.0);
  env.initial_dist.assign(static_cast<std::size_t>(n), 0.0);
  env.initial_dist[static_cast<std::size_t>(maze_cell_index(bitmap, start_cell.first, start_cell.second))] = 1.0;

  const int dx[5] = {1, 0, -1, 0, 0};
  const int dy[5] = {0, 1, 0, -1, 0};
  for (int s = 0; s < n; ++s) {
    const auto [x, y] = cells[static_cast<std::size_t>(s)];
    env.labels.push_back("(" + std::to_string(x) + "," + std::to_string(y) + ")");
    for (int a = 0; a < 5; ++a) {
      const int tx = x + dx[a], ty = y + dy[a];
      const int target = wall(tx, ty) ? s : maze_cell_index(bitmap, tx, ty);
      env.transitions[(static_cast<std::size_t>(s) * 5 + a) * n + target] = 1.0;
    }
  }
  env.validate();

  GoalSpace& gs = b.gs;
  gs.state_goal.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    gs.state_goal[static_cast<std::size_t>(s)] = s;  // phi = identity on free cells
    const auto [x, y] = cells[static_cast<std::size_t>(s)];
    gs.goal_coords.push_back({static_cast<double>(x), static_cast<double>(y)});
  }
  gs.epsilon = 0.5;
  gs.validate(n);
  return b;
}

namespace {

struct SlipperyIndex {
  const SlipperySpec& spec;
  std::map<std::array<int, 4>, int> to_index;
  std::vector<std::array<int, 4>> states;

  explicit SlipperyIndex(const SlipperySpec& s) : spec(s) {
    for (int ay = 0; ay < spec.height; ++ay)
      for (int ax = spec.band_lo; ax <= spec.band_hi; ++ax)
        for (int py = 0; py < spec.height; ++py)
          for (int px = 0; px < spec.width; ++px) {
            if (ax == px && ay == py) continue;  // agent and puck never share a cell
            to_index[{ax, ay, px, py}] = static_cast<int>(states.size());
            states.push_back({ax, ay, px, py});
          }
  }
};

}  // namespace

int slippery_state_index(const SlipperySpec& spec, int agent_x, int agent_y, int puck_x, int puck_y) {
  SlipperyIndex idx(spec);
  const auto it = idx.to_index.find({agent_x, agent_y, puck_x, puck_y});
  if (it == idx.to_index.end()) throw std::invalid_argument("slippery_state_index: invalid configuration");
  return it->second;
}

int slippery_goal_index(const SlipperySpec& spec, int puck_x, int puck_y) {
  if (puck_x < 0 || puck_x >= spec.width || puck_y < 0 || puck_y >= spec.height) {
    throw std::invalid_argument("slippery_goal_index: cell out of grid");
  }
  return puck_y * spec.width + puck_x;
}

BuiltEnv build_slippery(const SlipperySpec& spec) {
  if (spec.width < 2 || spec.height < 1) throw std::invalid_argument("build_slippery: grid too small");
  if (spec.band_lo < 0 || spec.band_hi >= spec.width || spec.band_lo > spec.band_hi) {
    throw std::invalid_argument("build_slippery: invalid band");
  }
  if (spec.band_lo == 0 && spec.band_hi == spec.width - 1) {
    throw std::invalid_argument("build_slippery: band must be a strict subset of the columns");
  }
  if (spec.friction < 1) throw std::invalid_argument("build_slippery: friction must be >= 1");
  if (spec.agent_x < spec.band_lo || spec.agent_x > spec.band_hi || spec.agent_y < 0 ||
      spec.agent_y >= spec.height) {
    throw std::invalid_argument("build_slippery: agent start outside band");
  }
  if (spec.puck_x == spec.agent_x && spec.puck_y == spec.agent_y) {
    throw std::invalid_argument("build_slippery: puck on top of agent");
  }

  SlipperyIndex idx(spec);
  const int n = static_cast<int>(idx.states.size());

  BuiltEnv b;
  b.name = "slippery";
  TabularEnv& env = b.env;
  env.n_states = n;
  env.n_actions = 4;  // push/move right, down, left, up
  env.transitions.assign(static_cast<std::size_t>(n) * 4 * n, 0.0);
  env.initial_dist.assign(static_cast<std::size_t>(n), 0.0);
  env.initial_dist[static_cast<std::size_t>(
      idx.to_index.at({spec.agent_x, spec.agent_y, spec.puck_x, spec.puck_y}))] = 1.0;

  const int dx[4] = {1, 0, -1, 0};
  const int dy[4] = {0, 1, 0, -1};
  const auto in_grid = [&](int x, int y) { return x >= 0 && x < spec.width && y >= 0 && y < spec.height; };
  const auto in_band = [&](int x) { return x >= spec.band_lo && x <= spec.band_hi; };

  for (int s = 0; s < n; ++s) {
    const auto [ax, ay, px, py] = idx.states[static_cast<std::size_t>(s)];
    env.labels.push_back("a(" + std::to_string(ax) + "," + std::to_string(ay) + ") p(" + std::to_string(px) +
                         "," + std::to_string(py) + ")");
    for (int a = 0; a < 4; ++a) {
      const int tx = ax + dx[a], ty = ay + dy[a];
      int nax = ax, nay = ay, npx = px, npy = py;
      if (in_grid(tx, ty) && in_band(tx)) {
        if (tx == px && ty == py) {
          // push: puck slides `friction` cells, stopping at the grid edge
          int sx = px, sy = py;
          for (int step = 0; step < spec.friction; ++step) {
            const int cx = sx + dx[a], cy = sy + dy[a];
            if (!in_grid(cx, cy)) break;
            sx = cx;
            sy = cy;
          }
          if (sx != px || sy != py) {
            npx = sx;
            npy = sy;
            nax = tx;
            nay = ty;
          }
        } else {
          nax = tx;
          nay = ty;
        }
      }
      const int target = idx.to_index.at({nax, nay, npx, npy});
      env.transitions[(static_cast<std::size_t>(s) * 4 + a) * n + target] = 1.0;
    }
  }
  env.validate();

  GoalSpace& gs = b.gs;
  gs.state_goal.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    const auto [ax, ay, px, py] = idx.states[static_cast<std::size_t>(s)];
    (void)ax;
    (void)ay;
    gs.state_goal[static_cast<std::size_t>(s)] = py * spec.width + px;
  }
  for (int py = 0; py < spec.height; ++py)
    for (int px = 0; px < spec.width; ++px) gs.goal_coords.push_back({static_cast<double>(px), static_cast<double>(py)});
  gs.epsilon = 0.5;
  gs.validate(n);
  return b;
}

}  // namespace zilot
