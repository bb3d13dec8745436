#include "doctest.h"
#include "oracles.hpp"
#include "zilot/baselines.hpp"
#include "zilot/envs.hpp"

using namespace zilot;

namespace {

struct TabularSetup {
  BuiltEnv built;
  DistanceTable dist;
  GoalPairTable pair;

  TabularSetup(BuiltEnv b, double t_max) : built(std::move(b)) {
    dist = compute_first_hit_distance(built.env, built.gs, t_max);
    pair = compute_goal_pair_times(dist, built.gs);
  }
};

// first trajectory index achieving each goal in order; -1 when never
std::vector<int> achievement_steps(const TaskResult& result) {
  std::vector<int> steps(result.goal_coords.size(), -1);
  std::size_t j = 0;
  for (std::size_t i = 0; i < result.traj_phi.size(); ++i) {
    while (j < result.goal_coords.size() &&
           coord_metric(result.traj_phi[i], result.goal_coords[j]) < result.epsilon) {
      steps[j++] = static_cast<int>(i);
    }
  }
  return steps;
}

}  // namespace

TEST_CASE("cls thresholds the distance table") {
  TabularSetup chain(build_chain(0.5), 20);
  GoalClassifier c{1.0, &chain.dist};
  CHECK(cls(c, 0, 0));        // d = 0
  CHECK(cls(c, 0, 1));        // d = 1 <= theta
  CHECK_FALSE(cls(c, 0, 2));  // d = 3
  GoalClassifier strict{5.0, &chain.dist};
  CHECK_FALSE(cls(strict, 1, 2));  // d = t_max
}

TEST_CASE("pi+cls is myopic on the chain for every p and threshold") {
  for (const double p : {0.3, 0.5, 0.7}) {
    TabularSetup chain(build_chain(p), 20);
    for (int theta = 1; theta <= 5; ++theta) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        GoalClassifier c{static_cast<double>(theta), &chain.dist};
        const EnvTaskConfig task{3, 20, {0, 1, 2}};
        const auto result = pi_cls_episode(chain.built.env, chain.dist, chain.built.gs, task, c, Rng(seed));
        CHECK(result.goal_fraction == doctest::Approx(2.0 / 3.0));
        REQUIRE(result.traj_states.size() >= 2);
        CHECK(result.traj_states[1] == 1);  // the greedy first move lands in (1,0)
        CHECK(result.n_steps == 20);        // never done, runs to t_max
      }
    }
  }
}

TEST_CASE("mpc+cls is equally myopic on the chain") {
  for (const double p : {0.3, 0.5, 0.7}) {
    TabularSetup chain(build_chain(p), 20);
    GoalClassifier c{1.0, &chain.dist};
    const EnvTaskConfig task{3, 20, {0, 1, 2}};
    const auto result = mpc_cls_episode(chain.built.env, chain.built.env, chain.dist, chain.built.gs, task, c,
                                        Rng(11), BaselineOptions{3, false});
    CHECK(result.goal_fraction == doctest::Approx(2.0 / 3.0));
    CHECK(result.traj_states[1] == 1);
  }
}

TEST_CASE("a task that starts solved succeeds immediately") {
  TabularSetup chain(build_chain(0.5), 20);
  GoalClassifier c{1.0, &chain.dist};
  const EnvTaskConfig task{3, 20, {0}};
  const auto result = pi_cls_episode(chain.built.env, chain.dist, chain.built.gs, task, c, Rng(0));
  CHECK(result.early_done);
  CHECK(result.goal_fraction == 1.0);
  CHECK(result.traj_states.size() == 1);
}

TEST_CASE("corridor waypoints: both baselines walk the shortest path") {
  const std::vector<std::string> corridor{"S....."};
  TabularSetup maze(build_maze(corridor), 30);
  const std::vector<int> goals{maze_cell_index(corridor, 2, 0), maze_cell_index(corridor, 5, 0)};
  const EnvTaskConfig task{3, 30, goals};
  GoalClassifier c{0.5, &maze.dist};  // fires exactly on achievement

  const auto pi = pi_cls_episode(maze.built.env, maze.dist, maze.built.gs, task, c, Rng(1));
  CHECK(pi.goal_fraction == 1.0);
  CHECK(pi.n_steps == 5);

  const auto mpc = mpc_cls_episode(maze.built.env, maze.built.env, maze.dist, maze.built.gs, task, c, Rng(1),
                                   BaselineOptions{3, false});
  CHECK(mpc.traj_states == pi.traj_states);

  const auto one_step = mpc_cls_episode(maze.built.env, maze.built.env, maze.dist, maze.built.gs, task, c,
                                        Rng(1), BaselineOptions{1, false});
  CHECK(one_step.traj_states == pi.traj_states);  // H=1 is greedy one-step lookahead
}

TEST_CASE("mpc+cls reaches each goal at least as fast as pi+cls on deterministic envs") {
  TabularSetup maze(build_maze(zilot::testing::kTestMaze), 60);
  const auto idx = [&](int x, int y) { return maze_cell_index(zilot::testing::kTestMaze, x, y); };
  const std::vector<int> goals{idx(4, 0), idx(4, 4), idx(0, 4)};
  const EnvTaskConfig task{4, 60, goals};
  GoalClassifier c{0.5, &maze.dist};

  const auto pi = pi_cls_episode(maze.built.env, maze.dist, maze.built.gs, task, c, Rng(3));
  const auto mpc = mpc_cls_episode(maze.built.env, maze.built.env, maze.dist, maze.built.gs, task, c, Rng(3),
                                   BaselineOptions{4, false});
  const auto pi_steps = achievement_steps(pi);
  const auto mpc_steps = achievement_steps(mpc);
  REQUIRE(pi.goal_fraction == 1.0);
  REQUIRE(mpc.goal_fraction == 1.0);
  for (std::size_t j = 0; j < goals.size(); ++j) {
    REQUIRE(pi_steps[j] >= 0);
    REQUIRE(mpc_steps[j] >= 0);
    CHECK(mpc_steps[j] <= pi_steps[j]);
  }
}

TEST_CASE("ordered pointer never skips; the set-based variant may") {
  const std::vector<std::string> corridor{"S...."};
  TabularSetup maze(build_maze(corridor), 30);
  const auto idx = [&](int x) { return maze_cell_index(corridor, x, 0); };
  // far goal first: the path to it passes the second goal
  const EnvTaskConfig task{3, 30, {idx(3), idx(1)}};
  GoalClassifier c{0.5, &maze.dist};

  const auto ordered = pi_cls_episode(maze.built.env, maze.dist, maze.built.gs, task, c, Rng(5),
                                      BaselineOptions{3, false});
  CHECK(ordered.goal_fraction == 1.0);  // reaches (3,0), then returns to (1,0)

  const auto skipping = pi_cls_episode(maze.built.env, maze.dist, maze.built.gs, task, c, Rng(5),
                                       BaselineOptions{3, true});
  CHECK(skipping.goal_fraction == 0.0);  // confirms (1,0) in passing and stops early
  CHECK(skipping.n_steps < ordered.n_steps);
}
