#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "zilot/envs.hpp"
#include "zilot/pointmass.hpp"
#include "zilot/value.hpp"

using namespace zilot;
using zilot::testing::bfs_hit_distance;

TEST_CASE("chain transitions match the four-state fixture row for row") {
  const double p = 0.37;
  const auto built = build_chain(p);
  const auto& env = built.env;
  // (0,0): a0 -> (1,0); a1 -> (0,0) w.p. p else (1,1)
  CHECK(env.prob(0, 0, 1) == 1.0);
  CHECK(env.prob(0, 1, 0) == p);
  CHECK(env.prob(0, 1, 2) == doctest::Approx(1.0 - p));
  // (1,0) self-loops, (1,1) -> (2,1), (2,1) self-loops; a1 aliases a0
  for (int a = 0; a < 2; ++a) {
    CHECK(env.prob(1, a, 1) == 1.0);
    CHECK(env.prob(2, a, 3) == 1.0);
    CHECK(env.prob(3, a, 3) == 1.0);
  }
  CHECK(built.gs.state_goal == std::vector<int>{0, 1, 1, 2});
  CHECK(built.gs.epsilon == 0.5);
  CHECK_THROWS_AS(build_chain(1.0), std::invalid_argument);
}

TEST_CASE("maze: shortest paths, blocked moves, start validation") {
  const std::vector<std::string> open3{"...", "...", "..."};
  const auto built = build_maze(open3);
  const double t_max = 30;
  const auto d = compute_first_hit_distance(built.env, built.gs, t_max);
  const int corner = maze_cell_index(open3, 0, 0);
  const int opposite = maze_cell_index(open3, 2, 2);
  CHECK(d.at(corner, built.gs.state_goal[static_cast<std::size_t>(opposite)]) == doctest::Approx(4.0));

  // moving into a wall (here: the boundary) keeps the agent in place
  Rng rng(1);
  CHECK(sample_transition(built.env, corner, 2, rng) == corner);  // left from x=0
  CHECK(sample_transition(built.env, corner, 4, rng) == corner);  // stay

  CHECK_THROWS_AS(build_maze({"S#", "##"}, std::pair<int, int>{1, 1}), std::invalid_argument);
}

TEST_CASE("slippery: gentle pushes move the puck one cell") {
  SlipperySpec spec;
  spec.width = 6;
  spec.height = 4;
  spec.band_lo = 0;
  spec.band_hi = 3;
  spec.friction = 1;
  spec.agent_x = 0;
  spec.agent_y = 1;
  spec.puck_x = 1;
  spec.puck_y = 1;
  const auto built = build_slippery(spec);
  Rng rng(1);
  const int s0 = slippery_state_index(spec, 0, 1, 1, 1);
  const int pushed = sample_transition(built.env, s0, 0, rng);  // push right
  CHECK(pushed == slippery_state_index(spec, 1, 1, 2, 1));
}

TEST_CASE("slippery: a hard push past the band strands the puck") {
  SlipperySpec spec;
  spec.width = 6;
  spec.height = 4;
  spec.band_lo = 0;
  spec.band_hi = 3;
  spec.friction = 2;
  spec.agent_x = 1;
  spec.agent_y = 1;
  spec.puck_x = 2;
  spec.puck_y = 1;
  const auto built = build_slippery(spec);
  Rng rng(1);
  const int s0 = slippery_state_index(spec, 1, 1, 2, 1);
  const int pushed = sample_transition(built.env, s0, 0, rng);
  CHECK(pushed == slippery_state_index(spec, 2, 1, 4, 1));  // puck slid out of the band

  const double t_max = 40;
  const auto d = compute_first_hit_distance(built.env, built.gs, t_max);
  for (int gx = spec.band_lo; gx <= spec.band_hi; ++gx) {
    for (int gy = 0; gy < spec.height; ++gy) {
      CHECK(d.at(pushed, slippery_goal_index(spec, gx, gy)) == doctest::Approx(t_max));
    }
  }
}

TEST_CASE("slippery: finite-distance set equals product-space BFS reachability") {
  SlipperySpec spec;
  spec.width = 5;
  spec.height = 3;
  spec.band_lo = 0;
  spec.band_hi = 2;
  spec.friction = 2;
  spec.agent_x = 0;
  spec.agent_y = 0;
  spec.puck_x = 1;
  spec.puck_y = 1;
  const auto built = build_slippery(spec);
  const double t_max = 60;
  const auto d = compute_first_hit_distance(built.env, built.gs, t_max);
  for (int g = 0; g < built.gs.goal_count(); ++g) {
    const auto oracle = bfs_hit_distance(built.env, built.gs, g, t_max);
    for (int s = 0; s < built.env.n_states; ++s) {
      CHECK((d.at(s, g) < t_max) == (oracle[static_cast<std::size_t>(s)] < t_max));
      CHECK(d.at(s, g) == doctest::Approx(oracle[static_cast<std::size_t>(s)]));
    }
  }
}

TEST_CASE("slippery: spec validation") {
  SlipperySpec bad;
  bad.band_lo = 0;
  bad.band_hi = bad.width - 1;  // whole grid: not a strict subset
  CHECK_THROWS_AS(build_slippery(bad), std::invalid_argument);

  SlipperySpec outside;
  outside.agent_x = outside.band_hi + 1;
  CHECK_THROWS_AS(build_slippery(outside), std::invalid_argument);
}

TEST_CASE("pointmass: step, distance arithmetic, exact triangle inequality") {
  PointmassEnv env;
  env.lo = {0.0, 0.0};
  env.hi = {1.0, 1.0};
  env.dt = 0.25;
  env.v_max = 1.0;
  env.epsilon = 0.05;
  env.validate();

  CHECK(pm_distance(env, {0.0, 0.0}, {1.0, 0.0}) == doctest::Approx(4.0));
  const Vec2 s{0.3, 0.4};
  const Vec2 unchanged = pm_step(env, s, {0.0, 0.0});
  CHECK(unchanged[0] == s[0]);
  CHECK(unchanged[1] == s[1]);

  // velocity is norm-clipped to v_max
  const Vec2 fast = pm_step(env, {0.0, 0.0}, {30.0, 40.0});
  CHECK(std::sqrt(fast[0] * fast[0] + fast[1] * fast[1]) == doctest::Approx(env.dt * env.v_max));

  Rng rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec2 a{rng.next_double(), rng.next_double()};
    const Vec2 b{rng.next_double(), rng.next_double()};
    const Vec2 c{rng.next_double(), rng.next_double()};
    CHECK(pm_distance(env, a, c) <= pm_distance(env, a, b) + pm_distance(env, b, c));
  }
}
