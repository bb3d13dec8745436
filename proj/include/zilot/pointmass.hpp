#pragma once

#include <array>
#include <span>
#include <vector>

namespace zilot {

using Vec2 = std::array<double, 2>;

// Continuous 2-D point mass in a box: actions are velocities (norm clipped to
// v_max), dynamics s' = clamp(s + dt * a). The analytic first-hit distance
// d(s,g) = ceil(|s-g| / (v_max * dt)) plays the role of the tabular d table.
struct PointmassEnv {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};
  double dt = 0.1;
  double v_max = 1.0;
  double epsilon = 0.05;
  Vec2 start{0.0, 0.0};

  void validate() const;
};

Vec2 pm_step(const PointmassEnv& env, Vec2 s, Vec2 a);
std::vector<Vec2> pm_rollout(const PointmassEnv& env, Vec2 s0, std::span<const Vec2> actions);
double pm_distance(const PointmassEnv& env, Vec2 s, Vec2 g);
double pm_metric(Vec2 a, Vec2 b);

}  // namespace zilot
