#include "zilot/pointmass.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zilot {

void PointmassEnv::validate() const {
  if (!(v_max > 0.0) || !(dt > 0.0)) throw std::invalid_argument("PointmassEnv: dt and v_max must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("PointmassEnv: epsilon must be positive");
  for (int d = 0; d < 2; ++d) {
    if (!(lo[static_cast<std::size_t>(d)] < hi[static_cast<std::size_t>(d)])) {
      throw std::invalid_argument("PointmassEnv: degenerate box");
    }
  }
}

Vec2 pm_step(const PointmassEnv& env, Vec2 s, Vec2 a) {
  const double norm = std::sqrt(a[0] * a[0] + a[1] * a[1]);
  if (norm > env.v_max) {
    const double scale = env.v_max / norm;
    a[0] *= scale;
    a[1] *= scale;
  }
  Vec2 out{s[0] + env.dt * a[0], s[1] + env.dt * a[1]};
  for (int d = 0; d < 2; ++d) {
    out[static_cast<std::size_t>(d)] =
        std::clamp(out[static_cast<std::size_t>(d)], env.lo[static_cast<std::size_t>(d)], env.hi[static_cast<std::size_t>(d)]);
  }
  return out;
}

std::vector<Vec2> pm_rollout(const PointmassEnv& env, Vec2 s0, std::span<const Vec2> actions) {
  std::vector<Vec2> states;
  states.reserve(actions.size());
  Vec2 s = s0;
  for (const Vec2& a : actions) {
    s = pm_step(env, s, a);
    states.push_back(s);
  }
  return states;
}

double pm_metric(Vec2 a, Vec2 b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return std::sqrt(dx * dx + dy * dy);
}

double pm_distance(const PointmassEnv& env, Vec2 s, Vec2 g) {
  return std::ceil(pm_metric(s, g) / (env.v_max * env.dt));
}

}  // namespace zilot
