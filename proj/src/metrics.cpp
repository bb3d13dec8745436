#include "zilot/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "zilot/ot.hpp"

namespace zilot {

double coord_metric(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double w_min(const std::vector<std::vector<double>>& traj_phi, const std::vector<std::vector<double>>& goals) {
  if (traj_phi.empty() || goals.empty()) throw std::invalid_argument("w_min: empty trajectory or goal list");
  const int m = static_cast<int>(goals.size());
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(traj_phi.size()); ++k) {
    OtProblem p;
    p.n = k + 1;
    p.m = m;
    p.cost.resize(static_cast<std::size_t>(p.n) * m);
    for (int i = 0; i <= k; ++i) {
      for (int j = 0; j < m; ++j) {
        p.cost[static_cast<std::size_t>(i) * m + j] =
            coord_metric(traj_phi[static_cast<std::size_t>(i)], goals[static_cast<std::size_t>(j)]);
      }
    }
    p.a.assign(static_cast<std::size_t>(p.n), 1.0 / p.n);
    p.b.assign(static_cast<std::size_t>(m), 1.0 / m);
    best = std::min(best, transport_simplex(p).cost);
  }
  return best;
}

double goal_fraction(const std::vector<std::vector<double>>& traj_phi, const std::vector<std::vector<double>>& goals,
                     double epsilon) {
  if (traj_phi.empty() || goals.empty()) throw std::invalid_argument("goal_fraction: empty trajectory or goal list");
  const int m = static_cast<int>(goals.size());
  int j = 0;
  for (const auto& phi : traj_phi) {
    while (j < m && coord_metric(phi, goals[static_cast<std::size_t>(j)]) < epsilon) ++j;
    if (j == m) break;
  }
  return static_cast<double>(j) / m;
}

double w_min(std::span<const int> traj, std::span<const int> goals, const GoalSpace& gs) {
  std::vector<std::vector<double>> phi, g;
  for (int s : traj) phi.push_back(gs.goal_coords[static_cast<std::size_t>(gs.state_goal[static_cast<std::size_t>(s)])]);
  for (int goal : goals) g.push_back(gs.goal_coords[static_cast<std::size_t>(goal)]);
  return w_min(phi, g);
}

double goal_fraction(std::span<const int> traj, std::span<const int> goals, const GoalSpace& gs) {
  std::vector<std::vector<double>> phi, g;
  for (int s : traj) phi.push_back(gs.goal_coords[static_cast<std::size_t>(gs.state_goal[static_cast<std::size_t>(s)])]);
  for (int goal : goals) g.push_back(gs.goal_coords[static_cast<std::size_t>(goal)]);
  return goal_fraction(phi, g, gs.epsilon);
}

}  // namespace zilot
