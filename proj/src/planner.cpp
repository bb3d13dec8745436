#include "zilot/planner.hpp"

#include <stdexcept>

namespace zilot {

GoalSchedule estimate_goal_times(const DistanceTable& d, const GoalPairTable& w, int s0,
                                 std::span<const int> goals) {
  if (goals.empty()) throw std::invalid_argument("estimate_goal_times: empty goal sequence");
  GoalSchedule sched;
  sched.times.resize(goals.size());
  sched.times[0] = d.at(s0, goals[0]);
  for (std::size_t j = 1; j < goals.size(); ++j) {
    sched.times[j] = sched.times[j - 1] + w.at(goals[j - 1], goals[j]);
  }
  return sched;
}

int select_reachable_goals(const GoalSchedule& schedule, int k, int h_steps) {
  if (schedule.times.empty()) throw std::invalid_argument("select_reachable_goals: empty schedule");
  const double horizon_end = static_cast<double>(k) + h_steps;
  const auto it = std::lower_bound(schedule.times.begin(), schedule.times.end(), horizon_end);
  if (it == schedule.times.end()) return static_cast<int>(schedule.times.size()) - 1;
  return static_cast<int>(it - schedule.times.begin());
}

int effective_horizon(const GoalSchedule& schedule, int k, int h_steps) {
  const int K = select_reachable_goals(schedule, k, h_steps);
  const double remaining = schedule.times[static_cast<std::size_t>(K)] - k;
  const int ceil_remaining = static_cast<int>(std::ceil(remaining));
  return std::max(1, std::min(ceil_remaining, h_steps));
}

}  // namespace zilot
