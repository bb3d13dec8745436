#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <span>
#include <vector>

#include "zilot/metrics.hpp"
#include "zilot/optimize.hpp"
#include "zilot/ot.hpp"
#include "zilot/pointmass.hpp"
#include "zilot/value.hpp"

namespace zilot {

// Estimated achievement steps t_0..t_M; nondecreasing since d and W are
// nonnegative. Fractional values are compared against integer steps directly.
struct GoalSchedule {
  std::vector<double> times;
};

GoalSchedule estimate_goal_times(const DistanceTable& d, const GoalPairTable& w, int s0,
                                 std::span<const int> goals);

// K = min{j : t_j >= k + h_steps}; M when no such j exists
int select_reachable_goals(const GoalSchedule& schedule, int k, int h_steps);

// H_actual = max(1, min(ceil(t_K - k), H))
int effective_horizon(const GoalSchedule& schedule, int k, int h_steps);

// cost preprocessing: C <- min(1, max(0, C / t_max)); idempotent for t_max >= 1
inline double clamp_cost(double c, double t_max) { return std::min(1.0, std::max(0.0, c / t_max)); }

enum class CostSource { distance, metric };
enum class OtBackend { sinkhorn, exact };

struct PlannerConfig {
  int horizon = 16;
  SinkhornConfig sinkhorn;
  OtBackend backend = OtBackend::sinkhorn;
  CostSource cost_source = CostSource::distance;
  bool unbalanced = false;
  bool cls_filter = false;
  double cls_threshold = 1.0;
  bool early_done = true;
};

// Episode-local planner state: visited states s_0..s_k plus the precomputed
// schedule. history.size() == step + 1.
template <typename State>
struct PlannerState {
  std::vector<State> history;
  int step = 0;
  GoalSchedule schedule;
  PlannerConfig config;
};

struct ObjectiveValue {
  double cost = 0.0;
  bool window_empty = false;
  int window_begin = 0;
  int goal_window_end = 0;
};

// A planning context supplies the pieces of one task the planner touches:
//   State/Action, goal_count(), t_max_cap(), achieve_epsilon(),
//   distance_cost(s, j), metric_cost(s, j), achieved(s, j), goal_pair_time(i, j),
//   rollout_model(s, actions, rng), step_env(s, a, rng), initial_state(rng),
//   phi_coords(s), goal_coord(j), state_index(s)
template <typename Ctx>
GoalSchedule make_goal_schedule(const Ctx& ctx, const typename Ctx::State& s0) {
  GoalSchedule sched;
  const int count = ctx.goal_count();
  sched.times.resize(static_cast<std::size_t>(count));
  sched.times[0] = ctx.distance_cost(s0, 0);
  for (int j = 1; j < count; ++j) {
    sched.times[static_cast<std::size_t>(j)] = sched.times[static_cast<std::size_t>(j - 1)] + ctx.goal_pair_time(j - 1, j);
  }
  return sched;
}

// Ordered classifier pointer over the visited states: the initial state can
// confirm g_0 only; every later state advances the pointer while it fires for
// the next goal. Returns {next unconfirmed goal, history index of the latest
// confirmation}.
template <typename Ctx>
std::pair<int, int> cls_filter_window(const Ctx& ctx, std::span<const typename Ctx::State> history,
                                      double threshold) {
  const int count = ctx.goal_count();
  int next_goal = 0;
  int last_confirm = 0;
  if (!history.empty() && ctx.distance_cost(history[0], 0) <= threshold) next_goal = 1;
  for (std::size_t idx = 1; idx < history.size(); ++idx) {
    bool fired = false;
    while (next_goal < count && ctx.distance_cost(history[idx], next_goal) <= threshold) {
      ++next_goal;
      fired = true;
    }
    if (fired) last_confirm = static_cast<int>(idx);
  }
  return {next_goal, last_confirm};
}

// Occupancy-matching objective: roll out the model, pick the reachable goal
// window, build the clamped cost matrix over history+planned states, solve
// the OT problem with uniform marginals and return <C, T>.
template <typename Ctx>
ObjectiveValue zilot_objective(const Ctx& ctx, std::span<const typename Ctx::State> history,
                               const GoalSchedule& schedule, std::span<const typename Ctx::Action> actions,
                               const PlannerConfig& cfg, Rng rollout_rng) {
  const int k = static_cast<int>(history.size()) - 1;
  const int window_end = select_reachable_goals(schedule, k, cfg.horizon);

  int first_goal = 0;
  int first_state = 0;
  if (cfg.cls_filter) {
    const auto [next_goal, last_confirm] = cls_filter_window(ctx, history, cfg.cls_threshold);
    first_goal = next_goal;
    first_state = last_confirm;
    if (first_goal > window_end) return {0.0, true, first_goal, window_end};
  }

  const auto planned = ctx.rollout_model(history.back(), actions, rollout_rng);

  const int n = (k - first_state + 1) + static_cast<int>(planned.size());
  const int m = window_end - first_goal + 1;
  OtProblem p;
  p.n = n;
  p.m = m;
  p.cost.resize(static_cast<std::size_t>(n) * m);
  const double cap = ctx.t_max_cap();
  const auto fill_row = [&](int row, const typename Ctx::State& s) {
    for (int j = 0; j < m; ++j) {
      const double c = cfg.cost_source == CostSource::distance ? ctx.distance_cost(s, first_goal + j)
                                                               : ctx.metric_cost(s, first_goal + j);
      p.cost[static_cast<std::size_t>(row) * m + j] = clamp_cost(c, cap);
    }
  };
  int row = 0;
  for (int i = first_state; i <= k; ++i) fill_row(row++, history[static_cast<std::size_t>(i)]);
  for (const auto& s : planned) fill_row(row++, s);
  p.a.assign(static_cast<std::size_t>(n), 1.0 / n);
  p.b.assign(static_cast<std::size_t>(m), 1.0 / m);

  TransportPlan plan;
  if (cfg.backend == OtBackend::exact) {
    plan = transport_simplex(p);
  } else if (cfg.unbalanced) {
    SinkhornConfig sc = cfg.sinkhorn;
    if (!sc.xi_b) sc.xi_b = 1.0;
    plan = sinkhorn_unbalanced(p, sc);
  } else {
    plan = sinkhorn(p, cfg.sinkhorn);
  }
  return {plan.cost, false, first_goal, window_end};
}

// Discrete-action optimizer adapter: exhaustive enumeration keeps the
// planner argmin exact on tabular environments, with a shooting fallback
// once the sequence count blows up.
struct DiscreteOptimizer {
  int n_actions = 0;
  long long enumeration_cap = 1000000;
  int shooting_budget = 10000;

  template <typename F>
  auto operator()(F&& objective, int h, Rng rng, const std::vector<int>* /*warm*/) const {
    struct Out {
      std::vector<int> actions;
      double cost;
      bool fallback;
    };
    auto res = exhaustive_optimize([&](std::span<const int> a) { return objective(a); }, n_actions, h, rng,
                                   enumeration_cap, shooting_budget);
    return Out{std::move(res.actions), res.cost, res.shooting_fallback};
  }
};

// iCEM adapter for 2-D continuous actions with receding-horizon warm start.
struct ContinuousOptimizer {
  IcemConfig icem;
  ActionBox box;

  template <typename F>
  auto operator()(F&& objective, int h, Rng rng, const std::vector<Vec2>* warm) const {
    struct Out {
      std::vector<Vec2> actions;
      double cost;
      bool fallback;
    };
    std::vector<double> warm_flat;
    if (warm && !warm->empty()) {
      for (const auto& a : *warm) {
        warm_flat.push_back(a[0]);
        warm_flat.push_back(a[1]);
      }
    }
    auto wrapped = [&](std::span<const double> flat) {
      std::vector<Vec2> acts(flat.size() / 2);
      for (std::size_t t = 0; t < acts.size(); ++t) acts[t] = {flat[2 * t], flat[2 * t + 1]};
      return objective(std::span<const Vec2>(acts));
    };
    auto res = icem_optimize(wrapped, box, icem, h, rng, warm_flat.empty() ? nullptr : &warm_flat);
    Out out{std::vector<Vec2>(static_cast<std::size_t>(h)), res.cost, false};
    for (int t = 0; t < h; ++t) out.actions[static_cast<std::size_t>(t)] = {res.plan[2 * static_cast<std::size_t>(t)], res.plan[2 * static_cast<std::size_t>(t) + 1]};
    return out;
  }
};

template <typename Ctx>
TaskResult assemble_result(const Ctx& ctx, const std::vector<typename Ctx::State>& history,
                           std::vector<StepDiag> diagnostics, std::uint64_t seed, bool early_done,
                           double wall_time) {
  TaskResult result;
  for (const auto& s : history) {
    result.traj_phi.push_back(ctx.phi_coords(s));
    const int idx = ctx.state_index(s);
    if (idx >= 0) result.traj_states.push_back(idx);
  }
  const int count = ctx.goal_count();
  for (int j = 0; j < count; ++j) result.goal_coords.push_back(ctx.goal_coord(j));
  result.epsilon = ctx.achieve_epsilon();
  result.w_min = w_min(result.traj_phi, result.goal_coords);
  result.goal_fraction = goal_fraction(result.traj_phi, result.goal_coords, result.epsilon);
  result.n_steps = static_cast<int>(history.size()) - 1;
  result.early_done = early_done;
  result.diagnostics = std::move(diagnostics);
  result.seed = seed;
  result.wall_time = wall_time;
  return result;
}

// Receding-horizon loop: replan every step, execute the first action, stop at
// t_max or once the whole goal window is in scope and the final goal is hit.
template <typename Ctx, typename Optimizer>
TaskResult zilot_episode(const Ctx& ctx, const PlannerConfig& cfg, int t_max, const Optimizer& optimizer,
                         Rng rng) {
  const auto started = std::chrono::steady_clock::now();
  Rng init_rng = rng.substream(0);
  Rng env_rng = rng.substream(1);

  PlannerState<typename Ctx::State> ps;
  ps.config = cfg;
  ps.history.push_back(ctx.initial_state(init_rng));
  ps.schedule = make_goal_schedule(ctx, ps.history.front());
  const int last_goal = ctx.goal_count() - 1;

  std::vector<StepDiag> diagnostics;
  std::vector<typename Ctx::Action> prev_plan;
  bool early_done = false;
  for (int k = 0; k < t_max; ++k) {
    ps.step = k;
    const int window_end = select_reachable_goals(ps.schedule, k, cfg.horizon);
    if (cfg.early_done && window_end == last_goal && ctx.achieved(ps.history.back(), last_goal)) {
      early_done = true;
      break;
    }
    const int h_actual = effective_horizon(ps.schedule, k, cfg.horizon);
    const Rng plan_rng = rng.substream(2 + 2ull * static_cast<std::uint64_t>(k));
    const auto objective = [&](std::span<const typename Ctx::Action> actions) {
      return zilot_objective(ctx, std::span<const typename Ctx::State>(ps.history), ps.schedule, actions, cfg,
                             plan_rng)
          .cost;
    };
    auto chosen = optimizer(objective, h_actual, rng.substream(3 + 2ull * static_cast<std::uint64_t>(k)),
                            prev_plan.empty() ? nullptr : &prev_plan);

    StepDiag diag;
    diag.k = k;
    diag.goal_window_end = window_end;
    diag.h_actual = h_actual;
    diag.ot_cost = chosen.cost;
    diag.shooting_fallback = chosen.fallback;
    diag.window_empty =
        zilot_objective(ctx, std::span<const typename Ctx::State>(ps.history), ps.schedule,
                        std::span<const typename Ctx::Action>(chosen.actions), cfg, plan_rng)
            .window_empty;
    for (const auto& a : chosen.actions) diag.plan.push_back(ctx.action_repr(a));
    diagnostics.push_back(diag);

    ps.history.push_back(ctx.step_env(ps.history.back(), chosen.actions.front(), env_rng));
    prev_plan = std::move(chosen.actions);
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return assemble_result(ctx, ps.history, std::move(diagnostics), rng.seed(), early_done, wall);
}

// Context for tabular environments; the model may differ from the executed
// dynamics (perturbation wrapper) to exercise model mismatch.
struct TabularPlanContext {
  using State = int;
  using Action = int;

  const TabularEnv* env = nullptr;
  const TabularEnv* model = nullptr;
  const DistanceTable* dist = nullptr;
  const GoalPairTable* pair = nullptr;
  const GoalSpace* gs = nullptr;
  std::vector<int> goals;

  int goal_count() const { return static_cast<int>(goals.size()); }
  double t_max_cap() const { return dist->t_max; }
  double achieve_epsilon() const { return gs->epsilon; }
  double distance_cost(int s, int j) const { return dist->at(s, goals[static_cast<std::size_t>(j)]); }
  double metric_cost(int s, int j) const {
    return gs->metric(gs->state_goal[static_cast<std::size_t>(s)], goals[static_cast<std::size_t>(j)]);
  }
  bool achieved(int s, int j) const { return goal_achieved(*gs, s, goals[static_cast<std::size_t>(j)]); }
  double goal_pair_time(int j1, int j2) const {
    return pair->at(goals[static_cast<std::size_t>(j1)], goals[static_cast<std::size_t>(j2)]);
  }
  std::vector<int> rollout_model(int s, std::span<const int> actions, Rng& rng) const {
    return rollout(*model, s, actions, rng);
  }
  int step_env(int s, int a, Rng& rng) const { return sample_transition(*env, s, a, rng); }
  int initial_state(Rng& rng) const { return sample_initial(*env, rng); }
  std::vector<double> phi_coords(int s) const {
    return gs->goal_coords[static_cast<std::size_t>(gs->state_goal[static_cast<std::size_t>(s)])];
  }
  std::vector<double> goal_coord(int j) const {
    return gs->goal_coords[static_cast<std::size_t>(goals[static_cast<std::size_t>(j)])];
  }
  int state_index(int s) const { return s; }
  std::vector<double> action_repr(int a) const { return {static_cast<double>(a)}; }
};

// Context for the continuous point mass; distances are analytic so no tables
// are involved.
struct PointmassPlanContext {
  using State = Vec2;
  using Action = Vec2;

  const PointmassEnv* env = nullptr;
  std::vector<Vec2> goals;
  double t_max_norm = 1.0;  // T_max used for cost clamping

  int goal_count() const { return static_cast<int>(goals.size()); }
  double t_max_cap() const { return t_max_norm; }
  double achieve_epsilon() const { return env->epsilon; }
  double distance_cost(const Vec2& s, int j) const { return pm_distance(*env, s, goals[static_cast<std::size_t>(j)]); }
  double metric_cost(const Vec2& s, int j) const { return pm_metric(s, goals[static_cast<std::size_t>(j)]); }
  bool achieved(const Vec2& s, int j) const { return pm_metric(s, goals[static_cast<std::size_t>(j)]) < env->epsilon; }
  double goal_pair_time(int j1, int j2) const {
    return pm_distance(*env, goals[static_cast<std::size_t>(j1)], goals[static_cast<std::size_t>(j2)]);
  }
  std::vector<Vec2> rollout_model(const Vec2& s, std::span<const Vec2> actions, Rng&) const {
    return pm_rollout(*env, s, actions);
  }
  Vec2 step_env(const Vec2& s, const Vec2& a, Rng&) const { return pm_step(*env, s, a); }
  Vec2 initial_state(Rng&) const { return env->start; }
  std::vector<double> phi_coords(const Vec2& s) const { return {s[0], s[1]}; }
  std::vector<double> goal_coord(int j) const {
    return {goals[static_cast<std::size_t>(j)][0], goals[static_cast<std::size_t>(j)][1]};
  }
  int state_index(const Vec2&) const { return -1; }
  std::vector<double> action_repr(const Vec2& a) const { return {a[0], a[1]}; }
};

}  // namespace zilot
