#include "zilot/baselines.hpp"

#include <chrono>
#include <limits>

#include "zilot/optimize.hpp"
#include "zilot/planner.hpp"

namespace zilot {

bool cls(const GoalClassifier& c, int s, int g) { return c.dist->at(s, g) <= c.threshold; }

namespace {

// Pointer over the goal sequence. In the ordered variant each visited state
// can confirm goals only past the ones confirmed by strictly earlier states,
// so the initial state confirms at most g_0.
struct ClsPointer {
  const GoalClassifier* classifier;
  std::span<const int> goals;
  bool set_based;
  int confirmed = -1;

  void init(int s0) {
    if (set_based) {
      advance(s0);
    } else if (cls(*classifier, s0, goals[0])) {
      confirmed = 0;
    }
  }

  void advance(int s) {
    const int last = static_cast<int>(goals.size()) - 1;
    if (set_based) {
      for (int j = confirmed + 1; j <= last; ++j) {
        if (cls(*classifier, s, goals[static_cast<std::size_t>(j)])) confirmed = j;
      }
    } else {
      while (confirmed < last && cls(*classifier, s, goals[static_cast<std::size_t>(confirmed + 1)])) {
        ++confirmed;
      }
    }
  }
};

template <typename LowLevel>
TaskResult hierarchical_episode(const TabularEnv& env, const TabularEnv& model, const DistanceTable& d,
                                const GoalSpace& gs, const EnvTaskConfig& task, const GoalClassifier& classifier,
                                Rng rng, const BaselineOptions& opt, LowLevel&& pick_action) {
  task.validate();
  const auto started = std::chrono::steady_clock::now();
  Rng init_rng = rng.substream(0);
  Rng env_rng = rng.substream(1);

  std::vector<int> history{sample_initial(env, init_rng)};
  ClsPointer pointer{&classifier, task.goals, opt.set_based};
  pointer.init(history.front());

  std::vector<StepDiag> diagnostics;
  bool early_done = false;
  const int last = static_cast<int>(task.goals.size()) - 1;
  for (int k = 0; k < task.t_max; ++k) {
    if (pointer.confirmed == last) {
      early_done = true;
      break;
    }
    const int target = task.goals[static_cast<std::size_t>(pointer.confirmed + 1)];
    const auto [action, cost] = pick_action(history.back(), target, k, rng);
    StepDiag diag;
    diag.k = k;
    diag.goal_window_end = pointer.confirmed + 1;
    diag.h_actual = opt.horizon;
    diag.ot_cost = cost;
    diagnostics.push_back(diag);
    history.push_back(sample_transition(env, history.back(), action, env_rng));
    pointer.advance(history.back());
  }

  TabularPlanContext ctx;
  ctx.env = &env;
  ctx.model = &model;
  ctx.dist = &d;
  ctx.gs = &gs;
  ctx.goals = task.goals;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return assemble_result(ctx, history, std::move(diagnostics), rng.seed(), early_done, wall);
}

}  // namespace

TaskResult pi_cls_episode(const TabularEnv& env, const DistanceTable& d, const GoalSpace& gs,
                          const EnvTaskConfig& task, const GoalClassifier& classifier, Rng rng,
                          const BaselineOptions& opt) {
  const PolicyTable pi = greedy_goal_policy(env, d);
  return hierarchical_episode(env, env, d, gs, task, classifier, rng, opt,
                              [&](int s, int g, int, Rng&) { return std::make_pair(pi.at(s, g), d.at(s, g)); });
}

TaskResult mpc_cls_episode(const TabularEnv& env, const TabularEnv& model, const DistanceTable& d,
                           const GoalSpace& gs, const EnvTaskConfig& task, const GoalClassifier& classifier,
                           Rng rng, const BaselineOptions& opt) {
  return hierarchical_episode(
      env, model, d, gs, task, classifier, rng, opt, [&](int s, int g, int k, Rng& episode_rng) {
        const Rng plan_rng = episode_rng.substream(2 + 2ull * static_cast<std::uint64_t>(k));
        const auto objective = [&](std::span<const int> actions) {
          Rng roll = plan_rng;
          const auto states = rollout(model, s, actions, roll);
          double best = std::numeric_limits<double>::infinity();
          for (std::size_t t = 0; t < states.size(); ++t) {
            best = std::min(best, static_cast<double>(t + 1) + d.at(states[t], g));
          }
          return best;
        };
        const auto res = exhaustive_optimize(objective, env.n_actions, opt.horizon,
                                             episode_rng.substream(3 + 2ull * static_cast<std::uint64_t>(k)));
        return std::make_pair(res.actions.front(), res.cost);
      });
}

}  // namespace zilot
