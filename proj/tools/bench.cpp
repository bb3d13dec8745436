#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "zilot/envs.hpp"
#include "zilot/planner.hpp"
#include "zilot/value.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif

  // value iteration over goals: serial reference vs parallel kernel
  {
    zilot::SlipperySpec spec;
    spec.width = 8;
    spec.height = 6;
    spec.band_lo = 0;
    spec.band_hi = 5;
    spec.friction = 2;
    spec.agent_x = 0;
    spec.agent_y = 0;
    spec.puck_x = 1;
    spec.puck_y = 1;
    const auto built = zilot::build_slippery(spec);
    const double t_max = 60;

    auto t0 = Clock::now();
    const auto serial = zilot::serial::compute_first_hit_distance(built.env, built.gs, t_max);
    const double t_serial = seconds_since(t0);

    t0 = Clock::now();
    const auto parallel = zilot::compute_first_hit_distance(built.env, built.gs, t_max);
    const double t_parallel = seconds_since(t0);

    std::printf("value iteration  (%d states x %d goals): serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                built.env.n_states, built.gs.goal_count(), t_serial, t_parallel, t_serial / t_parallel,
                same_bits(serial.values, parallel.values) ? "bit-identical" : "MISMATCH");
  }

  // batched objective evaluation: one planning step, all candidate sequences
  {
    zilot::SlipperySpec spec;
    const auto built = zilot::build_slippery(spec);
    const int t_max = 40;
    const auto dist = zilot::compute_first_hit_distance(built.env, built.gs, t_max);
    const auto pair = zilot::compute_goal_pair_times(dist, built.gs);

    zilot::TabularPlanContext ctx;
    ctx.env = &built.env;
    ctx.model = &built.env;
    ctx.dist = &dist;
    ctx.pair = &pair;
    ctx.gs = &built.gs;
    ctx.goals = {zilot::slippery_goal_index(spec, 3, 1), zilot::slippery_goal_index(spec, 3, 3),
                 zilot::slippery_goal_index(spec, 1, 3)};

    zilot::PlannerConfig cfg;
    cfg.horizon = 6;
    cfg.backend = zilot::OtBackend::exact;
    const std::vector<int> history{zilot::slippery_state_index(spec, spec.agent_x, spec.agent_y, spec.puck_x,
                                                               spec.puck_y)};
    const auto schedule = zilot::make_goal_schedule(ctx, history.front());
    const zilot::Rng plan_rng(7);

    const int h = 6;
    std::vector<std::vector<int>> candidates;
    std::vector<int> seq(h, 0);
    while (true) {
      candidates.push_back(seq);
      int t = h - 1;
      while (t >= 0 && ++seq[static_cast<std::size_t>(t)] == built.env.n_actions) {
        seq[static_cast<std::size_t>(t)] = 0;
        --t;
      }
      if (t < 0) break;
    }

    const auto evaluate = [&](const std::vector<int>& actions) {
      return zilot::zilot_objective(ctx, std::span<const int>(history), schedule,
                                    std::span<const int>(actions), cfg, plan_rng)
          .cost;
    };

    std::vector<double> serial_costs(candidates.size()), parallel_costs(candidates.size());
    auto t0 = Clock::now();
    for (std::size_t c = 0; c < candidates.size(); ++c) serial_costs[c] = evaluate(candidates[c]);
    const double t_serial = seconds_since(t0);

    t0 = Clock::now();
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
      parallel_costs[static_cast<std::size_t>(c)] = evaluate(candidates[static_cast<std::size_t>(c)]);
    }
    const double t_parallel = seconds_since(t0);

    std::printf("objective batch  (%zu candidates, exact OT): serial %.3fs  parallel %.3fs  speedup %.2fx  %s\n",
                candidates.size(), t_serial, t_parallel, t_serial / t_parallel,
                same_bits(serial_costs, parallel_costs) ? "bit-identical" : "MISMATCH");
  }
  return 0;
}
