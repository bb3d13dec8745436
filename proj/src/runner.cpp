#include "zilot/runner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace zilot {

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("run config must be an object");
  RunConfig config;
  if (!j.contains("tasks") || !j.at("tasks").is_array() || j.at("tasks").empty()) {
    throw ConfigError("run config needs a nonempty tasks list");
  }
  for (const auto& t : j.at("tasks")) config.tasks.push_back(resolve_task(t, base_dir));
  if (!j.contains("planners") || !j.at("planners").is_array() || j.at("planners").empty()) {
    throw ConfigError("run config needs a nonempty planners list");
  }
  for (const auto& p : j.at("planners")) config.planners.push_back(parse_planner(p));
  if (!j.contains("seeds") || !j.at("seeds").is_array() || j.at("seeds").empty()) {
    throw ConfigError("run config needs a nonempty seeds list");
  }
  for (const auto& s : j.at("seeds")) config.seeds.push_back(s.get<std::uint64_t>());

  for (const auto& task : config.tasks) {
    for (const auto& planner : config.planners) {
      if (task.env.is_pointmass && planner.is_baseline()) {
        throw ConfigError("planner " + planner.name + " supports tabular environments only");
      }
      if (task.env.is_pointmass && !planner.use_icem) {
        throw ConfigError("task " + task.name + ": continuous actions require the icem optimizer");
      }
      if (!task.env.is_pointmass && planner.use_icem) {
        throw ConfigError("task " + task.name + ": icem requires a continuous action space");
      }
    }
  }
  return config;
}

TaskResult run_cell(const PreparedTask& prepared, const PlannerSpec& planner, std::uint64_t seed) {
  const ResolvedTask& task = *prepared.task;
  Rng rng(seed + planner.seed_offset);
  if (task.env.is_pointmass) {
    PointmassPlanContext ctx;
    ctx.env = &task.env.pm;
    ctx.goals = task.pm_goals;
    ctx.t_max_norm = task.t_max;
    ContinuousOptimizer opt;
    opt.icem = planner.icem;
    opt.box.lo = {-task.env.pm.v_max, -task.env.pm.v_max};
    opt.box.hi = {task.env.pm.v_max, task.env.pm.v_max};
    PlannerConfig cfg = planner.planner;
    return zilot_episode(ctx, cfg, task.t_max, opt, rng);
  }

  const EnvTaskConfig task_cfg = task.task_config();
  if (planner.kind == PlannerSpec::Kind::pi_cls) {
    GoalClassifier classifier{planner.threshold, prepared.dist.get()};
    BaselineOptions opt{planner.planner.horizon, planner.set_based};
    return pi_cls_episode(task.env.env, *prepared.dist, task.env.gs, task_cfg, classifier, rng, opt);
  }
  if (planner.kind == PlannerSpec::Kind::mpc_cls) {
    GoalClassifier classifier{planner.threshold, prepared.dist.get()};
    BaselineOptions opt{planner.planner.horizon, planner.set_based};
    return mpc_cls_episode(task.env.env, task.env.env, *prepared.dist, task.env.gs, task_cfg, classifier, rng,
                           opt);
  }

  TabularPlanContext ctx;
  ctx.env = &task.env.env;
  ctx.model = &task.env.env;
  ctx.dist = prepared.dist.get();
  ctx.pair = prepared.pair.get();
  ctx.gs = &task.env.gs;
  ctx.goals = task.goal_indices;
  DiscreteOptimizer opt{task.env.env.n_actions};
  return zilot_episode(ctx, planner.planner, task.t_max, opt, rng);
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

nlohmann::json diagnostics_json(const ResolvedTask& task, const PlannerSpec& planner, std::uint64_t seed,
                                const TaskResult& result) {
  nlohmann::json j;
  j["env"] = task.env.name;
  j["task"] = task.name;
  j["planner"] = planner.name;
  j["seed"] = seed;
  j["epsilon"] = result.epsilon;
  j["goals"] = result.goal_coords;
  j["traj_phi"] = result.traj_phi;
  if (!result.traj_states.empty()) j["traj_states"] = result.traj_states;
  j["w_min"] = result.w_min;
  j["goal_fraction"] = result.goal_fraction;
  j["n_steps"] = result.n_steps;
  j["early_done"] = result.early_done;
  auto steps = nlohmann::json::array();
  for (const auto& d : result.diagnostics) {
    steps.push_back({{"k", d.k},
                     {"K", d.goal_window_end},
                     {"h_actual", d.h_actual},
                     {"cost", d.ot_cost},
                     {"window_empty", d.window_empty},
                     {"shooting_fallback", d.shooting_fallback},
                     {"plan", d.plan}});
  }
  j["steps"] = std::move(steps);
  return j;
}

}  // namespace

void run_experiment(const RunConfig& config, const std::filesystem::path& out_dir, int jobs,
                    std::uint64_t seed_base, const std::filesystem::path& cache_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::create_directories(out_dir / "diagnostics");
  if (!cache_dir.empty()) std::filesystem::create_directories(cache_dir);

  // distinct (env, t_max) pairs share value tables
  std::vector<PreparedTask> prepared(config.tasks.size());
  std::map<std::pair<std::uint64_t, int>, std::pair<std::shared_ptr<DistanceTable>, std::shared_ptr<GoalPairTable>>>
      table_cache;
  for (std::size_t i = 0; i < config.tasks.size(); ++i) {
    const ResolvedTask& task = config.tasks[i];
    prepared[i].task = &task;
    if (task.env.is_pointmass) continue;
    const std::uint64_t key = env_hash(task.env.env, task.env.gs);
    const auto cache_key = std::make_pair(key, task.t_max);
    auto it = table_cache.find(cache_key);
    if (it == table_cache.end()) {
      std::shared_ptr<DistanceTable> dist;
      std::shared_ptr<GoalPairTable> pair;
      const auto cache_file =
          cache_dir.empty() ? std::filesystem::path{}
                            : cache_dir / ("tables_" + std::to_string(key) + "_" + std::to_string(task.t_max) + ".json");
      if (!cache_file.empty()) {
        if (auto loaded = load_tables(cache_file, key, task.env.gs.epsilon, task.t_max)) {
          dist = std::make_shared<DistanceTable>(std::move(loaded->first));
          pair = std::make_shared<GoalPairTable>(std::move(loaded->second));
        }
      }
      if (!dist) {
        dist = std::make_shared<DistanceTable>(
            compute_first_hit_distance(task.env.env, task.env.gs, task.t_max));
        pair = std::make_shared<GoalPairTable>(compute_goal_pair_times(*dist, task.env.gs));
        if (!cache_file.empty()) save_tables(cache_file, key, task.env.gs.epsilon, *dist, *pair);
      }
      it = table_cache.emplace(cache_key, std::make_pair(dist, pair)).first;
    }
    prepared[i].dist = it->second.first;
    prepared[i].pair = it->second.second;
  }

  const int n_tasks = static_cast<int>(config.tasks.size());
  const int n_planners = static_cast<int>(config.planners.size());
  const int n_seeds = static_cast<int>(config.seeds.size());
  const int n_cells = n_tasks * n_planners * n_seeds;
  std::vector<TaskResult> results(static_cast<std::size_t>(n_cells));
  std::vector<std::string> errors(static_cast<std::size_t>(n_cells));

#ifdef _OPENMP
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#else
  const int threads = 1;
  (void)jobs;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (int cell = 0; cell < n_cells; ++cell) {
    const int task_i = cell / (n_planners * n_seeds);
    const int planner_i = (cell / n_seeds) % n_planners;
    const int seed_i = cell % n_seeds;
    try {
      results[static_cast<std::size_t>(cell)] =
          run_cell(prepared[static_cast<std::size_t>(task_i)], config.planners[static_cast<std::size_t>(planner_i)],
                   config.seeds[static_cast<std::size_t>(seed_i)] + seed_base);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(cell)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error("experiment cell failed: " + e);
  }

  auto results_json = nlohmann::json::array();
  for (int cell = 0; cell < n_cells; ++cell) {
    const int task_i = cell / (n_planners * n_seeds);
    const int planner_i = (cell / n_seeds) % n_planners;
    const int seed_i = cell % n_seeds;
    const ResolvedTask& task = config.tasks[static_cast<std::size_t>(task_i)];
    const PlannerSpec& planner = config.planners[static_cast<std::size_t>(planner_i)];
    const std::uint64_t seed = config.seeds[static_cast<std::size_t>(seed_i)] + seed_base;
    const TaskResult& result = results[static_cast<std::size_t>(cell)];

    const std::string diag_name =
        sanitize(task.name) + "__" + sanitize(planner.name) + "__" + std::to_string(seed) + ".json";
    {
      std::ofstream out(out_dir / "diagnostics" / diag_name);
      out << diagnostics_json(task, planner, seed, result).dump(2) << "\n";
    }
    results_json.push_back({{"env", task.env.name},
                            {"task", task.name},
                            {"planner", planner.name},
                            {"seed", seed},
                            {"w_min", result.w_min},
                            {"goal_fraction", result.goal_fraction},
                            {"n_steps", result.n_steps},
                            {"diagnostics_path", "diagnostics/" + diag_name}});
  }
  {
    std::ofstream out(out_dir / "results.json");
    out << results_json.dump(2) << "\n";
  }

  std::ofstream csv(out_dir / "summary.csv");
  csv << "task,planner,w_min_mean,w_min_std,gf_mean,gf_std\n";
  for (int task_i = 0; task_i < n_tasks; ++task_i) {
    for (int planner_i = 0; planner_i < n_planners; ++planner_i) {
      double w_sum = 0.0, g_sum = 0.0;
      for (int seed_i = 0; seed_i < n_seeds; ++seed_i) {
        const auto& r = results[static_cast<std::size_t>((task_i * n_planners + planner_i) * n_seeds + seed_i)];
        w_sum += r.w_min;
        g_sum += r.goal_fraction;
      }
      const double w_mean = w_sum / n_seeds, g_mean = g_sum / n_seeds;
      double w_var = 0.0, g_var = 0.0;
      for (int seed_i = 0; seed_i < n_seeds; ++seed_i) {
        const auto& r = results[static_cast<std::size_t>((task_i * n_planners + planner_i) * n_seeds + seed_i)];
        w_var += (r.w_min - w_mean) * (r.w_min - w_mean);
        g_var += (r.goal_fraction - g_mean) * (r.goal_fraction - g_mean);
      }
      const double w_std = n_seeds > 1 ? std::sqrt(w_var / (n_seeds - 1)) : 0.0;
      const double g_std = n_seeds > 1 ? std::sqrt(g_var / (n_seeds - 1)) : 0.0;
      csv << config.tasks[static_cast<std::size_t>(task_i)].name << ','
          << config.planners[static_cast<std::size_t>(planner_i)].name << ',' << format_double(w_mean) << ','
          << format_double(w_std) << ',' << format_double(g_mean) << ',' << format_double(g_std) << "\n";
    }
  }
}

}  // namespace zilot
