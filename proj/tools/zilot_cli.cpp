#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "zilot/json_io.hpp"
#include "zilot/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_dir, int jobs, std::uint64_t seed_base,
            const std::string& cache_dir) {
  const auto config_file = std::filesystem::path(config_path);
  const auto j = zilot::load_json_file(config_file);
  const auto config = zilot::parse_run_config(j, config_file.parent_path());
  zilot::run_experiment(config, out_dir, jobs, seed_base,
                        cache_dir.empty() ? std::filesystem::path{} : std::filesystem::path(cache_dir));
  std::cout << "wrote " << (std::filesystem::path(out_dir) / "results.json").string() << "\n";
  return 0;
}

int cmd_metrics(const std::string& trajectory_path) {
  const auto j = zilot::load_json_file(trajectory_path);
  const auto traj = j.at("traj_phi").get<std::vector<std::vector<double>>>();
  const auto goals = j.at("goals").get<std::vector<std::vector<double>>>();
  const double epsilon = j.at("epsilon").get<double>();
  nlohmann::json out;
  out["w_min"] = zilot::w_min(traj, goals);
  out["goal_fraction"] = zilot::goal_fraction(traj, goals, epsilon);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_env_dump(const std::string& name, const std::string& params_str, const std::string& file) {
  nlohmann::json spec;
  if (!file.empty()) {
    spec["file"] = file;
  } else {
    spec["name"] = name;
    if (!params_str.empty()) spec["params"] = nlohmann::json::parse(params_str);
  }
  const auto env = zilot::resolve_env(spec, std::filesystem::current_path());
  if (env.is_pointmass) {
    nlohmann::json out;
    out["name"] = env.name;
    out["lo"] = env.pm.lo;
    out["hi"] = env.pm.hi;
    out["dt"] = env.pm.dt;
    out["v_max"] = env.pm.v_max;
    out["epsilon"] = env.pm.epsilon;
    out["start"] = env.pm.start;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << zilot::env_to_json(env.env, env.gs, env.name).dump(2) << "\n";
  }
  return 0;
}

int cmd_ot_solve(const std::string& input, const std::string& method, double eta, int iterations, double xi_b) {
  const auto j = zilot::load_json_file(input);
  zilot::OtProblem p;
  const auto cost = j.at("cost").get<std::vector<std::vector<double>>>();
  p.n = static_cast<int>(cost.size());
  p.m = p.n > 0 ? static_cast<int>(cost.front().size()) : 0;
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != p.m) throw zilot::ConfigError("ot problem: ragged cost matrix");
    p.cost.insert(p.cost.end(), row.begin(), row.end());
  }
  if (j.contains("a")) {
    p.a = j.at("a").get<std::vector<double>>();
  } else {
    p.a.assign(static_cast<std::size_t>(p.n), p.n > 0 ? 1.0 / p.n : 0.0);
  }
  if (j.contains("b")) {
    p.b = j.at("b").get<std::vector<double>>();
  } else {
    p.b.assign(static_cast<std::size_t>(p.m), p.m > 0 ? 1.0 / p.m : 0.0);
  }

  zilot::TransportPlan plan;
  zilot::SinkhornConfig cfg;
  cfg.eta = eta;
  cfg.iterations = iterations;
  if (method == "simplex") {
    plan = zilot::transport_simplex(p);
  } else if (method == "sinkhorn") {
    plan = zilot::sinkhorn(p, cfg);
  } else if (method == "unbalanced") {
    cfg.xi_b = xi_b;
    plan = zilot::sinkhorn_unbalanced(p, cfg);
  } else {
    throw zilot::ConfigError("unknown method: " + method);
  }

  nlohmann::json out;
  out["cost"] = plan.cost;
  out["marginal_violation"] = plan.marginal_violation;
  if (method == "unbalanced") out["target_kl"] = plan.target_kl;
  auto coupling = nlohmann::json::array();
  for (int i = 0; i < plan.n; ++i) {
    std::vector<double> row(plan.coupling.begin() + static_cast<std::ptrdiff_t>(i) * plan.m,
                            plan.coupling.begin() + static_cast<std::ptrdiff_t>(i + 1) * plan.m);
    coupling.push_back(row);
  }
  out["coupling"] = std::move(coupling);
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occupancy-matching planner toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment matrix");
  std::string run_config, run_out = "out", run_cache;
  int run_jobs = 0;
  std::uint64_t run_seed_base = 0;
  run->add_option("--config", run_config, "run config JSON")->required();
  run->add_option("--out", run_out, "output directory");
  run->add_option("--jobs", run_jobs, "parallel cell evaluations (0 = all cores)");
  run->add_option("--seed-base", run_seed_base, "offset added to every seed");
  run->add_option("--cache", run_cache, "value-table cache directory");

  auto* metrics = app.add_subcommand("metrics", "recompute metrics from a stored trajectory");
  std::string metrics_traj;
  metrics->add_option("--trajectory", metrics_traj, "diagnostics JSON with traj_phi/goals/epsilon")->required();

  auto* env = app.add_subcommand("env", "environment utilities");
  auto* env_dump = env->add_subcommand("dump", "print an environment as JSON");
  std::string env_name = "chain", env_params, env_file;
  env_dump->add_option("--name", env_name, "builtin env name");
  env_dump->add_option("--params", env_params, "builtin env params (JSON)");
  env_dump->add_option("--file", env_file, "load env from file instead");

  auto* ot = app.add_subcommand("ot", "optimal transport utilities");
  auto* ot_solve = ot->add_subcommand("solve", "solve an OT problem from JSON");
  std::string ot_input, ot_method = "simplex";
  double ot_eta = 0.02, ot_xi = 1.0;
  int ot_iterations = 500;
  ot_solve->add_option("--input", ot_input, "problem JSON {cost, a?, b?}")->required();
  ot_solve->add_option("--method", ot_method, "simplex | sinkhorn | unbalanced");
  ot_solve->add_option("--eta", ot_eta, "entropic regularization");
  ot_solve->add_option("--iterations", ot_iterations, "sinkhorn sweeps");
  ot_solve->add_option("--xi-b", ot_xi, "soft target-marginal weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_config, run_out, run_jobs, run_seed_base, run_cache);
    if (metrics->parsed()) return cmd_metrics(metrics_traj);
    if (env->parsed() && env_dump->parsed()) return cmd_env_dump(env_name, env_params, env_file);
    if (ot->parsed() && ot_solve->parsed()) return cmd_ot_solve(ot_input, ot_method, ot_eta, ot_iterations, ot_xi);
    std::cerr << "missing subcommand\n";
    return 2;
  } catch (const zilot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
