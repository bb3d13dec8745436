#pragma once

#include <filesystem>
#include <memory>

#include "zilot/baselines.hpp"
#include "zilot/json_io.hpp"

namespace zilot {

struct RunConfig {
  std::vector<ResolvedTask> tasks;
  std::vector<PlannerSpec> planners;
  std::vector<std::uint64_t> seeds;
};

// {"tasks": [...], "planners": [...], "seeds": [...]}; validates every entry
// before anything runs
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);

// Tables shared between the cells of one task; built once per distinct
// (env, t_max) pair, optionally through a disk cache.
struct PreparedTask {
  const ResolvedTask* task = nullptr;
  std::shared_ptr<DistanceTable> dist;
  std::shared_ptr<GoalPairTable> pair;
};

TaskResult run_cell(const PreparedTask& prepared, const PlannerSpec& planner, std::uint64_t seed);

// Runs tasks x planners x seeds (one episode per cell, jobs-wide), then writes
// out/results.json, out/summary.csv and out/diagnostics/*.json. Output is
// canonical: reruns with the same config are byte-identical.
void run_experiment(const RunConfig& config, const std::filesystem::path& out_dir, int jobs = 0,
                    std::uint64_t seed_base = 0, const std::filesystem::path& cache_dir = {});

}  // namespace zilot
