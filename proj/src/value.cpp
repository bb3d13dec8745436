#include "zilot/value.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace zilot {

std::vector<double> first_hit_distance_goal(const TabularEnv& env, const GoalSpace& gs, int goal, double t_max,
                                            const SweepObserver& observer) {
  const int n = env.n_states;
  std::vector<char> achieved(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) achieved[static_cast<std::size_t>(s)] = goal_achieved(gs, s, goal) ? 1 : 0;

  // sparse view of the transition tensor; rows hold a handful of entries
  std::vector<int> offsets{0};
  std::vector<std::pair<int, double>> entries;
  offsets.reserve(static_cast<std::size_t>(n) * env.n_actions + 1);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < env.n_actions; ++a) {
      const auto row = env.row(s, a);
      for (int s2 = 0; s2 < n; ++s2) {
        if (row[static_cast<std::size_t>(s2)] > 0.0) entries.emplace_back(s2, row[static_cast<std::size_t>(s2)]);
      }
      offsets.push_back(static_cast<int>(entries.size()));
    }
  }

  std::vector<double> d(static_cast<std::size_t>(n), 0.0), next(static_cast<std::size_t>(n), 0.0);
  const int max_sweeps = static_cast<int>(10.0 * t_max);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double delta = 0.0;
    for (int s = 0; s < n; ++s) {
      if (achieved[static_cast<std::size_t>(s)]) {
        next[static_cast<std::size_t>(s)] = 0.0;
        continue;
      }
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a < env.n_actions; ++a) {
        const int begin = offsets[static_cast<std::size_t>(s) * env.n_actions + a];
        const int end = offsets[static_cast<std::size_t>(s) * env.n_actions + a + 1];
        double q = 1.0;
        for (int e = begin; e < end; ++e) {
          q += entries[static_cast<std::size_t>(e)].second * d[static_cast<std::size_t>(entries[static_cast<std::size_t>(e)].first)];
        }
        best = std::min(best, q);
      }
      best = std::min(best, t_max);
      delta = std::max(delta, std::abs(best - d[static_cast<std::size_t>(s)]));
      next[static_cast<std::size_t>(s)] = best;
    }
    d.swap(next);
    if (observer) observer(sweep, {d.data(), d.size()});
    if (delta < 1e-10) break;
  }
  return d;
}

namespace {

DistanceTable first_hit_table(const TabularEnv& env, const GoalSpace& gs, double t_max, bool parallel) {
  DistanceTable table;
  table.n_states = env.n_states;
  table.n_goals = gs.goal_count();
  table.t_max = t_max;
  table.values.assign(static_cast<std::size_t>(env.n_states) * table.n_goals, 0.0);

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int g = 0; g < table.n_goals; ++g) {
    const auto d = first_hit_distance_goal(env, gs, g, t_max);
    for (int s = 0; s < env.n_states; ++s) {
      table.values[static_cast<std::size_t>(s) * table.n_goals + g] = d[static_cast<std::size_t>(s)];
    }
  }
  return table;
}

}  // namespace

DistanceTable compute_first_hit_distance(const TabularEnv& env, const GoalSpace& gs, double t_max) {
  return first_hit_table(env, gs, t_max, true);
}

namespace serial {
DistanceTable compute_first_hit_distance(const TabularEnv& env, const GoalSpace& gs, double t_max) {
  return first_hit_table(env, gs, t_max, false);
}
}  // namespace serial

GoalPairTable compute_goal_pair_times(const DistanceTable& d, const GoalSpace& gs) {
  GoalPairTable w;
  w.n_goals = gs.goal_count();
  w.t_max = d.t_max;
  w.values.assign(static_cast<std::size_t>(w.n_goals) * w.n_goals, 0.0);
  for (int g = 0; g < w.n_goals; ++g) {
    double count = 0.0;
    std::vector<double> acc(static_cast<std::size_t>(w.n_goals), 0.0);
    for (int s = 0; s < d.n_states; ++s) {
      if (gs.state_goal[static_cast<std::size_t>(s)] != g) continue;
      count += 1.0;
      for (int g2 = 0; g2 < w.n_goals; ++g2) acc[static_cast<std::size_t>(g2)] += d.at(s, g2);
    }
    for (int g2 = 0; g2 < w.n_goals; ++g2) {
      w.values[static_cast<std::size_t>(g) * w.n_goals + g2] =
          count > 0.0 ? acc[static_cast<std::size_t>(g2)] / count : d.t_max;
    }
  }
  return w;
}

PolicyTable greedy_goal_policy(const TabularEnv& env, const DistanceTable& d) {
  PolicyTable pi;
  pi.n_states = env.n_states;
  pi.n_goals = d.n_goals;
  pi.actions.assign(static_cast<std::size_t>(env.n_states) * d.n_goals, 0);
  for (int s = 0; s < env.n_states; ++s) {
    for (int g = 0; g < d.n_goals; ++g) {
      double best = std::numeric_limits<double>::infinity();
      int best_a = 0;
      for (int a = 0; a < env.n_actions; ++a) {
        const auto row = env.row(s, a);
        double q = 0.0;
        for (int s2 = 0; s2 < env.n_states; ++s2) {
          const double pr = row[static_cast<std::size_t>(s2)];
          if (pr > 0.0) q += pr * d.at(s2, g);
        }
        if (q < best - 1e-12) {
          best = q;
          best_a = a;
        }
      }
      pi.actions[static_cast<std::size_t>(s) * d.n_goals + g] = best_a;
    }
  }
  return pi;
}

std::uint64_t env_hash(const TabularEnv& env, const GoalSpace& gs) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 0x100000001b3ull;
  };
  const auto mix_double = [&](double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    mix(bits);
  };
  mix(static_cast<std::uint64_t>(env.n_states));
  mix(static_cast<std::uint64_t>(env.n_actions));
  for (double v : env.transitions) mix_double(v);
  for (double v : env.initial_dist) mix_double(v);
  for (int g : gs.state_goal) mix(static_cast<std::uint64_t>(g));
  for (const auto& c : gs.goal_coords)
    for (double v : c) mix_double(v);
  mix_double(gs.epsilon);
  return h;
}

void save_tables(const std::filesystem::path& file, std::uint64_t key, double epsilon, const DistanceTable& d,
                 const GoalPairTable& w) {
  nlohmann::json j;
  j["key"] = key;
  j["epsilon"] = epsilon;
  j["t_max"] = d.t_max;
  j["n_states"] = d.n_states;
  j["n_goals"] = d.n_goals;
  j["distance"] = d.values;
  j["goal_pair"] = w.values;
  std::ofstream out(file);
  if (!out) throw std::runtime_error("save_tables: cannot open " + file.string());
  out << j.dump();
}

std::optional<std::pair<DistanceTable, GoalPairTable>> load_tables(const std::filesystem::path& file,
                                                                   std::uint64_t key, double epsilon,
                                                                   double t_max) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  if (j.value("key", 0ull) != key || j.value("epsilon", -1.0) != epsilon || j.value("t_max", -1.0) != t_max) {
    return std::nullopt;
  }
  DistanceTable d;
  d.n_states = j.at("n_states").get<int>();
  d.n_goals = j.at("n_goals").get<int>();
  d.t_max = t_max;
  d.values = j.at("distance").get<std::vector<double>>();
  GoalPairTable w;
  w.n_goals = d.n_goals;
  w.t_max = t_max;
  w.values = j.at("goal_pair").get<std::vector<double>>();
  return std::make_pair(std::move(d), std::move(w));
}

}  // namespace zilot
