#include "zilot/json_io.hpp"

#include <cmath>
#include <fstream>

namespace zilot {

nlohmann::json load_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + file.string() + ": " + e.what());
  }
  return j;
}

nlohmann::json env_to_json(const TabularEnv& env, const GoalSpace& gs, const std::string& name) {
  nlohmann::json j;
  j["name"] = name;
  j["n_states"] = env.n_states;
  j["n_actions"] = env.n_actions;
  auto transitions = nlohmann::json::array();
  for (int s = 0; s < env.n_states; ++s) {
    auto per_state = nlohmann::json::array();
    for (int a = 0; a < env.n_actions; ++a) {
      const auto row = env.row(s, a);
      per_state.push_back(std::vector<double>(row.begin(), row.end()));
    }
    transitions.push_back(std::move(per_state));
  }
  j["transitions"] = std::move(transitions);
  j["initial_dist"] = env.initial_dist;
  auto coords = nlohmann::json::array();
  for (int s = 0; s < env.n_states; ++s) {
    coords.push_back(gs.goal_coords[static_cast<std::size_t>(gs.state_goal[static_cast<std::size_t>(s)])]);
  }
  j["goal_coords"] = std::move(coords);
  j["epsilon"] = gs.epsilon;
  if (!env.labels.empty()) j["labels"] = env.labels;
  return j;
}

std::pair<TabularEnv, GoalSpace> env_from_json(const nlohmann::json& j) {
  TabularEnv env;
  GoalSpace gs;
  try {
    env.n_states = j.at("n_states").get<int>();
    env.n_actions = j.at("n_actions").get<int>();
    const auto& transitions = j.at("transitions");
    env.transitions.reserve(static_cast<std::size_t>(env.n_states) * env.n_actions * env.n_states);
    for (const auto& per_state : transitions) {
      for (const auto& row : per_state) {
        for (const auto& v : row) env.transitions.push_back(v.get<double>());
      }
    }
    env.initial_dist = j.at("initial_dist").get<std::vector<double>>();
    if (j.contains("labels")) env.labels = j.at("labels").get<std::vector<std::string>>();

    const auto per_state_coords = j.at("goal_coords").get<std::vector<std::vector<double>>>();
    if (per_state_coords.size() != static_cast<std::size_t>(env.n_states)) {
      throw ConfigError("env json: goal_coords must list one coordinate vector per state");
    }
    for (const auto& c : per_state_coords) {
      int idx = -1;
      for (std::size_t g = 0; g < gs.goal_coords.size(); ++g) {
        if (gs.goal_coords[g] == c) {
          idx = static_cast<int>(g);
          break;
        }
      }
      if (idx < 0) {
        idx = static_cast<int>(gs.goal_coords.size());
        gs.goal_coords.push_back(c);
      }
      gs.state_goal.push_back(idx);
    }
    gs.epsilon = j.at("epsilon").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("env json: ") + e.what());
  }
  env.validate();
  gs.validate(env.n_states);
  return {std::move(env), std::move(gs)};
}

namespace {

std::pair<int, int> get_xy(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + " must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

ResolvedEnv builtin_env(const std::string& name, const nlohmann::json& params) {
  ResolvedEnv out;
  out.name = name;
  if (name == "chain") {
    const auto built = build_chain(params.value("p", 0.5));
    out.env = built.env;
    out.gs = built.gs;
  } else if (name == "maze") {
    if (!params.contains("bitmap")) throw ConfigError("maze env needs a bitmap");
    std::optional<std::pair<int, int>> start;
    if (params.contains("start")) start = get_xy(params.at("start"), "maze start");
    const auto built = build_maze(params.at("bitmap").get<std::vector<std::string>>(), start);
    out.env = built.env;
    out.gs = built.gs;
  } else if (name == "slippery") {
    SlipperySpec spec;
    spec.width = params.value("width", spec.width);
    spec.height = params.value("height", spec.height);
    if (params.contains("band")) {
      const auto [lo, hi] = get_xy(params.at("band"), "slippery band");
      spec.band_lo = lo;
      spec.band_hi = hi;
    }
    spec.friction = params.value("friction", spec.friction);
    if (params.contains("agent")) std::tie(spec.agent_x, spec.agent_y) = get_xy(params.at("agent"), "agent");
    if (params.contains("puck")) std::tie(spec.puck_x, spec.puck_y) = get_xy(params.at("puck"), "puck");
    const auto built = build_slippery(spec);
    out.env = built.env;
    out.gs = built.gs;
  } else if (name == "pointmass") {
    out.is_pointmass = true;
    PointmassEnv pm;
    if (params.contains("lo")) pm.lo = {params.at("lo")[0].get<double>(), params.at("lo")[1].get<double>()};
    if (params.contains("hi")) pm.hi = {params.at("hi")[0].get<double>(), params.at("hi")[1].get<double>()};
    pm.dt = params.value("dt", pm.dt);
    pm.v_max = params.value("v_max", pm.v_max);
    pm.epsilon = params.value("epsilon", pm.epsilon);
    if (params.contains("start")) {
      pm.start = {params.at("start")[0].get<double>(), params.at("start")[1].get<double>()};
    }
    pm.validate();
    out.pm = pm;
  } else {
    throw ConfigError("unknown environment name: " + name);
  }
  return out;
}

}  // namespace

ResolvedEnv resolve_env(const nlohmann::json& spec, const std::filesystem::path& base_dir) {
  if (!spec.is_object()) throw ConfigError("env spec must be an object");
  if (spec.contains("file")) {
    const auto file = base_dir / spec.at("file").get<std::string>();
    const auto j = load_json_file(file);
    ResolvedEnv out;
    out.name = j.value("name", file.stem().string());
    std::tie(out.env, out.gs) = env_from_json(j);
    return out;
  }
  if (spec.contains("n_states")) {
    ResolvedEnv out;
    out.name = spec.value("name", "custom");
    std::tie(out.env, out.gs) = env_from_json(spec);
    return out;
  }
  if (!spec.contains("name")) throw ConfigError("env spec needs a name, a file, or an inline definition");
  return builtin_env(spec.at("name").get<std::string>(), spec.value("params", nlohmann::json::object()));
}

ResolvedTask resolve_task(const nlohmann::json& spec_in, const std::filesystem::path& base_dir) {
  nlohmann::json spec = spec_in;
  if (spec.contains("file")) {
    spec = load_json_file(base_dir / spec.at("file").get<std::string>());
  }
  ResolvedTask task;
  if (!spec.contains("env")) throw ConfigError("task needs an env");
  if (spec.at("env").is_string()) {
    // task-file shorthand: env name and params as sibling keys
    nlohmann::json env_spec;
    env_spec["name"] = spec.at("env");
    if (spec.contains("params")) env_spec["params"] = spec.at("params");
    task.env = resolve_env(env_spec, base_dir);
  } else {
    task.env = resolve_env(spec.at("env"), base_dir);
  }
  task.name = spec.value("name", task.env.name);
  if (!spec.contains("goals") || !spec.at("goals").is_array() || spec.at("goals").empty()) {
    throw ConfigError("task " + task.name + ": goals must be a nonempty list of coordinate vectors");
  }
  task.horizon = spec.value("horizon", 4);
  task.t_max = spec.value("t_max", 50);
  if (task.horizon < 1 || task.horizon > task.t_max) {
    throw ConfigError("task " + task.name + ": need 1 <= horizon <= t_max");
  }
  for (const auto& g : spec.at("goals")) {
    const auto coords = g.get<std::vector<double>>();
    task.goal_coords.push_back(coords);
    if (task.env.is_pointmass) {
      if (coords.size() != 2) throw ConfigError("pointmass goals are 2-D");
      task.pm_goals.push_back({coords[0], coords[1]});
    } else {
      int found = -1;
      for (int j = 0; j < task.env.gs.goal_count(); ++j) {
        const auto& c = task.env.gs.goal_coords[static_cast<std::size_t>(j)];
        if (c.size() != coords.size()) continue;
        double dist2 = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) dist2 += (c[i] - coords[i]) * (c[i] - coords[i]);
        if (dist2 < 1e-18) {
          found = j;
          break;
        }
      }
      if (found < 0) throw ConfigError("task " + task.name + ": goal does not match any abstraction value");
      task.goal_indices.push_back(found);
    }
  }
  return task;
}

PlannerSpec parse_planner(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("planner")) throw ConfigError("planner spec needs a planner name");
  PlannerSpec out;
  const std::string kind = spec.at("planner").get<std::string>();
  if (kind == "zilot") {
    out.kind = PlannerSpec::Kind::zilot;
  } else if (kind == "zilot+h") {
    out.kind = PlannerSpec::Kind::zilot_h;
    out.planner.cost_source = CostSource::metric;
  } else if (kind == "zilot+cls") {
    out.kind = PlannerSpec::Kind::zilot_cls;
    out.planner.cls_filter = true;
  } else if (kind == "zilot+unbalanced") {
    out.kind = PlannerSpec::Kind::zilot_unbalanced;
    out.planner.unbalanced = true;
    out.planner.sinkhorn.xi_b = 1.0;
  } else if (kind == "pi+cls") {
    out.kind = PlannerSpec::Kind::pi_cls;
  } else if (kind == "mpc+cls") {
    out.kind = PlannerSpec::Kind::mpc_cls;
  } else {
    throw ConfigError("unknown planner: " + kind);
  }
  out.name = spec.value("name", kind);
  out.planner.horizon = spec.value("horizon", out.planner.horizon);
  if (spec.contains("sinkhorn")) {
    const auto& sk = spec.at("sinkhorn");
    out.planner.sinkhorn.eta = sk.value("eta", out.planner.sinkhorn.eta);
    out.planner.sinkhorn.iterations = sk.value("iterations", out.planner.sinkhorn.iterations);
    if (sk.contains("xi_b")) out.planner.sinkhorn.xi_b = sk.at("xi_b").get<double>();
  }
  if (spec.contains("ot_backend")) {
    const std::string backend = spec.at("ot_backend").get<std::string>();
    if (backend == "exact") {
      out.planner.backend = OtBackend::exact;
    } else if (backend == "sinkhorn") {
      out.planner.backend = OtBackend::sinkhorn;
    } else {
      throw ConfigError("unknown ot_backend: " + backend);
    }
  }
  out.threshold = spec.value("threshold", out.threshold);
  out.planner.cls_threshold = out.threshold;
  out.set_based = spec.value("set_based", false);
  out.seed_offset = spec.value("seed", 0ull);
  out.planner.early_done = spec.value("early_done", true);
  if (spec.contains("optimizer")) {
    const auto& opt = spec.at("optimizer");
    const std::string type = opt.value("type", "exhaustive");
    if (type == "icem") {
      out.use_icem = true;
      out.icem.num_iterations = opt.value("num_iterations", out.icem.num_iterations);
      out.icem.population_size = opt.value("population_size", out.icem.population_size);
      out.icem.elite_ratio = opt.value("elite_ratio", out.icem.elite_ratio);
      out.icem.population_decay_factor = opt.value("population_decay_factor", out.icem.population_decay_factor);
      out.icem.colored_noise_exponent = opt.value("colored_noise_exponent", out.icem.colored_noise_exponent);
      out.icem.keep_elite_frac = opt.value("keep_elite_frac", out.icem.keep_elite_frac);
      out.icem.alpha = opt.value("alpha", out.icem.alpha);
    } else if (type != "exhaustive") {
      throw ConfigError("unknown optimizer type: " + type);
    }
  }
  return out;
}

}  // namespace zilot
