#include "zilot/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace zilot {

namespace {

void check_distribution(std::span<const double> p, const std::string& what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument(what + ": negative or NaN entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument(what + ": mass " + std::to_string(sum) + " != 1");
  }
}

}  // namespace

std::span<const double> TabularEnv::row(int s, int a) const {
  if (s < 0 || s >= n_states || a < 0 || a >= n_actions) {
    throw std::out_of_range("TabularEnv::row: state/action index out of range");
  }
  return {transitions.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states,
          static_cast<std::size_t>(n_states)};
}

double TabularEnv::prob(int s, int a, int s_next) const {
  auto r = row(s, a);
  if (s_next < 0 || s_next >= n_states) throw std::out_of_range("TabularEnv::prob: bad next state");
  return r[static_cast<std::size_t>(s_next)];
}

void TabularEnv::validate() const {
  if (n_states <= 0 || n_actions <= 0) throw std::invalid_argument("TabularEnv: empty state or action space");
  if (transitions.size() != static_cast<std::size_t>(n_states) * n_actions * n_states) {
    throw std::invalid_argument("TabularEnv: transition tensor has wrong size");
  }
  if (initial_dist.size() != static_cast<std::size_t>(n_states)) {
    throw std::invalid_argument("TabularEnv: initial_dist has wrong size");
  }
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(n_states)) {
    throw std::invalid_argument("TabularEnv: labels have wrong size");
  }
  for (int s = 0; s < n_states; ++s) {
    for (int a = 0; a < n_actions; ++a) {
      check_distribution(row(s, a), "transitions[" + std::to_string(s) + "][" + std::to_string(a) + "]");
    }
  }
  check_distribution(initial_dist, "initial_dist");
}

double GoalSpace::metric(int g1, int g2) const {
  const auto& c1 = goal_coords.at(static_cast<std::size_t>(g1));
  const auto& c2 = goal_coords.at(static_cast<std::size_t>(g2));
  double acc = 0.0;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    const double d = c1[i] - c2[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

void GoalSpace::validate(int n_states) const {
  if (state_goal.size() != static_cast<std::size_t>(n_states)) {
    throw std::invalid_argument("GoalSpace: abstraction must be total over states");
  }
  if (epsilon <= 0.0) throw std::invalid_argument("GoalSpace: epsilon must be positive");
  const int g_count = goal_count();
  if (g_count == 0) throw std::invalid_argument("GoalSpace: no goals");
  const std::size_t dim = goal_coords.front().size();
  for (const auto& c : goal_coords) {
    if (c.size() != dim) throw std::invalid_argument("GoalSpace: inconsistent coordinate dimension");
  }
  for (int g : state_goal) {
    if (g < 0 || g >= g_count) throw std::invalid_argument("GoalSpace: abstraction maps outside goal set");
  }
}

void EnvTaskConfig::validate() const {
  if (horizon < 1 || horizon > t_max) throw std::invalid_argument("EnvTaskConfig: need 1 <= horizon <= t_max");
  if (goals.empty()) throw std::invalid_argument("EnvTaskConfig: goal sequence is empty");
}

bool goal_achieved(const GoalSpace& gs, int state, int goal) {
  if (state < 0 || state >= static_cast<int>(gs.state_goal.size())) {
    throw std::out_of_range("goal_achieved: state index out of range");
  }
  if (goal < 0 || goal >= gs.goal_count()) throw std::out_of_range("goal_achieved: goal index out of range");
  return gs.metric(gs.state_goal[static_cast<std::size_t>(state)], goal) < gs.epsilon;
}

namespace {

int sample_categorical(std::span<const double> p, Rng& rng) {
  const double u = rng.next_double();
  double acc = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    if (p[static_cast<std::size_t>(i)] > 0.0) last_positive = i;
    acc += p[static_cast<std::size_t>(i)];
    if (u < acc) return i;
  }
  return last_positive;  // guards against fp round-off in the cumulative sum
}

}  // namespace

int sample_transition(const TabularEnv& env, int s, int a, Rng& rng) {
  return sample_categorical(env.row(s, a), rng);
}

int sample_initial(const TabularEnv& env, Rng& rng) {
  return sample_categorical({env.initial_dist.data(), env.initial_dist.size()}, rng);
}

std::vector<int> rollout(const TabularEnv& env, int s0, std::span<const int> actions, Rng& rng) {
  std::vector<int> states;
  states.reserve(actions.size());
  int s = s0;
  for (int a : actions) {
    s = sample_transition(env, s, a, rng);
    states.push_back(s);
  }
  return states;
}

TabularEnv perturb_uniform(const TabularEnv& env, double lambda_noise) {
  if (lambda_noise < 0.0 || lambda_noise > 1.0) {
    throw std::invalid_argument("perturb_uniform: lambda_noise must be in [0,1]");
  }
  TabularEnv out = env;
  const double u = 1.0 / env.n_states;
  for (double& v : out.transitions) v = (1.0 - lambda_noise) * v + lambda_noise * u;
  return out;
}

}  // namespace zilot
