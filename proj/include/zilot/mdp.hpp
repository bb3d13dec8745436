#pragma once

#include <span>
#include <string>
#include <vector>

#include "zilot/rng.hpp"

namespace zilot {

// Controllable Markov chain: states/actions are dense indices, transitions a
// row-stochastic tensor [state][action] -> distribution over next states.
struct TabularEnv {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> transitions;   // flattened [s][a][s']
  std::vector<double> initial_dist;  // length n_states
  std::vector<std::string> labels;   // optional, empty or length n_states

  std::span<const double> row(int s, int a) const;
  double prob(int s, int a, int s_next) const;

  // throws std::invalid_argument if any row or initial_dist is not a
  // probability distribution (tolerance 1e-12)
  void validate() const;
};

// Goal abstraction: phi maps every state to a goal index; each goal carries a
// coordinate vector and the metric h is Euclidean on those coordinates.
struct GoalSpace {
  std::vector<int> state_goal;                   // phi, length n_states
  std::vector<std::vector<double>> goal_coords;  // per goal
  double epsilon = 0.5;

  int goal_count() const { return static_cast<int>(goal_coords.size()); }
  double metric(int g1, int g2) const;
  void validate(int n_states) const;
};

struct EnvTaskConfig {
  int horizon = 1;
  int t_max = 1;
  std::vector<int> goals;  // ordered goal indices g_0..g_M

  void validate() const;  // 1 <= horizon <= t_max, goals nonempty
};

// h(phi(s), g) < epsilon, strict
bool goal_achieved(const GoalSpace& gs, int state, int goal);

int sample_transition(const TabularEnv& env, int s, int a, Rng& rng);
int sample_initial(const TabularEnv& env, Rng& rng);

// s_1..s_L for L = actions.size(); empty actions give an empty sequence
std::vector<int> rollout(const TabularEnv& env, int s0, std::span<const int> actions, Rng& rng);

// model-mismatch wrapper: every transition row mixed with the uniform
// distribution at rate lambda_noise
TabularEnv perturb_uniform(const TabularEnv& env, double lambda_noise);

}  // namespace zilot
