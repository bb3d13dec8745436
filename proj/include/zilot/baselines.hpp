#pragma once

#include <span>

#include "zilot/metrics.hpp"
#include "zilot/value.hpp"

namespace zilot {

// Goal classifier by thresholding the value table: C(s,g) = [d(s,g) <= theta].
struct GoalClassifier {
  double threshold = 1.0;
  const DistanceTable* dist = nullptr;
};

bool cls(const GoalClassifier& c, int s, int g);

struct BaselineOptions {
  int horizon = 3;         // MPC lookahead
  bool set_based = false;  // allow out-of-order pointer advancement
};

// Hierarchical baseline: greedy goal-conditioned policy toward the first
// unconfirmed goal; the classifier pointer advances on newly visited states.
TaskResult pi_cls_episode(const TabularEnv& env, const DistanceTable& d, const GoalSpace& gs,
                          const EnvTaskConfig& task, const GoalClassifier& classifier, Rng rng,
                          const BaselineOptions& opt = {});

// Same pointer logic with the low level replaced by zero-order optimization of
// the first-hit surrogate min_t (t + d(s_{k+t}, g)).
TaskResult mpc_cls_episode(const TabularEnv& env, const TabularEnv& model, const DistanceTable& d,
                           const GoalSpace& gs, const EnvTaskConfig& task, const GoalClassifier& classifier,
                           Rng rng, const BaselineOptions& opt = {});

}  // namespace zilot
