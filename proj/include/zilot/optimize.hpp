#pragma once

#include <functional>
#include <span>
#include <vector>

#include "zilot/rng.hpp"

namespace zilot {

// Improved CEM with colored noise, elite reuse and mean smoothing.
struct IcemConfig {
  int num_iterations = 4;
  int population_size = 512;
  double elite_ratio = 0.01;
  double population_decay_factor = 1.0;
  double colored_noise_exponent = 2.0;
  double keep_elite_frac = 1.0;
  double alpha = 0.1;
  int horizon = 16;
};

struct ActionBox {
  std::vector<double> lo;  // per action dimension
  std::vector<double> hi;
};

// length-h sequence of unit-variance noise with power spectrum ~ f^-beta
std::vector<double> colored_noise(double beta, int h, Rng& rng);

struct IcemResult {
  std::vector<double> plan;  // flattened [t][dim]
  double cost = 0.0;
  std::vector<double> best_per_iteration;
};

// objective takes a flattened [t][dim] plan of length h * dim
IcemResult icem_optimize(const std::function<double(std::span<const double>)>& objective, const ActionBox& box,
                         const IcemConfig& cfg, int h, Rng rng,
                         const std::vector<double>* shift_init = nullptr);

struct ExhaustiveResult {
  std::vector<int> actions;
  double cost = 0.0;
  bool shooting_fallback = false;
};

// exact argmin over all n_actions^h sequences (lexicographic tie-break); falls
// back to random shooting with `shooting_budget` samples past `enumeration_cap`
ExhaustiveResult exhaustive_optimize(const std::function<double(std::span<const int>)>& objective, int n_actions,
                                     int h, Rng rng, long long enumeration_cap = 1000000,
                                     int shooting_budget = 10000);

}  // namespace zilot
