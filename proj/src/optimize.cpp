#include "zilot/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace zilot {

std::vector<double> colored_noise(double beta, int h, Rng& rng) {
  if (h < 1) throw std::invalid_argument("colored_noise: horizon must be >= 1");
  if (h == 1) return {rng.next_gaussian()};

  const int nf = h / 2;
  const double f_min = 1.0 / h;
  std::vector<double> scale(static_cast<std::size_t>(nf) + 1);
  for (int j = 0; j <= nf; ++j) {
    const double f = std::max(static_cast<double>(j) / h, f_min);
    scale[static_cast<std::size_t>(j)] = std::pow(f, -beta / 2.0);
  }

  // random spectrum, then an explicit inverse transform; variance is uniform
  // in t so a deterministic normalization gives unit-variance samples
  std::vector<double> re(static_cast<std::size_t>(nf) + 1), im(static_cast<std::size_t>(nf) + 1, 0.0);
  double var = 0.0;
  re[0] = rng.next_gaussian() * scale[0];
  var += scale[0] * scale[0];
  for (int j = 1; j <= nf; ++j) {
    re[static_cast<std::size_t>(j)] = rng.next_gaussian() * scale[static_cast<std::size_t>(j)];
    const bool nyquist = (h % 2 == 0) && j == nf;
    if (!nyquist) im[static_cast<std::size_t>(j)] = rng.next_gaussian() * scale[static_cast<std::size_t>(j)];
    var += scale[static_cast<std::size_t>(j)] * scale[static_cast<std::size_t>(j)];
  }
  const double norm = 1.0 / std::sqrt(var);

  std::vector<double> x(static_cast<std::size_t>(h));
  const double two_pi = 6.283185307179586476925286766559;
  for (int t = 0; t < h; ++t) {
    double acc = re[0];
    for (int j = 1; j <= nf; ++j) {
      const double ang = two_pi * j * t / h;
      acc += re[static_cast<std::size_t>(j)] * std::cos(ang) + im[static_cast<std::size_t>(j)] * std::sin(ang);
    }
    x[static_cast<std::size_t>(t)] = acc * norm;
  }
  return x;
}

IcemResult icem_optimize(const std::function<double(std::span<const double>)>& objective, const ActionBox& box,
                         const IcemConfig& cfg, int h, Rng rng, const std::vector<double>* shift_init) {
  const int dim = static_cast<int>(box.lo.size());
  if (dim == 0 || box.hi.size() != box.lo.size()) throw std::invalid_argument("icem_optimize: bad action box");
  if (h < 1) throw std::invalid_argument("icem_optimize: horizon must be >= 1");
  const int n_plan = h * dim;
  const int n_elites = std::max(1, static_cast<int>(std::ceil(cfg.elite_ratio * cfg.population_size)));

  std::vector<double> mean(static_cast<std::size_t>(n_plan));
  std::vector<double> stddev(static_cast<std::size_t>(n_plan));
  for (int t = 0; t < h; ++t) {
    for (int d = 0; d < dim; ++d) {
      const std::size_t k = static_cast<std::size_t>(t) * dim + d;
      if (shift_init && !shift_init->empty()) {
        // warm start: previous solution shifted by one step, last step repeated
        const int prev_h = static_cast<int>(shift_init->size()) / dim;
        const int src = std::min(t + 1, prev_h - 1);
        mean[k] = (*shift_init)[static_cast<std::size_t>(src) * dim + d];
      } else {
        mean[k] = 0.5 * (box.lo[static_cast<std::size_t>(d)] + box.hi[static_cast<std::size_t>(d)]);
      }
      stddev[k] = 0.25 * (box.hi[static_cast<std::size_t>(d)] - box.lo[static_cast<std::size_t>(d)]);
    }
  }

  IcemResult result;
  result.cost = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> carried;     // elite plans reused next iteration
  std::vector<double> carried_costs;
  for (int iter = 0; iter < cfg.num_iterations; ++iter) {
    const int target_pop = std::max(
        n_elites,
        static_cast<int>(std::floor(cfg.population_size * std::pow(cfg.population_decay_factor, iter))));
    const int fresh = std::max(1, target_pop - static_cast<int>(carried.size()));

    std::vector<std::vector<double>> pop;
    pop.reserve(static_cast<std::size_t>(fresh) + carried.size());
    for (int c = 0; c < fresh; ++c) {
      std::vector<double> plan(static_cast<std::size_t>(n_plan));
      for (int d = 0; d < dim; ++d) {
        const auto noise = colored_noise(cfg.colored_noise_exponent, h, rng);
        for (int t = 0; t < h; ++t) {
          const std::size_t k = static_cast<std::size_t>(t) * dim + d;
          plan[k] = std::clamp(mean[k] + stddev[k] * noise[static_cast<std::size_t>(t)],
                               box.lo[static_cast<std::size_t>(d)], box.hi[static_cast<std::size_t>(d)]);
        }
      }
      pop.push_back(std::move(plan));
    }
    // the smoothed mean competes as a candidate in the final iteration
    if (iter == cfg.num_iterations - 1 && target_pop > 1) {
      std::vector<double> plan(static_cast<std::size_t>(n_plan));
      for (int t = 0; t < h; ++t) {
        for (int d = 0; d < dim; ++d) {
          const std::size_t k = static_cast<std::size_t>(t) * dim + d;
          plan[k] = std::clamp(mean[k], box.lo[static_cast<std::size_t>(d)], box.hi[static_cast<std::size_t>(d)]);
        }
      }
      pop.push_back(std::move(plan));
    }
    const int first_carried = static_cast<int>(pop.size());
    for (auto& e : carried) pop.push_back(e);

    std::vector<double> costs(pop.size());
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < static_cast<int>(pop.size()); ++c) {
      double v;
      if (c >= first_carried) {
        v = carried_costs[static_cast<std::size_t>(c - first_carried)];  // deterministic objective: reuse
      } else {
        v = objective(pop[static_cast<std::size_t>(c)]);
      }
      costs[static_cast<std::size_t>(c)] = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }

    std::vector<int> order(pop.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
      if (costs[static_cast<std::size_t>(lhs)] != costs[static_cast<std::size_t>(rhs)]) {
        return costs[static_cast<std::size_t>(lhs)] < costs[static_cast<std::size_t>(rhs)];
      }
      return lhs < rhs;
    });
    const int k_elite = std::min<int>(n_elites, static_cast<int>(order.size()));

    if (costs[static_cast<std::size_t>(order[0])] < result.cost) {
      result.cost = costs[static_cast<std::size_t>(order[0])];
      result.plan = pop[static_cast<std::size_t>(order[0])];
    }
    result.best_per_iteration.push_back(result.cost);

    // refit on elites with smoothing toward the previous parameters
    std::vector<double> mu(static_cast<std::size_t>(n_plan), 0.0), sd(static_cast<std::size_t>(n_plan), 0.0);
    for (int e = 0; e < k_elite; ++e) {
      const auto& plan = pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])];
      for (int k = 0; k < n_plan; ++k) mu[static_cast<std::size_t>(k)] += plan[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < n_plan; ++k) mu[static_cast<std::size_t>(k)] /= k_elite;
    std::vector<double> mean_next(static_cast<std::size_t>(n_plan));
    for (int k = 0; k < n_plan; ++k) {
      mean_next[static_cast<std::size_t>(k)] =
          cfg.alpha * mean[static_cast<std::size_t>(k)] + (1.0 - cfg.alpha) * mu[static_cast<std::size_t>(k)];
    }
    // elite spread measured around the updated mean keeps exploration alive
    // while the smoothed mean still lags the elites
    for (int e = 0; e < k_elite; ++e) {
      const auto& plan = pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])];
      for (int k = 0; k < n_plan; ++k) {
        const double dev = plan[static_cast<std::size_t>(k)] - mean_next[static_cast<std::size_t>(k)];
        sd[static_cast<std::size_t>(k)] += dev * dev;
      }
    }
    for (int k = 0; k < n_plan; ++k) {
      sd[static_cast<std::size_t>(k)] = std::sqrt(sd[static_cast<std::size_t>(k)] / k_elite);
      mean[static_cast<std::size_t>(k)] = mean_next[static_cast<std::size_t>(k)];
      stddev[static_cast<std::size_t>(k)] =
          cfg.alpha * stddev[static_cast<std::size_t>(k)] + (1.0 - cfg.alpha) * sd[static_cast<std::size_t>(k)];
    }

    const int n_keep = std::min(k_elite, static_cast<int>(std::lround(cfg.keep_elite_frac * n_elites)));
    carried.clear();
    carried_costs.clear();
    for (int e = 0; e < n_keep; ++e) {
      carried.push_back(pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);
      carried_costs.push_back(costs[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);
    }
  }
  return result;
}

ExhaustiveResult exhaustive_optimize(const std::function<double(std::span<const int>)>& objective, int n_actions,
                                     int h, Rng rng, long long enumeration_cap, int shooting_budget) {
  if (n_actions < 1 || h < 1) throw std::invalid_argument("exhaustive_optimize: bad sizes");

  long long total = 1;
  bool overflow = false;
  for (int t = 0; t < h; ++t) {
    total *= n_actions;
    if (total > enumeration_cap) {
      overflow = true;
      break;
    }
  }

  ExhaustiveResult result;
  std::vector<std::vector<int>> candidates;
  if (!overflow) {
    candidates.reserve(static_cast<std::size_t>(total));
    std::vector<int> seq(static_cast<std::size_t>(h), 0);
    while (true) {
      candidates.push_back(seq);
      int t = h - 1;
      while (t >= 0 && ++seq[static_cast<std::size_t>(t)] == n_actions) {
        seq[static_cast<std::size_t>(t)] = 0;
        --t;
      }
      if (t < 0) break;
    }
  } else {
    result.shooting_fallback = true;
    candidates.reserve(static_cast<std::size_t>(shooting_budget));
    for (int c = 0; c < shooting_budget; ++c) {
      std::vector<int> seq(static_cast<std::size_t>(h));
      for (int t = 0; t < h; ++t) seq[static_cast<std::size_t>(t)] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_actions)));
      candidates.push_back(std::move(seq));
    }
  }

  std::vector<double> costs(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
    const double v = objective(candidates[static_cast<std::size_t>(c)]);
    costs[static_cast<std::size_t>(c)] = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }

  int best = 0;
  for (int c = 1; c < static_cast<int>(candidates.size()); ++c) {
    if (costs[static_cast<std::size_t>(c)] < costs[static_cast<std::size_t>(best)]) best = c;
  }
  result.actions = candidates[static_cast<std::size_t>(best)];
  result.cost = costs[static_cast<std::size_t>(best)];
  return result;
}

}  // namespace zilot
