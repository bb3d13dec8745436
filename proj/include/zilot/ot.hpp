#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zilot {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Discrete OT instance: cost C (n x m), source weights a, target weights b.
struct OtProblem {
  int n = 0;
  int m = 0;
  std::vector<double> cost;  // row-major n x m
  std::vector<double> a;
  std::vector<double> b;

  double c(int i, int j) const { return cost[static_cast<std::size_t>(i) * m + j]; }
  void validate() const;  // throws std::invalid_argument
};

struct TransportPlan {
  int n = 0;
  int m = 0;
  std::vector<double> coupling;  // row-major n x m
  double cost = 0.0;
  double marginal_violation = 0.0;
  double target_kl = 0.0;  // generalized KL of the column sums vs b (unbalanced)

  double t(int i, int j) const { return coupling[static_cast<std::size_t>(i) * m + j]; }
};

struct SinkhornConfig {
  double eta = 0.02;
  int iterations = 500;
  std::optional<double> xi_b;  // soft target-marginal weight; unset = balanced
};

// Exact minimizer of <C,T> over U(a,b): north-west-corner start, transportation
// simplex, Bland's rule on entering and leaving variables.
TransportPlan transport_simplex(const OtProblem& p);

// Log-domain Sinkhorn, fixed iteration count. Row marginals are exact after a
// final row-scaling; the column violation is reported.
TransportPlan sinkhorn(const OtProblem& p, const SinkhornConfig& cfg);

// Target marginal relaxed to a KL penalty of weight xi_b; the source marginal
// stays hard. The target-side dual update is damped by xi_b / (xi_b + eta).
TransportPlan sinkhorn_unbalanced(const OtProblem& p, const SinkhornConfig& cfg);

// (1/n) * min over permutations of sum_i C[i][perm(i)] -- the exact OT cost of
// a uniform square problem. Refuses n > 8.
double assignment_bruteforce(const std::vector<double>& cost, int n);

// Projects a nonnegative coupling onto U(a,b) (row/column scaling plus a rank-1
// correction); used to compare entropic solutions against the exact optimum.
TransportPlan round_to_marginals(const TransportPlan& plan, const OtProblem& p);

}  // namespace zilot
