#include "zilot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>

namespace zilot {

void OtProblem::validate() const {
  if (n <= 0 || m <= 0) throw std::invalid_argument("OtProblem: empty marginal");
  if (cost.size() != static_cast<std::size_t>(n) * m) throw std::invalid_argument("OtProblem: cost size mismatch");
  if (a.size() != static_cast<std::size_t>(n) || b.size() != static_cast<std::size_t>(m)) {
    throw std::invalid_argument("OtProblem: weight size mismatch");
  }
  for (double v : cost) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("OtProblem: cost entries must be finite and nonnegative");
  }
  double sa = 0.0, sb = 0.0;
  for (double v : a) {
    if (v < 0.0) throw std::invalid_argument("OtProblem: negative source weight");
    sa += v;
  }
  for (double v : b) {
    if (v < 0.0) throw std::invalid_argument("OtProblem: negative target weight");
    sb += v;
  }
  if (std::abs(sa - 1.0) > 1e-9 || std::abs(sb - 1.0) > 1e-9) {
    throw std::invalid_argument("OtProblem: weights must sum to 1 (got " + std::to_string(sa) + ", " +
                                std::to_string(sb) + ")");
  }
}

namespace {

double plan_violation(const TransportPlan& plan, const OtProblem& p) {
  double worst = 0.0;
  for (int i = 0; i < p.n; ++i) {
    double s = 0.0;
    for (int j = 0; j < p.m; ++j) s += plan.t(i, j);
    worst = std::max(worst, std::abs(s - p.a[static_cast<std::size_t>(i)]));
  }
  for (int j = 0; j < p.m; ++j) {
    double s = 0.0;
    for (int i = 0; i < p.n; ++i) s += plan.t(i, j);
    worst = std::max(worst, std::abs(s - p.b[static_cast<std::size_t>(j)]));
  }
  return worst;
}

double inner_cost(const TransportPlan& plan, const OtProblem& p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < plan.coupling.size(); ++k) acc += plan.coupling[k] * p.cost[k];
  return acc;
}

// Spanning-tree basis for the transportation simplex. Nodes 0..n-1 are rows,
// n..n+m-1 are columns; edges are basic cells.
struct Basis {
  int n, m;
  std::vector<double> flow;                           // n x m
  std::vector<char> is_basic;                         // n x m
  std::vector<std::vector<std::pair<int, int>>> adj;  // node -> (node, cell)

  Basis(int n_, int m_) : n(n_), m(m_), flow(static_cast<std::size_t>(n_) * m_, 0.0),
                          is_basic(static_cast<std::size_t>(n_) * m_, 0), adj(static_cast<std::size_t>(n_ + m_)) {}

  int cell(int i, int j) const { return i * m + j; }
  void add_edge(int i, int j) {
    is_basic[static_cast<std::size_t>(cell(i, j))] = 1;
    adj[static_cast<std::size_t>(i)].emplace_back(n + j, cell(i, j));
    adj[static_cast<std::size_t>(n + j)].emplace_back(i, cell(i, j));
  }
  void remove_edge(int i, int j) {
    is_basic[static_cast<std::size_t>(cell(i, j))] = 0;
    auto drop = [&](int node, int other) {
      auto& v = adj[static_cast<std::size_t>(node)];
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k].first == other) {
          v[k] = v.back();
          v.pop_back();
          return;
        }
      }
    };
    drop(i, n + j);
    drop(n + j, i);
  }
};

}  // namespace

TransportPlan transport_simplex(const OtProblem& p) {
  p.validate();
  const int n = p.n, m = p.m;
  Basis basis(n, m);

  // north-west corner start; on a tie only the row is exhausted, leaving a
  // zero-flow basic cell in the next column so the basis always has n+m-1 cells
  {
    std::vector<double> ra = p.a, rb = p.b;
    int i = 0, j = 0;
    while (true) {
      const double q = std::min(ra[static_cast<std::size_t>(i)], rb[static_cast<std::size_t>(j)]);
      basis.flow[static_cast<std::size_t>(basis.cell(i, j))] = q;
      basis.add_edge(i, j);
      ra[static_cast<std::size_t>(i)] -= q;
      rb[static_cast<std::size_t>(j)] -= q;
      if (i == n - 1 && j == m - 1) break;
      if (ra[static_cast<std::size_t>(i)] <= rb[static_cast<std::size_t>(j)] && i < n - 1) {
        ++i;
      } else if (j < m - 1) {
        ++j;
      } else {
        ++i;
      }
    }
  }

  std::vector<double> u(static_cast<std::size_t>(n)), v(static_cast<std::size_t>(m));
  std::vector<int> stack, parent_node(static_cast<std::size_t>(n + m)), parent_cell(static_cast<std::size_t>(n + m));
  std::vector<char> seen(static_cast<std::size_t>(n + m));

  const auto compute_duals = [&] {
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, 0);
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (auto [next, cell] : basis.adj[static_cast<std::size_t>(node)]) {
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        const int i = cell / m, j = cell % m;
        if (next >= n) {
          v[static_cast<std::size_t>(j)] = p.cost[static_cast<std::size_t>(cell)] - u[static_cast<std::size_t>(i)];
        } else {
          u[static_cast<std::size_t>(i)] = p.cost[static_cast<std::size_t>(cell)] - v[static_cast<std::size_t>(j)];
        }
        stack.push_back(next);
      }
    }
  };

  // tolerance relative to the cost scale
  double cmax = 0.0;
  for (double c : p.cost) cmax = std::max(cmax, c);
  const double tol = std::max(1e-14, 1e-12 * std::max(1.0, cmax));

  const std::int64_t max_pivots = 2000 + 64ll * (n + m) * (n + m);
  std::int64_t pivots = 0;
  while (true) {
    compute_duals();

    // Bland's rule: first cell in row-major order with negative reduced cost
    int enter = -1;
    for (int i = 0; i < n && enter < 0; ++i) {
      for (int j = 0; j < m; ++j) {
        const int cell = basis.cell(i, j);
        if (basis.is_basic[static_cast<std::size_t>(cell)]) continue;
        const double rc = p.cost[static_cast<std::size_t>(cell)] - u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
        if (rc < -tol) {
          enter = cell;
          break;
        }
      }
    }
    if (enter < 0) break;
    if (++pivots > max_pivots) throw NumericalError("transport_simplex: pivot limit exceeded");

    const int ei = enter / m, ej = enter % m;
    // unique tree path from row node ei to column node n+ej
    std::fill(seen.begin(), seen.end(), 0);
    stack.assign(1, ei);
    seen[static_cast<std::size_t>(ei)] = 1;
    parent_node[static_cast<std::size_t>(ei)] = -1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node == n + ej) break;
      for (auto [next, cell] : basis.adj[static_cast<std::size_t>(node)]) {
        if (seen[static_cast<std::size_t>(next)]) continue;
        seen[static_cast<std::size_t>(next)] = 1;
        parent_node[static_cast<std::size_t>(next)] = node;
        parent_cell[static_cast<std::size_t>(next)] = cell;
        stack.push_back(next);
      }
    }

    // walk the cycle: entering cell gets +theta, signs alternate along the path
    double theta = std::numeric_limits<double>::infinity();
    {
      int node = n + ej;
      bool minus = true;  // first path edge (ending at the column node) is a minus edge
      while (parent_node[static_cast<std::size_t>(node)] != -1) {
        const int cell = parent_cell[static_cast<std::size_t>(node)];
        if (minus) theta = std::min(theta, basis.flow[static_cast<std::size_t>(cell)]);
        node = parent_node[static_cast<std::size_t>(node)];
        minus = !minus;
      }
    }
    // leaving variable: smallest-index blocking cell (Bland tie-break)
    int leave = -1;
    {
      int node = n + ej;
      bool minus = true;
      while (parent_node[static_cast<std::size_t>(node)] != -1) {
        const int cell = parent_cell[static_cast<std::size_t>(node)];
        if (minus && basis.flow[static_cast<std::size_t>(cell)] <= theta + 1e-15) {
          if (leave < 0 || cell < leave) leave = cell;
        }
        node = parent_node[static_cast<std::size_t>(node)];
        minus = !minus;
      }
    }

    {
      int node = n + ej;
      bool minus = true;
      while (parent_node[static_cast<std::size_t>(node)] != -1) {
        const int cell = parent_cell[static_cast<std::size_t>(node)];
        basis.flow[static_cast<std::size_t>(cell)] += minus ? -theta : theta;
        node = parent_node[static_cast<std::size_t>(node)];
        minus = !minus;
      }
    }
    basis.flow[static_cast<std::size_t>(enter)] = theta;
    basis.remove_edge(leave / m, leave % m);
    basis.add_edge(ei, ej);
    basis.flow[static_cast<std::size_t>(leave)] = 0.0;
  }

  TransportPlan plan;
  plan.n = n;
  plan.m = m;
  plan.coupling = std::move(basis.flow);
  for (double& f : plan.coupling) {
    if (f < 0.0) f = 0.0;  // clip fp dust from degenerate pivots
  }
  plan.cost = inner_cost(plan, p);
  plan.marginal_violation = plan_violation(plan, p);
  return plan;
}

namespace {

struct LogWeights {
  std::vector<double> log_a, log_b;
};

LogWeights log_weights(const OtProblem& p) {
  LogWeights w;
  w.log_a.resize(static_cast<std::size_t>(p.n));
  w.log_b.resize(static_cast<std::size_t>(p.m));
  const double neg_inf = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.n; ++i) w.log_a[static_cast<std::size_t>(i)] = p.a[static_cast<std::size_t>(i)] > 0.0 ? std::log(p.a[static_cast<std::size_t>(i)]) : neg_inf;
  for (int j = 0; j < p.m; ++j) w.log_b[static_cast<std::size_t>(j)] = p.b[static_cast<std::size_t>(j)] > 0.0 ? std::log(p.b[static_cast<std::size_t>(j)]) : neg_inf;
  return w;
}

double logsumexp(std::span<const double> xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

TransportPlan sinkhorn_impl(const OtProblem& p, const SinkhornConfig& cfg, bool unbalanced) {
  p.validate();
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("sinkhorn: eta must be positive");
  if (cfg.iterations < 1) throw std::invalid_argument("sinkhorn: iterations must be >= 1");
  if (unbalanced && (!cfg.xi_b || *cfg.xi_b <= 0.0)) {
    throw std::invalid_argument("sinkhorn_unbalanced: xi_b must be set and positive");
  }
  const int n = p.n, m = p.m;
  const double eta = cfg.eta;
  const double damp = unbalanced ? *cfg.xi_b / (*cfg.xi_b + eta) : 1.0;

  double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (double c : p.cost) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  const auto numerical_failure = [&](const char* where) {
    throw NumericalError(std::string("sinkhorn: non-finite value in ") + where + " (C/eta range [" +
                         std::to_string(cmin / eta) + ", " + std::to_string(cmax / eta) + "])");
  };

  const auto w = log_weights(p);
  std::vector<double> f(static_cast<std::size_t>(n), 0.0), g(static_cast<std::size_t>(m), 0.0);
  std::vector<double> scratch(static_cast<std::size_t>(std::max(n, m)));

  for (int it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(w.log_a[static_cast<std::size_t>(i)])) {
        f[static_cast<std::size_t>(i)] = 0.0;
        continue;
      }
      for (int j = 0; j < m; ++j) {
        scratch[static_cast<std::size_t>(j)] =
            (g[static_cast<std::size_t>(j)] - p.c(i, j)) / eta + w.log_b[static_cast<std::size_t>(j)];
      }
      f[static_cast<std::size_t>(i)] = -eta * logsumexp({scratch.data(), static_cast<std::size_t>(m)});
      if (std::isnan(f[static_cast<std::size_t>(i)])) numerical_failure("row update");
    }
    for (int j = 0; j < m; ++j) {
      if (!std::isfinite(w.log_b[static_cast<std::size_t>(j)])) {
        g[static_cast<std::size_t>(j)] = 0.0;
        continue;
      }
      for (int i = 0; i < n; ++i) {
        scratch[static_cast<std::size_t>(i)] =
            (f[static_cast<std::size_t>(i)] - p.c(i, j)) / eta + w.log_a[static_cast<std::size_t>(i)];
      }
      g[static_cast<std::size_t>(j)] = -damp * eta * logsumexp({scratch.data(), static_cast<std::size_t>(n)});
      if (std::isnan(g[static_cast<std::size_t>(j)])) numerical_failure("column update");
    }
  }

  TransportPlan plan;
  plan.n = n;
  plan.m = m;
  plan.coupling.assign(static_cast<std::size_t>(n) * m, 0.0);
  for (int i = 0; i < n; ++i) {
    const double ai = p.a[static_cast<std::size_t>(i)];
    if (ai <= 0.0) continue;
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      const double bj = p.b[static_cast<std::size_t>(j)];
      if (bj <= 0.0) continue;
      const double t = ai * bj * std::exp((f[static_cast<std::size_t>(i)] + g[static_cast<std::size_t>(j)] - p.c(i, j)) / eta);
      if (!std::isfinite(t)) numerical_failure("coupling");
      plan.coupling[static_cast<std::size_t>(i) * m + j] = t;
      row_sum += t;
    }
    if (row_sum > 0.0) {
      const double scale = ai / row_sum;  // row-scaling finish: source marginal exact
      for (int j = 0; j < m; ++j) plan.coupling[static_cast<std::size_t>(i) * m + j] *= scale;
    }
  }

  plan.cost = inner_cost(plan, p);
  double col_violation = 0.0, kl = 0.0;
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += plan.t(i, j);
    const double bj = p.b[static_cast<std::size_t>(j)];
    col_violation = std::max(col_violation, std::abs(s - bj));
    if (s > 0.0 && bj > 0.0) {
      kl += s * std::log(s / bj) - s + bj;
    } else {
      kl += bj;  // lim s->0 of the generalized KL term
    }
  }
  plan.marginal_violation = col_violation;
  plan.target_kl = kl;
  return plan;
}

}  // namespace

TransportPlan sinkhorn(const OtProblem& p, const SinkhornConfig& cfg) { return sinkhorn_impl(p, cfg, false); }

TransportPlan sinkhorn_unbalanced(const OtProblem& p, const SinkhornConfig& cfg) {
  return sinkhorn_impl(p, cfg, true);
}

double assignment_bruteforce(const std::vector<double>& cost, int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("assignment_bruteforce: n must be in [1, 8]");
  if (cost.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("assignment_bruteforce: bad cost size");
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += cost[static_cast<std::size_t>(i) * n + perm[static_cast<std::size_t>(i)]];
    best = std::min(best, acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

TransportPlan round_to_marginals(const TransportPlan& plan, const OtProblem& p) {
  TransportPlan out = plan;
  const int n = p.n, m = p.m;
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0), col_sum(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) row_sum[static_cast<std::size_t>(i)] += out.t(i, j);
  for (int i = 0; i < n; ++i) {
    const double s = row_sum[static_cast<std::size_t>(i)];
    const double scale = s > 0.0 ? std::min(1.0, p.a[static_cast<std::size_t>(i)] / s) : 0.0;
    for (int j = 0; j < m; ++j) out.coupling[static_cast<std::size_t>(i) * m + j] *= scale;
  }
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) col_sum[static_cast<std::size_t>(j)] += out.t(i, j);
  for (int j = 0; j < m; ++j) {
    const double s = col_sum[static_cast<std::size_t>(j)];
    const double scale = s > 0.0 ? std::min(1.0, p.b[static_cast<std::size_t>(j)] / s) : 0.0;
    for (int i = 0; i < n; ++i) out.coupling[static_cast<std::size_t>(i) * m + j] *= scale;
  }
  std::vector<double> err_a(static_cast<std::size_t>(n), 0.0), err_b(static_cast<std::size_t>(m), 0.0);
  double total_err = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += out.t(i, j);
    err_a[static_cast<std::size_t>(i)] = p.a[static_cast<std::size_t>(i)] - s;
    total_err += err_a[static_cast<std::size_t>(i)];
  }
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += out.t(i, j);
    err_b[static_cast<std::size_t>(j)] = p.b[static_cast<std::size_t>(j)] - s;
  }
  if (total_err > 1e-300) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        out.coupling[static_cast<std::size_t>(i) * m + j] +=
            err_a[static_cast<std::size_t>(i)] * err_b[static_cast<std::size_t>(j)] / total_err;
  }
  out.cost = inner_cost(out, p);
  out.marginal_violation = plan_violation(out, p);
  return out;
}

}  // namespace zilot
