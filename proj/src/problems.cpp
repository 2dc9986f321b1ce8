#include "drsub/problems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "drsub/lp.hpp"
#include "drsub/rng.hpp"

namespace drsub::problems {

namespace {

constexpr int kMaxEnumDim = 12;  // 2^n memoization guard

void require_enumerable(int n, const char* what) {
  if (n < 1 || n > kMaxEnumDim)
    throw std::domain_error(std::string(what) + ": needs 1 <= n <= 12");
}

std::vector<double> g_values(const GFunction& g, const std::vector<double>& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = g.value(static_cast<int>(i), x[i]);
  return v;
}

std::vector<double> g_derivs(const GFunction& g, const std::vector<double>& x) {
  std::vector<double> v(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) v[i] = g.deriv(static_cast<int>(i), x[i]);
  return v;
}

}  // namespace

double GFunction::value(int i, double x) const {
  if (kind == GKind::identity) return x;
  return x / (x + a[i]);
}

double GFunction::deriv(int i, double x) const {
  if (kind == GKind::identity) return 1.0;
  const double d = x + a[i];
  return a[i] / (d * d);
}

// ---------------------------------------------------------------------------
// Generalized multilinear extension.

double GmeTable::value(const std::vector<double>& g) const {
  const std::uint32_t size = 1u << n;
  // p[S] = prod_{i in S} g_i ; q[S] = prod_{i in S} (1 - g_i).
  std::vector<double> p(size), q(size);
  p[0] = q[0] = 1.0;
  for (std::uint32_t mask = 1; mask < size; ++mask) {
    const int i = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    p[mask] = p[rest] * g[i];
    q[mask] = q[rest] * (1.0 - g[i]);
  }
  const std::uint32_t full = size - 1;
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < size; ++mask)
    total += f[mask] * p[mask] * q[full ^ mask];
  return total;
}

std::vector<double> GmeTable::gradient(const std::vector<double>& g,
                                       const std::vector<double>& gderiv) const {
  const std::uint32_t size = 1u << n;
  std::vector<double> p(size), q(size);
  p[0] = q[0] = 1.0;
  for (std::uint32_t mask = 1; mask < size; ++mask) {
    const int i = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    p[mask] = p[rest] * g[i];
    q[mask] = q[rest] * (1.0 - g[i]);
  }
  const std::uint32_t full = size - 1;
  std::vector<double> grad(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t bit = 1u << i;
    double sum = 0.0;
    for (std::uint32_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      sum += (f[mask | bit] - f[mask]) * p[mask] * q[full ^ mask ^ bit];
    }
    grad[i] = gderiv[i] * sum;
  }
  return grad;
}

bool GmeTable::is_monotone(double tolerance) const {
  const std::uint32_t size = 1u << n;
  for (std::uint32_t mask = 0; mask < size; ++mask)
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      if (mask & bit) continue;
      if (f[mask | bit] < f[mask] - tolerance) return false;
    }
  return true;
}

bool GmeTable::is_submodular(double tolerance) const {
  // Marginal gains f(S+i) - f(S) must not increase as S grows one element.
  const std::uint32_t size = 1u << n;
  for (std::uint32_t mask = 0; mask < size; ++mask)
    for (int i = 0; i < n; ++i) {
      const std::uint32_t bit = 1u << i;
      if (mask & bit) continue;
      for (int j = 0; j < n; ++j) {
        const std::uint32_t bj = 1u << j;
        if (i == j || (mask & bj)) continue;
        const double gain_small = f[mask | bit] - f[mask];
        const double gain_large = f[mask | bj | bit] - f[mask | bj];
        if (gain_large > gain_small + tolerance) return false;
      }
    }
  return true;
}

// ---------------------------------------------------------------------------
// Quadratic family.

QuadraticInstance gen_quadratic(int n, int m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_quadratic: n must be positive");
  if (m < 0) throw std::invalid_argument("gen_quadratic: m must be non-negative");
  Rng rng(seed);
  QuadraticInstance inst;
  inst.H.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = rng.uniform(-1.0, 0.0);
      inst.H[i][j] = v;
      inst.H[j][i] = v;
    }
  inst.A.assign(m, std::vector<double>(n, 0.0));
  for (int r = 0; r < m; ++r)
    for (int j = 0; j < n; ++j) inst.A[r][j] = rng.uniform01();
  inst.b.assign(m, 1.0);
  // h = -H^T 1: the gradient h + Hx = -H(1 - x) is then >= 0 on [0,1]^n, so
  // the objective is non-decreasing, and it vanishes at the upper corner.
  inst.h.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += inst.H[j][i];
    inst.h[i] = -s;
  }
  inst.c = 0.0;
  return inst;
}

double quadratic_value(const QuadraticInstance& inst, const std::vector<double>& x) {
  const int n = inst.dim();
  double v = inst.c;
  for (int i = 0; i < n; ++i) {
    v += inst.h[i] * x[i];
    double hx = 0.0;
    for (int j = 0; j < n; ++j) hx += inst.H[i][j] * x[j];
    v += 0.5 * x[i] * hx;
  }
  return v;
}

std::vector<double> quadratic_grad(const QuadraticInstance& inst,
                                   const std::vector<double>& x) {
  const int n = inst.dim();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    double hx = 0.0;
    for (int j = 0; j < n; ++j) hx += inst.H[i][j] * x[j];
    g[i] = inst.h[i] + hx;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Covering family.

void rebuild_coverage_sets(CoveringInstance& inst) {
  const int n = inst.dim();
  inst.coverage_sets.assign(inst.demand_xy.size(), {});
  for (std::size_t j = 0; j < inst.demand_xy.size(); ++j)
    for (int i = 0; i < n; ++i) {
      const double dx = inst.facility_xy[i][0] - inst.demand_xy[j][0];
      const double dy = inst.facility_xy[i][1] - inst.demand_xy[j][1];
      if (std::sqrt(dx * dx + dy * dy) <= inst.dbar)
        inst.coverage_sets[j].push_back(i);
    }
}

CoveringInstance gen_covering(int n, int num_demands, double budget,
                              bool capacitated, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_covering: n must be positive");
  if (num_demands < 1) throw std::invalid_argument("gen_covering: needs demand points");
  if (!(budget > 0.0)) throw std::invalid_argument("gen_covering: budget must be positive");
  if (capacitated) require_enumerable(n, "gen_covering (capacitated)");
  Rng rng(seed);
  CoveringInstance inst;
  inst.facility_xy.resize(n);
  for (auto& p : inst.facility_xy) {
    p[0] = rng.uniform01();
    p[1] = rng.uniform01();
  }
  inst.demand_xy.resize(num_demands);
  for (auto& p : inst.demand_xy) {
    p[0] = rng.uniform01();
    p[1] = rng.uniform01();
  }
  inst.weights.assign(num_demands, 1.0);
  inst.dbar = 0.2;
  inst.budget = budget;
  inst.a.assign(n, budget / n);
  if (capacitated) {
    const double k = static_cast<double>(num_demands) / (0.9 * n);
    inst.capacity.assign(n, k);
  }
  rebuild_coverage_sets(inst);
  return inst;
}

double coverage_value_kernel(const std::vector<std::vector<int>>& sets,
                             const std::vector<double>& weights,
                             const std::vector<double>& g) {
  double total = 0.0;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    double miss = 1.0;
    for (int i : sets[j]) miss *= 1.0 - g[i];
    total += weights[j] * (1.0 - miss);
  }
  return total;
}

std::vector<double> coverage_grad_kernel(const std::vector<std::vector<int>>& sets,
                                         const std::vector<double>& weights,
                                         const std::vector<double>& g,
                                         const std::vector<double>& gderiv, int n) {
  std::vector<double> grad(n, 0.0);
  std::vector<double> prefix, suffix;
  for (std::size_t j = 0; j < sets.size(); ++j) {
    const auto& set = sets[j];
    const std::size_t k = set.size();
    if (k == 0) continue;
    // Leave-one-out products of (1 - g) without dividing, so g == 1 is safe.
    prefix.assign(k + 1, 1.0);
    suffix.assign(k + 1, 1.0);
    for (std::size_t t = 0; t < k; ++t) prefix[t + 1] = prefix[t] * (1.0 - g[set[t]]);
    for (std::size_t t = k; t-- > 0;) suffix[t] = suffix[t + 1] * (1.0 - g[set[t]]);
    for (std::size_t t = 0; t < k; ++t)
      grad[set[t]] += weights[j] * prefix[t] * suffix[t + 1] * gderiv[set[t]];
  }
  return grad;
}

double covering_value_uncap(const CoveringInstance& inst, const std::vector<double>& x) {
  return coverage_value_kernel(inst.coverage_sets, inst.weights, g_values(inst.g(), x));
}

std::vector<double> covering_grad_uncap(const CoveringInstance& inst,
                                        const std::vector<double>& x) {
  const GFunction g = inst.g();
  return coverage_grad_kernel(inst.coverage_sets, inst.weights, g_values(g, x),
                              g_derivs(g, x), inst.dim());
}

double solve_assignment(const CoveringInstance& inst, std::uint32_t open_mask) {
  if (!inst.capacitated())
    throw std::domain_error("solve_assignment: instance has no capacities");
  const int n = inst.dim();
  const int num_demands = static_cast<int>(inst.demand_xy.size());

  // Variables y_ij for open facility i and demand j it can serve.
  struct Pair {
    int i, j;
  };
  std::vector<Pair> pairs;
  for (int j = 0; j < num_demands; ++j)
    for (int i : inst.coverage_sets[j])
      if (open_mask & (1u << i)) pairs.push_back({i, j});
  if (pairs.empty()) return 0.0;

  lp::LpModel model;
  model.objective.assign(pairs.size(), 0.0);
  model.var_bounds.assign(pairs.size(), {0.0, 1.0});
  for (std::size_t v = 0; v < pairs.size(); ++v)
    model.objective[v] = inst.weights[pairs[v].j];

  // Facility capacity rows.
  for (int i = 0; i < n; ++i) {
    if (!(open_mask & (1u << i))) continue;
    std::vector<double> row(pairs.size(), 0.0);
    bool any = false;
    for (std::size_t v = 0; v < pairs.size(); ++v)
      if (pairs[v].i == i) {
        row[v] = 1.0;
        any = true;
      }
    if (any) model.add_row(std::move(row), lp::Sense::le, inst.capacity[i]);
  }
  // Each demand takes at most one unit of service in total.
  for (int j = 0; j < num_demands; ++j) {
    std::vector<double> row(pairs.size(), 0.0);
    bool any = false;
    for (std::size_t v = 0; v < pairs.size(); ++v)
      if (pairs[v].j == j) {
        row[v] = 1.0;
        any = true;
      }
    if (any) model.add_row(std::move(row), lp::Sense::le, 1.0);
  }

  const lp::LpSolution sol = lp::solve(model);
  if (sol.status != lp::LpStatus::optimal)
    throw std::runtime_error("solve_assignment: LP did not solve");
  return sol.objective_value;
}

GmeTable build_cap_coverage_table(const CoveringInstance& inst) {
  require_enumerable(inst.dim(), "build_cap_coverage_table");
  const int n = inst.dim();
  GmeTable table;
  table.n = n;
  table.f.resize(1u << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
    table.f[mask] = solve_assignment(inst, mask);
  return table;
}

double covering_value_cap(const CoveringInstance& inst, const GmeTable& table,
                          const std::vector<double>& x) {
  return table.value(g_values(inst.g(), x));
}

std::vector<double> covering_grad_cap(const CoveringInstance& inst,
                                      const GmeTable& table,
                                      const std::vector<double>& x) {
  const GFunction g = inst.g();
  return table.gradient(g_values(g, x), g_derivs(g, x));
}

// ---------------------------------------------------------------------------
// Influence family.

void rebuild_reach_sets(InfluenceInstance& inst) {
  require_enumerable(inst.nodes, "rebuild_reach_sets");
  const int n = inst.nodes;
  inst.reach.assign(inst.scenario_seeds.size(), std::vector<std::uint32_t>(n, 0));
  for (std::size_t w = 0; w < inst.scenario_seeds.size(); ++w) {
    Rng rng(inst.scenario_seeds[w]);
    std::vector<std::vector<int>> live_out(n);
    for (const auto& [from, to] : inst.arcs)
      if (rng.uniform01() < inst.p_live) live_out[from].push_back(to);
    for (int s = 0; s < n; ++s) {
      std::uint32_t seen = 1u << s;
      std::vector<int> stack{s};
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int t : live_out[v])
          if (!(seen & (1u << t))) {
            seen |= 1u << t;
            stack.push_back(t);
          }
      }
      inst.reach[w][s] = seen;
    }
  }
}

InfluenceInstance gen_influence(int nodes, double budget, GKind g_kind,
                                std::uint64_t seed, double p_live,
                                int num_scenarios) {
  require_enumerable(nodes, "gen_influence");
  if (!(budget > 0.0)) throw std::invalid_argument("gen_influence: budget must be positive");
  if (!(p_live >= 0.0 && p_live <= 1.0))
    throw std::invalid_argument("gen_influence: p_live must be in [0,1]");
  if (num_scenarios < 1) throw std::invalid_argument("gen_influence: needs scenarios");

  Rng rng(seed);
  InfluenceInstance inst;
  inst.nodes = nodes;
  inst.p_live = p_live;
  inst.g_kind = g_kind;
  inst.budget = budget;
  inst.a.assign(nodes, budget / nodes);

  // All ordered non-loop pairs, shuffled; take the first 2n+1 (or all of
  // them on graphs too small to have that many arcs).
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      if (i != j) all.emplace_back(i, j);
  for (std::size_t i = all.size(); i > 1; --i)
    std::swap(all[i - 1], all[rng.below(i)]);
  const std::size_t want =
      std::min<std::size_t>(all.size(), static_cast<std::size_t>(2 * nodes + 1));
  inst.arcs.assign(all.begin(), all.begin() + want);
  std::sort(inst.arcs.begin(), inst.arcs.end());

  inst.scenario_seeds.resize(num_scenarios);
  for (int w = 0; w < num_scenarios; ++w)
    inst.scenario_seeds[w] = Rng::derive(rng.next_u64(), static_cast<std::uint64_t>(w));
  rebuild_reach_sets(inst);
  return inst;
}

std::vector<GmeTable> build_influence_scenario_tables(const InfluenceInstance& inst) {
  require_enumerable(inst.nodes, "build_influence_scenario_tables");
  const int n = inst.nodes;
  const std::uint32_t size = 1u << n;
  std::vector<GmeTable> tables(inst.reach.size());
  for (std::size_t w = 0; w < inst.reach.size(); ++w) {
    tables[w].n = n;
    tables[w].f.resize(size);
    std::vector<std::uint32_t> uni(size, 0);
    tables[w].f[0] = 0.0;
    for (std::uint32_t mask = 1; mask < size; ++mask) {
      const int i = std::countr_zero(mask);
      uni[mask] = uni[mask & (mask - 1)] | inst.reach[w][i];
      tables[w].f[mask] = static_cast<double>(std::popcount(uni[mask]));
    }
  }
  return tables;
}

GmeTable build_influence_table(const InfluenceInstance& inst) {
  const auto per_scenario = build_influence_scenario_tables(inst);
  GmeTable total;
  total.n = inst.nodes;
  total.f.assign(1u << inst.nodes, 0.0);
  for (const auto& t : per_scenario)
    for (std::size_t s = 0; s < t.f.size(); ++s) total.f[s] += t.f[s];
  return total;
}

double influence_value(const InfluenceInstance& inst, const GmeTable& table,
                       const std::vector<double>& x) {
  return table.value(g_values(inst.g(), x));
}

std::vector<double> influence_grad(const InfluenceInstance& inst,
                                   const GmeTable& table,
                                   const std::vector<double>& x) {
  const GFunction g = inst.g();
  return table.gradient(g_values(g, x), g_derivs(g, x));
}

}  // namespace drsub::problems
