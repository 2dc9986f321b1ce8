#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "drsub/model.hpp"

namespace drsub::problems {

// ---------------------------------------------------------------------------
// Facility/seed availability functions g_i(x_i) in [0, 1].

enum class GKind { identity, contest };

/// identity: g(x) = x. contest: g(x) = x / (x + a_i), a Tullock-style success
/// probability; concave and increasing on x >= 0 with g(0) = 0.
struct GFunction {
  GKind kind = GKind::identity;
  std::vector<double> a;  // per-component denominator offsets (contest only)

  double value(int i, double x) const;
  double deriv(int i, double x) const;
};

// ---------------------------------------------------------------------------
// Generalized multilinear extension over a memoized set function.

/// f over all 2^n subsets, indexed by bitmask. The extension is
///   F(x) = sum_S f(S) prod_{i in S} g_i(x_i) prod_{i not in S} (1 - g_i(x_i))
/// i.e. the expectation of f(S) when each i joins S independently with
/// probability g_i(x_i). Non-decreasing DR-submodular whenever f is monotone
/// submodular and every g_i is concave increasing.
struct GmeTable {
  int n = 0;
  std::vector<double> f;  // size 1 << n

  double value(const std::vector<double>& g) const;
  // gradient[i] = g'_i * sum_{S w/o i} (f(S+i) - f(S)) * weight(S, rest)
  std::vector<double> gradient(const std::vector<double>& g,
                               const std::vector<double>& gderiv) const;
  bool is_monotone(double tolerance) const;    // exhaustive over all pairs S, S+i
  bool is_submodular(double tolerance) const;  // exhaustive marginal-gain check
};

// ---------------------------------------------------------------------------
// Quadratic family: F(x) = h.x + x.Hx/2 + c on [0,1]^n with Ax <= 1.

struct QuadraticInstance {
  std::vector<std::vector<double>> H;  // symmetric, entries in [-1, 0]
  std::vector<double> h;               // h = -H^T 1, makes F non-decreasing on the box
  std::vector<std::vector<double>> A;  // m x n, entries in [0, 1]
  std::vector<double> b;               // ones
  double c = 0.0;

  int dim() const { return static_cast<int>(h.size()); }
};

QuadraticInstance gen_quadratic(int n, int m, std::uint64_t seed);
double quadratic_value(const QuadraticInstance& inst, const std::vector<double>& x);
std::vector<double> quadratic_grad(const QuadraticInstance& inst,
                                   const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Covering family: facilities serve demand points within distance dbar.

struct CoveringInstance {
  std::vector<std::array<double, 2>> facility_xy;
  std::vector<std::array<double, 2>> demand_xy;
  std::vector<double> weights;  // per demand, all ones when generated
  double dbar = 0.2;
  double budget = 0.0;
  std::vector<double> a;         // contest denominators, a_i = budget / n
  std::vector<double> capacity;  // per facility; empty means uncapacitated
  // Derived: per demand, the facilities within dbar (recomputed on load).
  std::vector<std::vector<int>> coverage_sets;

  int dim() const { return static_cast<int>(facility_xy.size()); }
  bool capacitated() const { return !capacity.empty(); }
  GFunction g() const { return GFunction{GKind::contest, a}; }
};

CoveringInstance gen_covering(int n, int num_demands, double budget,
                              bool capacitated, std::uint64_t seed);
void rebuild_coverage_sets(CoveringInstance& inst);

/// Expected covered weight when demand j is served iff some facility in its
/// coverage set is available: sum_j w_j (1 - prod_{i in I_j} (1 - g_i)).
/// The kernel variants take precomputed g values so structural tests can use
/// the identity availability directly.
double coverage_value_kernel(const std::vector<std::vector<int>>& sets,
                             const std::vector<double>& weights,
                             const std::vector<double>& g);
std::vector<double> coverage_grad_kernel(const std::vector<std::vector<int>>& sets,
                                         const std::vector<double>& weights,
                                         const std::vector<double>& g,
                                         const std::vector<double>& gderiv, int n);

double covering_value_uncap(const CoveringInstance& inst, const std::vector<double>& x);
std::vector<double> covering_grad_uncap(const CoveringInstance& inst,
                                        const std::vector<double>& x);

/// Capacitated set value f(S): most demand weight assignable to open
/// facilities S, each facility i taking at most capacity[i] and each demand
/// at most one unit in total. Solved with the internal LP; the constraint
/// matrix is a bipartite matching structure, so with integral capacities the
/// optimum is integral.
double solve_assignment(const CoveringInstance& inst, std::uint32_t open_mask);

/// f(S) memoized over all 2^n subsets. Guarded to n <= 12.
GmeTable build_cap_coverage_table(const CoveringInstance& inst);

double covering_value_cap(const CoveringInstance& inst, const GmeTable& table,
                          const std::vector<double>& x);
std::vector<double> covering_grad_cap(const CoveringInstance& inst,
                                      const GmeTable& table,
                                      const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Influence family: live-arc cascade scenarios on a small digraph.

struct InfluenceInstance {
  int nodes = 0;
  std::vector<std::pair<int, int>> arcs;  // directed, no self loops
  double p_live = 0.1;
  std::vector<std::uint64_t> scenario_seeds;
  GKind g_kind = GKind::identity;
  double budget = 0.0;
  std::vector<double> a;  // contest denominators, a_i = budget / nodes
  // Derived: reach[w][i] = bitmask of nodes reachable from i in scenario w.
  std::vector<std::vector<std::uint32_t>> reach;

  int dim() const { return nodes; }
  int num_scenarios() const { return static_cast<int>(scenario_seeds.size()); }
  GFunction g() const {
    return g_kind == GKind::contest ? GFunction{GKind::contest, a}
                                    : GFunction{GKind::identity, {}};
  }
};

/// Erdos-Renyi style digraph with exactly min(2n+1, n(n-1)) arcs sampled
/// without replacement, five live-arc scenarios drawn at construction time.
InfluenceInstance gen_influence(int nodes, double budget, GKind g_kind,
                                std::uint64_t seed, double p_live = 0.1,
                                int num_scenarios = 5);
void rebuild_reach_sets(InfluenceInstance& inst);

/// Per-scenario spread f_w(S) = |union of reach sets|, memoized over all
/// subsets. Guarded to nodes <= 12.
std::vector<GmeTable> build_influence_scenario_tables(const InfluenceInstance& inst);
/// Sum of the scenario tables: the full objective in one extension.
GmeTable build_influence_table(const InfluenceInstance& inst);

double influence_value(const InfluenceInstance& inst, const GmeTable& table,
                       const std::vector<double>& x);
std::vector<double> influence_grad(const InfluenceInstance& inst,
                                   const GmeTable& table,
                                   const std::vector<double>& x);

}  // namespace drsub::problems
