#pragma once

#include <cstdint>
#include <vector>

#include "drsub/lp.hpp"
#include "drsub/model.hpp"

namespace drsub::verify {

struct GridOracleResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  double grid_step = 0.0;
  std::uint64_t points_evaluated = 0;  // feasible lattice points only
};

/// Brute-force maximization over the lattice {l_i + k*step} u {u_i} in every
/// dimension, keeping only points with Ax <= b (tolerance 1e-7). Refuses
/// lattices above 1e8 points (std::domain_error); throws std::runtime_error
/// when no lattice point is feasible. Ties prefer the earliest point in
/// lattice order, so the result is deterministic. With Lipschitz constant L
/// (max gradient norm), the true optimum is at most best_value + L*step*n/2.
GridOracleResult grid_maximize(const OracleProblem& problem, double step);

struct VertexEnumResult {
  bool feasible = false;
  std::vector<double> best_x;
  double best_value = 0.0;
};

/// Independent LP check: enumerates candidate vertices from every choice of n
/// tight constraints (rows and finite variable bounds), filters by
/// feasibility, and maximizes the objective over them. Exponential; guarded
/// to <= 8 variables and <= 12 rows (std::domain_error beyond that). Intended
/// for bounded feasible models, where the optimum lies at a vertex.
VertexEnumResult vertex_enumerate_lp(const lp::LpModel& model);

struct FdGradientReport {
  double max_rel_error = 0.0;
  int worst_component = -1;
};

/// Central finite-difference check of the gradient oracle at x. Every
/// coordinate must be at least h inside the box (std::domain_error
/// otherwise). Relative error uses max(1, |gradient component|).
FdGradientReport fd_gradient_check(const OracleProblem& problem,
                                   const std::vector<double>& x, double h);

}  // namespace drsub::verify
