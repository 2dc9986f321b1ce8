#pragma once

#include <vector>

namespace drsub::lp {

enum class Sense { le, eq, ge };

struct Row {
  std::vector<double> coeffs;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

struct VarBounds {
  double lo = 0.0;
  double hi = 0.0;  // may be +infinity
};

/// Dense LP in "maximize objective . x subject to rows, lo <= x <= hi" form.
/// Lower bounds must be finite (every variable in this codebase has one);
/// upper bounds may be +infinity.
struct LpModel {
  std::vector<double> objective;
  std::vector<Row> rows;
  std::vector<VarBounds> var_bounds;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  // Throws std::invalid_argument on length mismatch or non-finite data.
  void add_row(std::vector<double> coeffs, Sense sense, double rhs);
  void validate() const;
};

/// Copy of `model` with one more row. Re-solving the result must give the
/// same answer as solving the extended model from scratch.
LpModel add_row(LpModel model, std::vector<double> coeffs, Sense sense, double rhs);

enum class LpStatus {
  optimal,
  infeasible,
  unbounded,
  failure,  // numerical breakdown; never report a possibly-wrong answer
};

struct LpSolution {
  LpStatus status = LpStatus::failure;
  std::vector<double> x;
  double objective_value = 0.0;
};

/// Two-phase bounded-variable primal simplex on a dense tableau. Bland's rule
/// for both the entering and the leaving choice (lowest index), so runs are
/// deterministic and cycling-free; identical models yield bit-identical
/// solutions. An optimal solution is always a vertex of the feasible region
/// and satisfies every row within 1e-7 and every bound within 1e-9, or the
/// status degrades to failure.
LpSolution solve(const LpModel& model);

}  // namespace drsub::lp
