#include "drsub/lp.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "drsub/model.hpp"

namespace drsub::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-11;    // entries at or below this cannot pivot
constexpr double kReducedTol = 1e-9;   // optimality tolerance on reduced costs
constexpr double kRatioRelax = 1e-10;  // Harris pass-1 bound relaxation
constexpr double kFixedWidth = 1e-12;  // lo == hi within this: variable is fixed

enum : signed char { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

// Dense tableau over [structural | slack | artificial] columns. The tableau
// stores B^-1 A and B^-1 b; nonbasic variables rest on a bound, so current
// basic values are x_B = beta - sum_j T[:,j] * x_j over nonbasic j.
struct Tableau {
  int m = 0;
  int ncols = 0;
  std::vector<double> t;     // m * ncols
  std::vector<double> beta;  // m
  std::vector<double> lo, hi;
  std::vector<double> cost;  // current phase objective
  std::vector<double> zrow;  // reduced costs, length ncols
  std::vector<int> basis;    // row -> column
  std::vector<signed char> stat;
  std::vector<double> xval;  // current value of every column

  double& at(int r, int c) { return t[static_cast<std::size_t>(r) * ncols + c]; }
  double at(int r, int c) const { return t[static_cast<std::size_t>(r) * ncols + c]; }

  void recompute_basic_values() {
    std::vector<double> acc = beta;
    for (int j = 0; j < ncols; ++j) {
      if (stat[j] == kBasic) continue;
      xval[j] = (stat[j] == kAtLower) ? lo[j] : hi[j];
      if (xval[j] != 0.0)
        for (int r = 0; r < m; ++r) acc[r] -= at(r, j) * xval[j];
    }
    for (int r = 0; r < m; ++r) xval[basis[r]] = acc[r];
  }

  void recompute_zrow() {
    for (int j = 0; j < ncols; ++j) zrow[j] = cost[j];
    for (int r = 0; r < m; ++r) {
      const double cb = cost[basis[r]];
      if (cb == 0.0) continue;
      for (int j = 0; j < ncols; ++j) zrow[j] -= cb * at(r, j);
    }
  }

  bool finite_state() const {
    for (double v : xval)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Rebuilds the tableau for the current basis directly from the initial data
// (Gauss-Jordan with partial pivoting on the basis matrix), discarding the
// rounding drift that incremental pivoting accumulates. Near-parallel cut
// rows make that drift large enough to matter. Returns false and leaves the
// tableau untouched when the basis matrix is numerically singular.
bool refactor(Tableau& tab, const std::vector<double>& t0,
              const std::vector<double>& beta0) {
  const int m = tab.m;
  const int ncols = tab.ncols;
  const int rwidth = ncols + 1;
  std::vector<double> basis_mat(static_cast<std::size_t>(m) * m);
  for (int k = 0; k < m; ++k)
    for (int r = 0; r < m; ++r)
      basis_mat[static_cast<std::size_t>(r) * m + k] =
          t0[static_cast<std::size_t>(r) * ncols + tab.basis[k]];
  std::vector<double> rhs(static_cast<std::size_t>(m) * rwidth);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < ncols; ++j)
      rhs[static_cast<std::size_t>(r) * rwidth + j] =
          t0[static_cast<std::size_t>(r) * ncols + j];
    rhs[static_cast<std::size_t>(r) * rwidth + ncols] = beta0[r];
  }
  auto brow = [&](int r) { return basis_mat.begin() + static_cast<std::size_t>(r) * m; };
  auto rrow = [&](int r) { return rhs.begin() + static_cast<std::size_t>(r) * rwidth; };
  for (int col = 0; col < m; ++col) {
    int piv = col;
    double best = std::fabs(brow(col)[col]);
    for (int r = col + 1; r < m; ++r) {
      const double a = std::fabs(brow(r)[col]);
      if (a > best) {
        best = a;
        piv = r;
      }
    }
    if (best <= kPivotTol) return false;
    if (piv != col) {
      std::swap_ranges(brow(col), brow(col) + m, brow(piv));
      std::swap_ranges(rrow(col), rrow(col) + rwidth, rrow(piv));
    }
    const double inv = 1.0 / brow(col)[col];
    for (int j = 0; j < m; ++j) brow(col)[j] *= inv;
    for (int j = 0; j < rwidth; ++j) rrow(col)[j] *= inv;
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = brow(r)[col];
      if (f == 0.0) continue;
      for (int j = 0; j < m; ++j) brow(r)[j] -= f * brow(col)[j];
      for (int j = 0; j < rwidth; ++j) rrow(r)[j] -= f * rrow(col)[j];
    }
  }
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < ncols; ++j)
      tab.at(r, j) = rhs[static_cast<std::size_t>(r) * rwidth + j];
    tab.beta[r] = rhs[static_cast<std::size_t>(r) * rwidth + ncols];
  }
  return true;
}

enum class IterResult { optimal, unbounded, breakdown };

IterResult run_simplex(Tableau& tab, const std::vector<double>& t0,
                       const std::vector<double>& beta0) {
  const long max_pivots = 2000 + 200L * (tab.m + tab.ncols);
  for (long pivots = 0; pivots < max_pivots; ++pivots) {
    // Entering: Bland, lowest column index with an improving reduced cost.
    int enter = -1;
    int dir = 0;  // +1 moving up from lower bound, -1 moving down from upper
    for (int j = 0; j < tab.ncols; ++j) {
      if (tab.stat[j] == kBasic) continue;
      if (tab.hi[j] - tab.lo[j] <= kFixedWidth) continue;
      if (tab.stat[j] == kAtLower && tab.zrow[j] > kReducedTol) {
        enter = j;
        dir = 1;
        break;
      }
      if (tab.stat[j] == kAtUpper && tab.zrow[j] < -kReducedTol) {
        enter = j;
        dir = -1;
        break;
      }
    }
    if (enter < 0) return IterResult::optimal;

    // Ratio test, two passes (Harris). Pass 1 finds the smallest step at
    // which a basic variable crosses its bound relaxed by kRatioRelax.
    // Pass 2 picks, among rows whose exact ratio fits under that relaxed
    // step, the one with the largest pivot magnitude; ties break on the
    // lowest variable index. No bound can overshoot by more than
    // kRatioRelax, and a cluster of near-parallel rows cannot force the
    // tiny-pivot row to lose the tie in step space, where ratios that
    // differ by far more than a feasibility tolerance look equal.
    double t_flip = kInf;  // entering variable's own bound-to-bound range
    if (std::isfinite(tab.hi[enter]) && std::isfinite(tab.lo[enter]))
      t_flip = tab.hi[enter] - tab.lo[enter];

    double t_relax = kInf;
    for (int r = 0; r < tab.m; ++r) {
      const double d = tab.at(r, enter) * dir;
      const int bv = tab.basis[r];
      double room;
      if (d > kPivotTol) {  // basic value decreases toward its lower bound
        room = tab.xval[bv] - tab.lo[bv];
      } else if (d < -kPivotTol) {  // basic value increases toward its upper
        if (!std::isfinite(tab.hi[bv])) continue;
        room = tab.hi[bv] - tab.xval[bv];
      } else {
        continue;
      }
      const double t = (room + kRatioRelax) / std::fabs(d);
      t_relax = std::min(t_relax, std::max(t, 0.0));
    }

    const double t_limit = std::min(t_flip, t_relax);
    if (!std::isfinite(t_limit)) return IterResult::unbounded;

    double best_t = t_flip;
    double best_d = 0.0;
    int leave_row = -1;  // -1: bound flip of the entering variable
    int leave_var = -1;
    signed char leave_to = (dir > 0) ? kAtUpper : kAtLower;
    for (int r = 0; r < tab.m; ++r) {
      const double d = tab.at(r, enter) * dir;
      const int bv = tab.basis[r];
      double t;
      signed char target;
      if (d > kPivotTol) {
        t = (tab.xval[bv] - tab.lo[bv]) / d;
        target = kAtLower;
      } else if (d < -kPivotTol) {
        if (!std::isfinite(tab.hi[bv])) continue;
        t = (tab.hi[bv] - tab.xval[bv]) / (-d);
        target = kAtUpper;
      } else {
        continue;
      }
      if (t < 0.0) t = 0.0;  // basic value already pinned at (or past) the bound
      if (t > t_limit) continue;
      const double ad = std::fabs(d);
      if (leave_row < 0 || ad > best_d || (ad == best_d && bv < leave_var)) {
        best_t = t;
        best_d = ad;
        leave_row = r;
        leave_var = bv;
        leave_to = target;
      }
    }

    if (leave_row < 0) {
      // Bound flip: entering variable crosses to its opposite bound.
      for (int r = 0; r < tab.m; ++r)
        tab.xval[tab.basis[r]] -= tab.at(r, enter) * dir * best_t;
      tab.stat[enter] = (tab.stat[enter] == kAtLower) ? kAtUpper : kAtLower;
      tab.xval[enter] = (tab.stat[enter] == kAtLower) ? tab.lo[enter] : tab.hi[enter];
      continue;
    }

    const double pivot = tab.at(leave_row, enter);
    if (std::fabs(pivot) <= kPivotTol) return IterResult::breakdown;

    // Update values before rewriting the tableau (needs the old column).
    for (int r = 0; r < tab.m; ++r)
      tab.xval[tab.basis[r]] -= tab.at(r, enter) * dir * best_t;
    tab.xval[enter] =
        ((dir > 0) ? tab.lo[enter] : tab.hi[enter]) + dir * best_t;
    const int leaving = tab.basis[leave_row];
    tab.xval[leaving] = (leave_to == kAtLower) ? tab.lo[leaving] : tab.hi[leaving];

    // Pivot: row reduce so column `enter` becomes the unit vector of leave_row.
    const double inv = 1.0 / pivot;
    for (int j = 0; j < tab.ncols; ++j) tab.at(leave_row, j) *= inv;
    tab.beta[leave_row] *= inv;
    for (int r = 0; r < tab.m; ++r) {
      if (r == leave_row) continue;
      const double f = tab.at(r, enter);
      if (f == 0.0) continue;
      for (int j = 0; j < tab.ncols; ++j) tab.at(r, j) -= f * tab.at(leave_row, j);
      tab.beta[r] -= f * tab.beta[leave_row];
    }
    const double zf = tab.zrow[enter];
    if (zf != 0.0)
      for (int j = 0; j < tab.ncols; ++j) tab.zrow[j] -= zf * tab.at(leave_row, j);

    tab.stat[leaving] = leave_to;
    tab.stat[enter] = kBasic;
    tab.basis[leave_row] = enter;

    if ((pivots & 15) == 15) {
      if (refactor(tab, t0, beta0)) tab.recompute_zrow();
      tab.recompute_basic_values();
      if (!tab.finite_state()) return IterResult::breakdown;
    }
  }
  return IterResult::breakdown;  // iteration cap; Bland's rule should never hit it
}

// One simplex phase with a refreshed finish: after the loop reports optimal,
// refactor and re-check the reduced costs on clean numbers, resuming if the
// drifted tableau stopped early. Bounded rounds keep it terminating.
IterResult run_phase(Tableau& tab, const std::vector<double>& t0,
                     const std::vector<double>& beta0) {
  for (int round = 0; round < 4; ++round) {
    const IterResult res = run_simplex(tab, t0, beta0);
    if (res != IterResult::optimal) return res;
    if (!refactor(tab, t0, beta0)) return IterResult::optimal;
    tab.recompute_basic_values();
    tab.recompute_zrow();
    if (!tab.finite_state()) return IterResult::breakdown;
    bool improving = false;
    for (int j = 0; j < tab.ncols && !improving; ++j) {
      if (tab.stat[j] == kBasic || tab.hi[j] - tab.lo[j] <= kFixedWidth) continue;
      improving = (tab.stat[j] == kAtLower && tab.zrow[j] > kReducedTol) ||
                  (tab.stat[j] == kAtUpper && tab.zrow[j] < -kReducedTol);
    }
    if (!improving) return IterResult::optimal;
  }
  return IterResult::breakdown;
}

}  // namespace

void LpModel::add_row(std::vector<double> coeffs, Sense sense, double rhs) {
  if (coeffs.size() != objective.size())
    throw std::invalid_argument("add_row: coefficient length mismatch");
  for (double v : coeffs)
    if (!std::isfinite(v)) throw std::invalid_argument("add_row: non-finite coefficient");
  if (!std::isfinite(rhs)) throw std::invalid_argument("add_row: non-finite rhs");
  rows.push_back(Row{std::move(coeffs), sense, rhs});
}

void LpModel::validate() const {
  if (var_bounds.size() != objective.size())
    throw std::invalid_argument("lp: bounds/objective length mismatch");
  for (const auto& b : var_bounds) {
    if (!std::isfinite(b.lo))
      throw std::invalid_argument("lp: lower bounds must be finite");
    if (std::isnan(b.hi) || b.lo > b.hi)
      throw std::invalid_argument("lp: lo > hi");
  }
  for (double v : objective)
    if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite objective");
  for (const auto& row : rows) {
    if (row.coeffs.size() != objective.size())
      throw std::invalid_argument("lp: row length mismatch");
    for (double v : row.coeffs)
      if (!std::isfinite(v)) throw std::invalid_argument("lp: non-finite row entry");
    if (!std::isfinite(row.rhs)) throw std::invalid_argument("lp: non-finite rhs");
  }
}

LpModel add_row(LpModel model, std::vector<double> coeffs, Sense sense, double rhs) {
  model.add_row(std::move(coeffs), sense, rhs);
  return model;
}

LpSolution solve(const LpModel& model) {
  model.validate();
  const int n = model.num_vars();
  const int m = model.num_rows();

  Tableau tab;
  tab.m = m;

  // Columns: structural, one slack per row, artificials appended as needed.
  // Slack coefficient is +1 with range [0, inf) for <=, [0, 0] for ==, and
  // -1 with range [0, inf) for >= (a surplus).
  std::vector<int> artificial_of_row(m, -1);
  int ncols = n + m;
  std::vector<double> resid(m);
  std::vector<char> slack_basic(m, 0);
  for (int r = 0; r < m; ++r) {
    double v = model.rows[r].rhs;
    for (int j = 0; j < n; ++j) v -= model.rows[r].coeffs[j] * model.var_bounds[j].lo;
    resid[r] = v;
    switch (model.rows[r].sense) {
      case Sense::le:
        slack_basic[r] = v >= 0.0;
        break;
      case Sense::ge:
        slack_basic[r] = v <= 0.0;
        break;
      case Sense::eq:
        slack_basic[r] = 0;
        break;
    }
    if (!slack_basic[r]) artificial_of_row[r] = ncols++;
  }

  tab.ncols = ncols;
  tab.t.assign(static_cast<std::size_t>(m) * ncols, 0.0);
  tab.beta.resize(m);
  tab.lo.assign(ncols, 0.0);
  tab.hi.assign(ncols, kInf);
  tab.cost.assign(ncols, 0.0);
  tab.zrow.assign(ncols, 0.0);
  tab.basis.resize(m);
  tab.stat.assign(ncols, kAtLower);
  tab.xval.assign(ncols, 0.0);

  for (int j = 0; j < n; ++j) {
    tab.lo[j] = model.var_bounds[j].lo;
    tab.hi[j] = model.var_bounds[j].hi;
  }
  bool any_artificial = false;
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) tab.at(r, j) = model.rows[r].coeffs[j];
    const int s = n + r;
    const double d = (model.rows[r].sense == Sense::ge) ? -1.0 : 1.0;
    tab.at(r, s) = d;
    if (model.rows[r].sense == Sense::eq) tab.hi[s] = 0.0;
    tab.beta[r] = model.rows[r].rhs;

    int basic_col;
    if (slack_basic[r]) {
      basic_col = s;
    } else {
      basic_col = artificial_of_row[r];
      tab.at(r, basic_col) = (resid[r] < 0.0) ? -1.0 : 1.0;
      any_artificial = true;
    }
    // Normalize the row so the initial basic column has coefficient +1.
    if (tab.at(r, basic_col) < 0.0) {
      for (int j = 0; j < ncols; ++j) tab.at(r, j) = -tab.at(r, j);
      tab.beta[r] = -tab.beta[r];
    }
    tab.basis[r] = basic_col;
    tab.stat[basic_col] = kBasic;
  }

  // Initial (pre-pivot) tableau and rhs, the ground truth refactor works from.
  const std::vector<double> t0 = tab.t;
  const std::vector<double> beta0 = tab.beta;

  LpSolution out;
  if (any_artificial) {
    for (int r = 0; r < m; ++r)
      if (artificial_of_row[r] >= 0) tab.cost[artificial_of_row[r]] = -1.0;
    tab.recompute_basic_values();
    tab.recompute_zrow();
    const IterResult p1 = run_phase(tab, t0, beta0);
    if (p1 != IterResult::optimal) return out;  // phase 1 is bounded; anything else is a breakdown
    tab.recompute_basic_values();
    double infeas = 0.0;
    for (int r = 0; r < m; ++r)
      if (artificial_of_row[r] >= 0) infeas += tab.xval[artificial_of_row[r]];
    if (infeas > tol::kRow) {
      out.status = LpStatus::infeasible;
      return out;
    }
    for (int r = 0; r < m; ++r)
      if (artificial_of_row[r] >= 0) tab.hi[artificial_of_row[r]] = 0.0;
    for (int j = 0; j < ncols; ++j) tab.cost[j] = 0.0;
  }

  for (int j = 0; j < n; ++j) tab.cost[j] = model.objective[j];
  tab.recompute_basic_values();
  tab.recompute_zrow();
  const IterResult p2 = run_phase(tab, t0, beta0);
  tab.recompute_basic_values();
  if (p2 == IterResult::breakdown || !tab.finite_state()) return out;
  if (p2 == IterResult::unbounded) {
    out.status = LpStatus::unbounded;
    return out;
  }

  out.x.assign(tab.xval.begin(), tab.xval.begin() + n);
  out.objective_value = 0.0;
  for (int j = 0; j < n; ++j) out.objective_value += model.objective[j] * out.x[j];

  // Safety net: certify the answer instead of trusting the tableau.
  for (int j = 0; j < n; ++j) {
    if (out.x[j] < model.var_bounds[j].lo - tol::kBound ||
        out.x[j] > model.var_bounds[j].hi + tol::kBound)
      return LpSolution{};
  }
  for (int r = 0; r < m; ++r) {
    double lhs = 0.0;
    for (int j = 0; j < n; ++j) lhs += model.rows[r].coeffs[j] * out.x[j];
    const double rhs = model.rows[r].rhs;
    const bool ok = (model.rows[r].sense == Sense::le && lhs <= rhs + tol::kRow) ||
                    (model.rows[r].sense == Sense::ge && lhs >= rhs - tol::kRow) ||
                    (model.rows[r].sense == Sense::eq && std::fabs(lhs - rhs) <= tol::kRow);
    if (!ok) return LpSolution{};
  }
  out.status = LpStatus::optimal;
  return out;
}

}  // namespace drsub::lp
