#include "drsub/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

namespace drsub::verify {

namespace {

constexpr double kMaxGridPoints = 1e8;

std::vector<std::vector<double>> lattice_axes(const BoxBounds& box, double step) {
  std::vector<std::vector<double>> axes(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    const double lo = box.lower[i];
    const double hi = box.upper[i];
    auto& axis = axes[i];
    const double width = hi - lo;
    const auto count = static_cast<std::uint64_t>(std::floor(width / step + 1e-9));
    for (std::uint64_t k = 0; k <= count; ++k) {
      const double v = lo + static_cast<double>(k) * step;
      if (v <= hi + 1e-12) axis.push_back(std::min(v, hi));
    }
    // The upper corner always participates, even when the step overshoots it.
    if (axis.empty() || hi - axis.back() > 1e-12) axis.push_back(hi);
    if (axis.size() >= 2 && axis.back() - axis[axis.size() - 2] <= 1e-12)
      axis.erase(axis.end() - 2);
  }
  return axes;
}

struct ChunkBest {
  bool found = false;
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  std::uint64_t order = 0;  // lattice order of the best point, for stable ties
  std::uint64_t evaluated = 0;
};

ChunkBest scan_chunk(const OracleProblem& problem,
                     const std::vector<std::vector<double>>& axes,
                     std::size_t lead_begin, std::size_t lead_end) {
  const int n = problem.dimension;
  ChunkBest best;
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> x(n);
  std::uint64_t tail = 1;
  for (int i = 1; i < n; ++i) tail *= axes[i].size();

  for (std::size_t lead = lead_begin; lead < lead_end; ++lead) {
    x[0] = axes[0][lead];
    std::fill(idx.begin(), idx.end(), 0);
    for (int i = 1; i < n; ++i) x[i] = axes[i][0];
    for (std::uint64_t t = 0; t < tail; ++t) {
      if (problem.constraints.satisfied(x, tol::kRow)) {
        const double v = problem.value(x);
        ++best.evaluated;
        if (!best.found || v > best.value) {
          best.found = true;
          best.value = v;
          best.x = x;
          best.order = static_cast<std::uint64_t>(lead) * tail + t;
        }
      }
      // Odometer increment over dimensions 1..n-1.
      for (int i = n - 1; i >= 1; --i) {
        if (++idx[i] < axes[i].size()) {
          x[i] = axes[i][idx[i]];
          break;
        }
        idx[i] = 0;
        x[i] = axes[i][0];
      }
    }
  }
  return best;
}

}  // namespace

GridOracleResult grid_maximize(const OracleProblem& problem, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid_maximize: step must be positive");
  problem.box.validate();
  const int n = problem.dimension;
  if (n == 0) throw std::invalid_argument("grid_maximize: empty problem");

  const auto axes = lattice_axes(problem.box, step);
  double total = 1.0;
  for (const auto& a : axes) total *= static_cast<double>(a.size());
  if (total > kMaxGridPoints)
    throw std::domain_error("grid_maximize: lattice exceeds the 1e8 point guard");

  // Embarrassingly parallel over the leading dimension; merge prefers the
  // higher value and, on ties, the earliest lattice order.
  const std::size_t lead = axes[0].size();
  std::size_t workers = std::min<std::size_t>(
      {lead, std::max(1u, std::thread::hardware_concurrency()), 8});
  if (total < 65536.0) workers = 1;

  std::vector<ChunkBest> parts;
  if (workers <= 1) {
    parts.push_back(scan_chunk(problem, axes, 0, lead));
  } else {
    std::vector<std::future<ChunkBest>> futs;
    const std::size_t per = (lead + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * per;
      const std::size_t e = std::min(lead, b + per);
      if (b >= e) break;
      futs.push_back(std::async(std::launch::async, [&, b, e] {
        return scan_chunk(problem, axes, b, e);
      }));
    }
    for (auto& f : futs) parts.push_back(f.get());
  }

  GridOracleResult out;
  out.grid_step = step;
  bool found = false;
  double best_v = 0.0;
  std::uint64_t best_order = 0;
  for (const auto& p : parts) {
    out.points_evaluated += p.evaluated;
    if (!p.found) continue;
    if (!found || p.value > best_v || (p.value == best_v && p.order < best_order)) {
      found = true;
      best_v = p.value;
      best_order = p.order;
      out.best_x = p.x;
      out.best_value = p.value;
    }
  }
  if (!found)
    throw std::runtime_error("grid_maximize: no feasible lattice point");
  return out;
}

namespace {

// Solves the n x n system rows(eqs) . x = rhs by Gaussian elimination with
// partial pivoting. Returns false when near-singular.
bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-10) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a[r][j] -= f * a[col][j];
      b[r] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double v = b[r];
    for (int j = r + 1; j < n; ++j) v -= a[r][j] * x[j];
    x[r] = v / a[r][r];
  }
  return true;
}

}  // namespace

VertexEnumResult vertex_enumerate_lp(const lp::LpModel& model) {
  model.validate();
  const int n = model.num_vars();
  const int m = model.num_rows();
  if (n > 8 || m > 12)
    throw std::domain_error("vertex_enumerate_lp: guarded to <= 8 vars, <= 12 rows");

  // Candidate tight constraints: every row as equality, every finite bound.
  struct Candidate {
    std::vector<double> coeffs;
    double rhs;
  };
  std::vector<Candidate> cands;
  for (const auto& row : model.rows) cands.push_back({row.coeffs, row.rhs});
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    cands.push_back({e, model.var_bounds[j].lo});
    if (std::isfinite(model.var_bounds[j].hi)) cands.push_back({e, model.var_bounds[j].hi});
  }

  VertexEnumResult out;
  const int k = static_cast<int>(cands.size());
  std::vector<int> pick(n);
  std::vector<std::vector<double>> a(n);
  std::vector<double> b(n), x;

  // Enumerate all n-subsets of candidates in lexicographic order.
  for (int i = 0; i < n; ++i) pick[i] = i;
  if (k < n) return out;
  while (true) {
    for (int i = 0; i < n; ++i) {
      a[i] = cands[pick[i]].coeffs;
      b[i] = cands[pick[i]].rhs;
    }
    if (solve_square(a, b, x)) {
      bool ok = true;
      for (int j = 0; j < n && ok; ++j)
        ok = x[j] >= model.var_bounds[j].lo - tol::kBound &&
             x[j] <= model.var_bounds[j].hi + tol::kBound;
      for (int r = 0; r < m && ok; ++r) {
        double lhs = 0.0;
        for (int j = 0; j < n; ++j) lhs += model.rows[r].coeffs[j] * x[j];
        const double rhs = model.rows[r].rhs;
        switch (model.rows[r].sense) {
          case lp::Sense::le: ok = lhs <= rhs + tol::kRow; break;
          case lp::Sense::ge: ok = lhs >= rhs - tol::kRow; break;
          case lp::Sense::eq: ok = std::fabs(lhs - rhs) <= tol::kRow; break;
        }
      }
      if (ok) {
        double v = 0.0;
        for (int j = 0; j < n; ++j) v += model.objective[j] * x[j];
        if (!out.feasible || v > out.best_value) {
          out.feasible = true;
          out.best_value = v;
          out.best_x = x;
        }
      }
    }
    // Next combination.
    int i = n - 1;
    while (i >= 0 && pick[i] == k - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

FdGradientReport fd_gradient_check(const OracleProblem& problem,
                                   const std::vector<double>& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient_check: h must be positive");
  for (int i = 0; i < problem.dimension; ++i) {
    if (x[i] - h < problem.box.lower[i] - tol::kBoxMembership ||
        x[i] + h > problem.box.upper[i] + tol::kBoxMembership)
      throw std::domain_error("fd_gradient_check: x must be at least h inside the box");
  }
  const std::vector<double> g = problem.gradient(x);
  FdGradientReport report;
  std::vector<double> probe = x;
  for (int i = 0; i < problem.dimension; ++i) {
    probe[i] = x[i] + h;
    const double fp = problem.value(probe);
    probe[i] = x[i] - h;
    const double fm = problem.value(probe);
    probe[i] = x[i];
    const double fd = (fp - fm) / (2.0 * h);
    const double rel = std::fabs(fd - g[i]) / std::max(1.0, std::fabs(g[i]));
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_component = i;
    }
  }
  return report;
}

}  // namespace drsub::verify
