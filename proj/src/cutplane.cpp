#include "drsub/cutplane.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace drsub::cutplane {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGradBlowup = 1e8;
constexpr double kNudge = 1e-6;
constexpr double kUbImprovementTol = 1e-9;
constexpr int kDefaultApproxIters = 200;

void require_subbox(const BoxBounds& box, const BoxBounds& outer) {
  box.validate();
  if (box.dim() != outer.dim())
    throw std::invalid_argument("cutplane: box dimension mismatch");
  for (int i = 0; i < box.dim(); ++i)
    if (box.lower[i] < outer.lower[i] - tol::kBound ||
        box.upper[i] > outer.upper[i] + tol::kBound)
      throw std::invalid_argument("cutplane: box not contained in problem box");
}

// Hypograph formulations shift nothing: eta >= 0 is only sound when the
// objective is non-negative somewhere, which all supported families satisfy
// at the lower corner.
void require_nonneg_at_lower(const OracleProblem& problem, const BoxBounds& box) {
  if (evaluate(problem, box.lower) < -tol::kRow)
    throw std::domain_error("cutplane: objective must be non-negative at the box lower corner");
}

// Support for a cut: gradient components exploding (e.g. d sqrt(x)/dx at 0)
// get the support nudged one millionth of the box inward before the cut is
// built. Returns the point actually used.
std::vector<double> nudged_support(const OracleProblem& problem, const BoxBounds& box,
                                   std::vector<double> support,
                                   double& f_out, std::vector<double>& grad_out) {
  f_out = evaluate(problem, support);
  grad_out = evaluate_gradient(problem, support);
  double worst = 0.0;
  for (double g : grad_out) worst = std::max(worst, std::fabs(g));
  if (std::isfinite(worst) && worst <= kGradBlowup) return support;
  for (int i = 0; i < box.dim(); ++i)
    support[i] = std::min(support[i] + kNudge * box.width(i), box.upper[i]);
  f_out = evaluate(problem, support);
  grad_out = evaluate_gradient(problem, support);
  return support;
}

bool is_duplicate(const std::vector<std::vector<double>>& supports,
                  const std::vector<double>& candidate, double tolerance) {
  for (const auto& s : supports) {
    bool same = true;
    for (std::size_t i = 0; i < s.size() && same; ++i)
      same = std::fabs(s[i] - candidate[i]) <= tolerance;
    if (same) return true;
  }
  return false;
}

void trace_line(std::ostream* os, int iter, double lb, double ub,
                const std::vector<double>& support) {
  if (!os) return;
  (*os) << iter << ',' << lb << ',' << ub;
  for (double v : support) (*os) << ',' << v;
  (*os) << '\n';
}

// Base LP over variables [x_0..x_{n-1}, eta]: box bounds on x, eta >= 0,
// problem rows extended with a zero eta column.
lp::LpModel base_model(const OracleProblem& problem, const BoxBounds& box) {
  const int n = box.dim();
  lp::LpModel model;
  model.objective.assign(n + 1, 0.0);
  model.objective[n] = 1.0;
  model.var_bounds.resize(n + 1);
  for (int i = 0; i < n; ++i) model.var_bounds[i] = {box.lower[i], box.upper[i]};
  model.var_bounds[n] = {0.0, kInf};
  for (int r = 0; r < problem.constraints.rows(); ++r) {
    std::vector<double> row = problem.constraints.matrix[r];
    row.push_back(0.0);
    model.add_row(std::move(row), lp::Sense::le, problem.constraints.rhs[r]);
  }
  return model;
}

// eta <= intercept + coeffs . x  as an LP row over [x, eta].
void add_envelope_row(lp::LpModel& model, const Cut& cut) {
  const int n = static_cast<int>(cut.coeffs.size());
  std::vector<double> row(n + 1, 0.0);
  for (int i = 0; i < n; ++i) row[i] = -cut.coeffs[i];
  row[n] = 1.0;
  model.add_row(std::move(row), lp::Sense::le, cut.intercept);
}

Result infeasible_result() {
  Result r;
  r.lower_bound = -kInf;
  r.upper_bound = -kInf;
  r.termination = Termination::infeasible;
  return r;
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::duplicate_cut: return "duplicate_cut";
    case Termination::stall: return "stall";
    case Termination::rel_gap: return "rel_gap";
    case Termination::iter_limit: return "iter_limit";
    case Termination::infeasible: return "infeasible";
  }
  return "unknown";
}

Result approximate_cutting_plane(const OracleProblem& problem, const BoxBounds& box,
                                 const std::vector<Cut>& inherited,
                                 const Options& opts) {
  require_subbox(box, problem.box);
  require_nonneg_at_lower(problem, box);
  const int n = box.dim();
  const int max_iters =
      opts.max_iterations > 0 ? opts.max_iterations : kDefaultApproxIters;

  lp::LpModel model = base_model(problem, box);
  for (const Cut& cut : inherited) add_envelope_row(model, cut);

  Result result;
  std::vector<std::vector<double>> supports;

  // Seed cut at the box midpoint; without at least one cut eta is unbounded.
  {
    double f;
    std::vector<double> grad;
    std::vector<double> s = nudged_support(problem, box, box.midpoint(), f, grad);
    Cut seed = envelope_cut(f, std::move(grad), s, box);
    supports.push_back(seed.support);
    add_envelope_row(model, seed);
    result.cuts.push_back(std::move(seed));
  }

  int stall_count = 0;
  while (true) {
    ++result.iterations;
    const lp::LpSolution sol = lp::solve(model);
    if (sol.status == lp::LpStatus::infeasible) {
      Result r = infeasible_result();
      r.iterations = result.iterations;
      return r;
    }
    if (sol.status != lp::LpStatus::optimal)
      throw std::runtime_error("approximate_cutting_plane: LP solver failure");

    const double prev_ub = result.upper_bound;
    result.upper_bound = std::min(result.upper_bound, sol.objective_value);

    std::vector<double> x_hat =
        project_into_box({sol.x.begin(), sol.x.begin() + n}, box);
    const double fx = evaluate(problem, x_hat);
    if (fx > result.lower_bound) {
      result.lower_bound = fx;
      result.incumbent = x_hat;
    }
    trace_line(opts.trace, result.iterations, result.lower_bound,
               result.upper_bound, x_hat);

    if (is_duplicate(supports, x_hat, opts.duplicate_tol)) {
      result.termination = Termination::duplicate_cut;
      break;
    }
    if (result.upper_bound - result.lower_bound <=
        opts.subproblem_gap * std::max(result.lower_bound, 1e-12)) {
      result.termination = Termination::rel_gap;
      break;
    }
    if (std::isfinite(prev_ub)) {
      const double improvement = prev_ub - result.upper_bound;
      if (improvement > kUbImprovementTol * std::max(1.0, std::fabs(prev_ub)))
        stall_count = 0;
      else
        ++stall_count;
      if (opts.stall_iters > 0 && stall_count >= opts.stall_iters) {
        result.termination = Termination::stall;
        break;
      }
    }
    if (result.iterations >= max_iters) {
      result.termination = Termination::iter_limit;
      break;
    }

    double f;
    std::vector<double> grad;
    std::vector<double> s =
        nudged_support(problem, box, std::move(x_hat), f, grad);
    Cut cut = envelope_cut(f, std::move(grad), s, box);
    supports.push_back(cut.support);
    add_envelope_row(model, cut);
    result.cuts.push_back(std::move(cut));
  }
  return result;
}

ReluGraphVars build_relu_graph_rows(lp::LpModel& model, int x_col, double support,
                                    double lo, double hi) {
  if (x_col < 0 || x_col >= model.num_vars())
    throw std::invalid_argument("build_relu_graph_rows: bad x column");
  if (!(lo <= support && support <= hi))
    throw std::domain_error("build_relu_graph_rows: support outside [lo, hi]");

  ReluGraphVars vars;
  vars.y_col = model.num_vars();
  vars.z_col = vars.y_col + 1;
  model.objective.insert(model.objective.end(), {0.0, 0.0});
  model.var_bounds.push_back({0.0, std::max(0.0, hi - support)});
  model.var_bounds.push_back({0.0, 1.0});
  for (auto& row : model.rows) row.coeffs.insert(row.coeffs.end(), {0.0, 0.0});

  const int ncols = model.num_vars();
  auto row = [&](double yc, double xc, double zc) {
    std::vector<double> r(ncols, 0.0);
    r[vars.y_col] = yc;
    r[x_col] = xc;
    r[vars.z_col] = zc;
    return r;
  };
  // y <= x - lo (1 - z) - support z
  model.add_row(row(1.0, -1.0, support - lo), lp::Sense::le, -lo);
  // y <= (hi - support) z
  model.add_row(row(1.0, 0.0, -(hi - support)), lp::Sense::le, 0.0);
  // y >= x - support
  model.add_row(row(-1.0, 1.0, 0.0), lp::Sense::le, support);
  return vars;
}

namespace {

struct MilpResult {
  bool feasible = false;
  double objective = -kInf;
  std::vector<double> x;
};

// Depth-first branch-and-bound over the binary columns. Deterministic:
// branching variable is the lowest-index fractional binary, zero branch
// first, incumbent replaced only on strict improvement.
class BinaryBnb {
 public:
  BinaryBnb(lp::LpModel& model, const std::vector<int>& binaries)
      : model_(model), binaries_(binaries) {}

  MilpResult run() {
    dive();
    return best_;
  }

 private:
  static constexpr double kIntTol = 1e-6;
  static constexpr long kNodeCap = 1000000;

  void dive() {
    if (++nodes_ > kNodeCap)
      throw std::runtime_error("exact_cutting_plane: branch-and-bound node cap hit");
    const lp::LpSolution sol = lp::solve(model_);
    if (sol.status == lp::LpStatus::infeasible) return;
    if (sol.status != lp::LpStatus::optimal)
      throw std::runtime_error("exact_cutting_plane: LP solver failure");
    if (best_.feasible && sol.objective_value <= best_.objective + 1e-9) return;

    int frac = -1;
    for (int col : binaries_) {
      const double v = sol.x[col];
      if (std::fabs(v - std::round(v)) > kIntTol) {
        frac = col;
        break;
      }
    }
    if (frac < 0) {
      best_.feasible = true;
      best_.objective = sol.objective_value;
      best_.x = sol.x;
      return;
    }
    const lp::VarBounds saved = model_.var_bounds[frac];
    model_.var_bounds[frac] = {0.0, 0.0};
    dive();
    model_.var_bounds[frac] = {1.0, 1.0};
    dive();
    model_.var_bounds[frac] = saved;
  }

  lp::LpModel& model_;
  const std::vector<int>& binaries_;
  MilpResult best_;
  long nodes_ = 0;
};

}  // namespace

Result exact_cutting_plane(const OracleProblem& problem, const BoxBounds& box,
                           double epsilon, const Options& opts) {
  require_subbox(box, problem.box);
  require_nonneg_at_lower(problem, box);
  if (!(epsilon >= 0.0))
    throw std::invalid_argument("exact_cutting_plane: epsilon must be >= 0");
  const int n = box.dim();
  const int max_iters = opts.max_iterations > 0
                            ? opts.max_iterations
                            : std::max(1, opts.binary_budget / n);
  if (static_cast<long>(n) * max_iters > opts.binary_budget)
    throw std::invalid_argument(
        "exact_cutting_plane: n * max_iterations exceeds the binary budget");

  lp::LpModel model = base_model(problem, box);
  std::vector<int> binaries;
  std::vector<std::vector<double>> supports;

  Result result;
  auto add_cut_block = [&](const std::vector<double>& support, double f,
                           const std::vector<double>& grad) {
    // eta - sum_i g_i y_i <= F(support), with y_i = [x_i - support_i]^+.
    std::vector<double> clamped = grad;
    for (double& g : clamped) g = std::max(0.0, g);
    std::vector<int> ycols(n);
    for (int i = 0; i < n; ++i) {
      const ReluGraphVars v = build_relu_graph_rows(model, i, support[i],
                                                    box.lower[i], box.upper[i]);
      ycols[i] = v.y_col;
      binaries.push_back(v.z_col);
    }
    std::vector<double> row(model.num_vars(), 0.0);
    row[n] = 1.0;  // eta column
    for (int i = 0; i < n; ++i) row[ycols[i]] = -clamped[i];
    model.add_row(std::move(row), lp::Sense::le, f);

    Cut cut;
    cut.kind = CutKind::exact_relu;
    cut.support = support;
    cut.f_at_support = f;
    cut.grad_at_support = std::move(clamped);
    cut.box = box;
    supports.push_back(support);
    result.cuts.push_back(std::move(cut));
  };

  {
    double f;
    std::vector<double> grad;
    std::vector<double> s = nudged_support(problem, box, box.midpoint(), f, grad);
    add_cut_block(s, f, grad);
  }

  while (true) {
    ++result.iterations;
    BinaryBnb bnb(model, binaries);
    const MilpResult sol = bnb.run();
    if (!sol.feasible) {
      Result r = infeasible_result();
      r.iterations = result.iterations;
      return r;
    }

    result.upper_bound = std::min(result.upper_bound, sol.objective);
    std::vector<double> x_hat =
        project_into_box({sol.x.begin(), sol.x.begin() + n}, box);
    const double fx = evaluate(problem, x_hat);
    if (fx > result.lower_bound) {
      result.lower_bound = fx;
      result.incumbent = x_hat;
    }
    trace_line(opts.trace, result.iterations, result.lower_bound,
               result.upper_bound, x_hat);

    if (result.upper_bound - result.lower_bound <= epsilon) {
      result.termination = Termination::rel_gap;
      break;
    }
    if (is_duplicate(supports, x_hat, opts.duplicate_tol)) {
      result.termination = Termination::duplicate_cut;
      break;
    }
    if (result.iterations >= max_iters) {
      result.termination = Termination::iter_limit;
      break;
    }

    double f;
    std::vector<double> grad;
    std::vector<double> s =
        nudged_support(problem, box, std::move(x_hat), f, grad);
    add_cut_block(s, f, grad);
  }
  return result;
}

}  // namespace drsub::cutplane
