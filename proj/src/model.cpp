#include "drsub/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drsub/rng.hpp"

namespace drsub {

std::vector<double> BoxBounds::midpoint() const {
  std::vector<double> m(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) m[i] = 0.5 * (lower[i] + upper[i]);
  return m;
}

bool BoxBounds::contains(const std::vector<double>& x, double tolerance) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lower[i] - tolerance || x[i] > upper[i] + tolerance) return false;
  }
  return true;
}

void BoxBounds::validate() const {
  if (lower.size() != upper.size())
    throw std::invalid_argument("box: lower/upper length mismatch");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
      throw std::invalid_argument("box: non-finite bound");
    if (lower[i] > upper[i]) throw std::invalid_argument("box: lower > upper");
  }
}

bool LinearConstraints::satisfied(const std::vector<double>& x,
                                  double tolerance) const {
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < matrix[r].size(); ++j) lhs += matrix[r][j] * x[j];
    if (lhs > rhs[r] + tolerance) return false;
  }
  return true;
}

void LinearConstraints::validate(int n) const {
  if (matrix.size() != rhs.size())
    throw std::invalid_argument("constraints: matrix/rhs length mismatch");
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("constraints: row length mismatch");
    for (double v : row)
      if (!std::isfinite(v)) throw std::invalid_argument("constraints: non-finite entry");
  }
  for (double v : rhs)
    if (!std::isfinite(v)) throw std::invalid_argument("constraints: non-finite rhs");
}

namespace {

std::vector<double> clamp_to_box(const std::vector<double>& x, const BoxBounds& box) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = std::min(std::max(x[i], box.lower[i]), box.upper[i]);
  return y;
}

void require_in_box(const std::vector<double>& x, const BoxBounds& box) {
  if (static_cast<int>(x.size()) != box.dim())
    throw std::domain_error("evaluate: point dimension mismatch");
  if (!box.contains(x, tol::kBoxMembership))
    throw std::domain_error("evaluate: point outside box");
}

}  // namespace

double evaluate(const OracleProblem& problem, const std::vector<double>& x) {
  require_in_box(x, problem.box);
  return problem.value(clamp_to_box(x, problem.box));
}

std::vector<double> evaluate_gradient(const OracleProblem& problem,
                                      const std::vector<double>& x) {
  require_in_box(x, problem.box);
  return problem.gradient(clamp_to_box(x, problem.box));
}

std::vector<double> project_into_box(const std::vector<double>& x,
                                     const BoxBounds& box) {
  if (static_cast<int>(x.size()) != box.dim())
    throw std::invalid_argument("project_into_box: dimension mismatch");
  return clamp_to_box(x, box);
}

SubmodularityReport check_submodular_sample(const OracleProblem& problem,
                                            int trials, std::uint64_t seed) {
  const int n = problem.dimension;
  Rng rng(seed);
  SubmodularityReport report;
  report.trials = trials;

  std::vector<double> x(n), y(n), join(n), meet(n);
  for (int t = 0; t < trials; ++t) {
    for (int i = 0; i < n; ++i) {
      x[i] = rng.uniform(problem.box.lower[i], problem.box.upper[i]);
      y[i] = rng.uniform(problem.box.lower[i], problem.box.upper[i]);
      join[i] = std::max(x[i], y[i]);
      meet[i] = std::min(x[i], y[i]);
    }
    const double lattice = problem.value(join) + problem.value(meet) -
                           problem.value(x) - problem.value(y);
    report.max_lattice_violation = std::max(report.max_lattice_violation, lattice);

    // Second difference along one random axis, with a step that keeps both
    // probe points inside the box.
    const int axis = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const double w = problem.box.width(axis);
    if (w > 0.0) {
      const double h = 0.25 * w * (0.1 + 0.9 * rng.uniform01());
      double c = x[axis];
      c = std::min(std::max(c, problem.box.lower[axis] + h),
                   problem.box.upper[axis] - h);
      std::vector<double> plus = x, mid = x, minus = x;
      plus[axis] = c + h;
      mid[axis] = c;
      minus[axis] = c - h;
      const double second =
          problem.value(plus) + problem.value(minus) - 2.0 * problem.value(mid);
      report.max_concavity_violation =
          std::max(report.max_concavity_violation, second);
    }
  }
  report.pass = report.max_lattice_violation <= tol::kOracleCheck &&
                report.max_concavity_violation <= tol::kOracleCheck;
  return report;
}

}  // namespace drsub
