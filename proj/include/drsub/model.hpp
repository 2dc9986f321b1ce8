#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace drsub {

// Tolerances shared across the solver stack. Kept in one place so the LP,
// cutting-plane and verification layers agree on what "feasible" means.
namespace tol {
inline constexpr double kBoxMembership = 1e-12;  // evaluate() box check
inline constexpr double kBound = 1e-9;           // variable bound feasibility
inline constexpr double kRow = 1e-7;             // linear row feasibility
inline constexpr double kOracleCheck = 1e-7;     // sampled structure checks
inline constexpr double kFdGradient = 1e-5;      // finite-difference match
inline constexpr double kDuplicateSupport = 1e-9;
inline constexpr double kPruning = 1e-9;         // relative incumbent slack
}  // namespace tol

/// Axis-aligned box of interval decision variables.
struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const { return static_cast<int>(lower.size()); }
  double width(int i) const { return upper[i] - lower[i]; }
  std::vector<double> midpoint() const;
  bool contains(const std::vector<double>& x, double tolerance) const;
  // Throws std::invalid_argument on mismatched lengths, lower > upper, or
  // non-finite entries.
  void validate() const;

  static BoxBounds unit(int n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
  }
};

/// Rows of "coeffs . x <= rhs". The feasible region is always box /\ rows.
struct LinearConstraints {
  std::vector<std::vector<double>> matrix;  // m x n
  std::vector<double> rhs;                  // m

  int rows() const { return static_cast<int>(matrix.size()); }
  bool satisfied(const std::vector<double>& x, double tolerance) const;
  void validate(int n) const;
};

/// Grey-box problem: callable value/gradient oracles plus the explicit
/// feasible region. The callables must be pure functions of x (safe to call
/// concurrently); any randomness belongs to instance construction.
struct OracleProblem {
  int dimension = 0;
  std::function<double(const std::vector<double>&)> value;
  std::function<std::vector<double>(const std::vector<double>&)> gradient;
  BoxBounds box;
  LinearConstraints constraints;
};

/// Evaluates the objective. x must lie in the box within tol::kBoxMembership
/// (throws std::domain_error otherwise); it is clamped before the call so the
/// underlying formula never sees coordinates outside the domain.
double evaluate(const OracleProblem& problem, const std::vector<double>& x);

/// Gradient with the same domain handling as evaluate().
std::vector<double> evaluate_gradient(const OracleProblem& problem,
                                      const std::vector<double>& x);

/// Componentwise clamp of x into the box. Idempotent; throws
/// std::invalid_argument on length mismatch.
std::vector<double> project_into_box(const std::vector<double>& x,
                                     const BoxBounds& box);

struct SubmodularityReport {
  int trials = 0;
  // F(join) + F(meet) - F(x) - F(y); positive values violate submodularity.
  double max_lattice_violation = 0.0;
  // Second difference along a random axis; positive values violate
  // componentwise concavity.
  double max_concavity_violation = 0.0;
  bool pass = false;
};

/// Sampled check of the lattice inequality and componentwise concavity.
/// Diagnostic only: a failing report never aborts a solve.
SubmodularityReport check_submodular_sample(const OracleProblem& problem,
                                            int trials, std::uint64_t seed);

}  // namespace drsub
