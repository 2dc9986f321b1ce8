#pragma once

#include <vector>

#include "drsub/model.hpp"

namespace drsub {

enum class CutKind {
  exact_relu,  // F(s) + grad . [x - s]^+ ; piecewise linear, needs binaries
  envelope,    // affine concave envelope of the above over the cut's box
};

/// One hypograph cut. Envelope cuts are affine (value = intercept +
/// coeffs . x); exact cuts keep the rectified form. Cuts remember the box
/// they were built on: a cut stays valid on any sub-box of it, so children
/// may inherit cuts without re-tightening.
struct Cut {
  CutKind kind = CutKind::envelope;
  std::vector<double> support;
  double f_at_support = 0.0;
  std::vector<double> grad_at_support;  // clamped to >= 0 componentwise
  std::vector<double> coeffs;           // envelope slope, zero on zero-width dims
  double intercept = 0.0;
  BoxBounds box;
};

/// First-order overestimator F(support) + grad . [x - support]^+. Valid upper
/// bound anywhere in the box for non-decreasing DR-submodular F, and exactly
/// F(support) at x = support.
double overestimator_value(double f_at_support,
                           const std::vector<double>& grad_at_support,
                           const std::vector<double>& x,
                           const std::vector<double>& support);
double overestimator_value(const OracleProblem& problem,
                           const std::vector<double>& x,
                           const std::vector<double>& support);

/// Concave (triangle) envelope of the overestimator over `box`:
///   coeffs[i] = grad[i] * (u[i] - s[i]) / (u[i] - l[i])   (0 if u[i] == l[i])
///   intercept = F(s) - coeffs . l
/// Negative gradient components are clamped to zero first; on monotone
/// problems they can only be numerical noise and a negative slope would break
/// validity of the envelope at the lower corner.
Cut envelope_cut(double f_at_support, std::vector<double> grad_at_support,
                 std::vector<double> support, BoxBounds box);
Cut envelope_cut(const OracleProblem& problem, const std::vector<double>& support,
                 const BoxBounds& box);

/// Cut value at x (affine for envelope cuts, rectified otherwise).
double cut_value(const Cut& cut, const std::vector<double>& x);

/// Largest possible envelope-minus-function gap for a single cut:
///   grad . ((u - s)/(u - l) * (s - l)), attained at x = support.
double single_cut_error_bound(double f_at_support,
                              const std::vector<double>& grad_at_support,
                              const std::vector<double>& support,
                              const BoxBounds& box);
double single_cut_error_bound(const OracleProblem& problem,
                              const std::vector<double>& support,
                              const BoxBounds& box);

/// Width-based relaxation of the bound above: grad . (u - l). Shrinks to zero
/// linearly with the box, which is what drives branch-and-bound convergence.
double coarse_error_bound(const std::vector<double>& grad_at_support,
                          const BoxBounds& box);
double coarse_error_bound(const OracleProblem& problem,
                          const std::vector<double>& support,
                          const BoxBounds& box);

}  // namespace drsub
