#include "drsub/envelopes.hpp"

#include <algorithm>
#include <stdexcept>

namespace drsub {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

void require_support_in_box(const std::vector<double>& support, const BoxBounds& box,
                            const char* what) {
  require_same_dim(support.size(), box.lower.size(), what);
  if (!box.contains(support, tol::kBoxMembership))
    throw std::domain_error(std::string(what) + ": support outside box");
}

}  // namespace

double overestimator_value(double f_at_support,
                           const std::vector<double>& grad_at_support,
                           const std::vector<double>& x,
                           const std::vector<double>& support) {
  require_same_dim(x.size(), support.size(), "overestimator_value");
  require_same_dim(grad_at_support.size(), support.size(), "overestimator_value");
  double v = f_at_support;
  for (std::size_t i = 0; i < x.size(); ++i)
    v += grad_at_support[i] * std::max(0.0, x[i] - support[i]);
  return v;
}

double overestimator_value(const OracleProblem& problem,
                           const std::vector<double>& x,
                           const std::vector<double>& support) {
  return overestimator_value(evaluate(problem, support),
                             evaluate_gradient(problem, support), x, support);
}

Cut envelope_cut(double f_at_support, std::vector<double> grad_at_support,
                 std::vector<double> support, BoxBounds box) {
  require_support_in_box(support, box, "envelope_cut");
  const int n = box.dim();
  for (double& g : grad_at_support) g = std::max(0.0, g);

  Cut cut;
  cut.kind = CutKind::envelope;
  cut.f_at_support = f_at_support;
  cut.coeffs.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double w = box.width(i);
    if (w > 0.0)
      cut.coeffs[i] = grad_at_support[i] * (box.upper[i] - support[i]) / w;
  }
  cut.intercept = f_at_support;
  for (int i = 0; i < n; ++i) cut.intercept -= cut.coeffs[i] * box.lower[i];
  cut.support = std::move(support);
  cut.grad_at_support = std::move(grad_at_support);
  cut.box = std::move(box);
  return cut;
}

Cut envelope_cut(const OracleProblem& problem, const std::vector<double>& support,
                 const BoxBounds& box) {
  return envelope_cut(evaluate(problem, support), evaluate_gradient(problem, support),
                      support, box);
}

double cut_value(const Cut& cut, const std::vector<double>& x) {
  require_same_dim(x.size(), cut.support.size(), "cut_value");
  if (cut.kind == CutKind::envelope) {
    double v = cut.intercept;
    for (std::size_t i = 0; i < x.size(); ++i) v += cut.coeffs[i] * x[i];
    return v;
  }
  return overestimator_value(cut.f_at_support, cut.grad_at_support, x, cut.support);
}

double single_cut_error_bound(double /*f_at_support*/,
                              const std::vector<double>& grad_at_support,
                              const std::vector<double>& support,
                              const BoxBounds& box) {
  require_support_in_box(support, box, "single_cut_error_bound");
  double bound = 0.0;
  for (int i = 0; i < box.dim(); ++i) {
    const double w = box.width(i);
    if (w <= 0.0) continue;
    bound += std::max(0.0, grad_at_support[i]) * (box.upper[i] - support[i]) *
             (support[i] - box.lower[i]) / w;
  }
  return bound;
}

double single_cut_error_bound(const OracleProblem& problem,
                              const std::vector<double>& support,
                              const BoxBounds& box) {
  return single_cut_error_bound(0.0, evaluate_gradient(problem, support), support, box);
}

double coarse_error_bound(const std::vector<double>& grad_at_support,
                          const BoxBounds& box) {
  require_same_dim(grad_at_support.size(), box.lower.size(), "coarse_error_bound");
  double bound = 0.0;
  for (int i = 0; i < box.dim(); ++i)
    bound += std::max(0.0, grad_at_support[i]) * box.width(i);
  return bound;
}

double coarse_error_bound(const OracleProblem& problem,
                          const std::vector<double>& support,
                          const BoxBounds& box) {
  require_support_in_box(support, box, "coarse_error_bound");
  return coarse_error_bound(evaluate_gradient(problem, support), box);
}

}  // namespace drsub
