#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "drsub/envelopes.hpp"
#include "drsub/lp.hpp"
#include "drsub/model.hpp"

namespace drsub::cutplane {

enum class Termination {
  duplicate_cut,  // main problem re-proposed an existing support
  stall,          // upper bound flat for `stall_iters` iterations
  rel_gap,        // gap criterion met
  iter_limit,
  infeasible,     // box /\ {Ax <= b} is empty
};

const char* termination_name(Termination t);

struct Options {
  double subproblem_gap = 1e-3;  // relative (UB - LB) / max(LB, eps) target
  int stall_iters = 5;           // 0 disables stall detection
  int max_iterations = 0;        // 0 = resolve a sensible per-solver default
  double duplicate_tol = tol::kDuplicateSupport;
  int binary_budget = 60;        // exact solver: n * iterations must fit
  std::ostream* trace = nullptr; // CSV: iter, LB, UB, support components
};

struct Result {
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent;
  std::vector<Cut> cuts;  // cuts added by this run, in creation order
  int iterations = 0;
  Termination termination = Termination::infeasible;

  bool feasible() const { return termination != Termination::infeasible; }
};

/// LP-based cutting-plane bounding of max F over box /\ {Ax <= b}. Starts
/// from an envelope cut at the box midpoint, then repeatedly solves
///   max eta  s.t.  eta <= cut_k(x), Ax <= b, x in box
/// and cuts at the LP solution. Inherited cuts (from enclosing boxes) enter
/// the LP but never the duplicate-support set. Bounds are monotone: the
/// reported UB is the running minimum of LP values, LB the running maximum of
/// true objective values at visited supports.
Result approximate_cutting_plane(const OracleProblem& problem, const BoxBounds& box,
                                 const std::vector<Cut>& inherited,
                                 const Options& opts);

/// Exact variant: keeps every overestimator cut in rectified form, encoding
/// y = [x - support]^+ with one binary per (dimension, cut). The main problem
/// is solved by an internal branch-and-bound over those binaries. Stops when
/// UB - LB <= epsilon. Refuses instances whose binary count n * iterations
/// would exceed opts.binary_budget (std::invalid_argument).
Result exact_cutting_plane(const OracleProblem& problem, const BoxBounds& box,
                           double epsilon, const Options& opts);

struct ReluGraphVars {
  int y_col = -1;  // continuous, y = [x - support]^+ once z is binary
  int z_col = -1;  // indicator of x >= support
};

/// Appends to `model` the y/z columns and the three rows tying them to the
/// x-column `x_col` over [lo, hi]:
///   y <= x - lo (1 - z) - support z,  y <= (hi - support) z,  y >= x - support
/// With z fixed to 1 they force y = x - support (so x >= support); with z = 0
/// they force y = 0 (so x <= support).
ReluGraphVars build_relu_graph_rows(lp::LpModel& model, int x_col, double support,
                                    double lo, double hi);

}  // namespace drsub::cutplane
