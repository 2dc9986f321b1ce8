#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <utility>
#include <vector>

#include "drsub/cutplane.hpp"
#include "drsub/model.hpp"

namespace drsub::sbb {

enum class Termination { gap, time_limit, node_limit, infeasible };

const char* termination_name(Termination t);

/// One search region: its box, every cut known to be valid on it, and the
/// bounds its own cutting-plane run produced.
struct Node {
  BoxBounds box;
  std::vector<Cut> inherited_cuts;
  double local_lb = -std::numeric_limits<double>::infinity();
  double local_ub = std::numeric_limits<double>::infinity();
  int depth = 0;
  std::uint64_t id = 0;
  std::int64_t parent_id = -1;  // -1 for the root
};

struct Options {
  double rel_gap = 0.05;
  double time_limit_s = 3600.0;
  std::int64_t node_limit = 0;  // 0 = unlimited
  int workers = 1;
  int stall_iters = 5;          // forwarded to the node bounder
  double subproblem_gap = 1e-3; // forwarded to the node bounder
  std::ostream* progress = nullptr;
  // CSV: node_id, depth, parent_id, node_ub, node_lb, best_lb, best_ub,
  //      open_nodes, elapsed_s
};

struct Result {
  double best_lb = -std::numeric_limits<double>::infinity();
  double best_ub = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent;
  std::int64_t nodes_explored = 0;
  double wall_time_s = 0.0;
  Termination termination = Termination::infeasible;

  bool feasible() const { return termination != Termination::infeasible; }
  double rel_gap() const;
};

/// Global maximization of a non-decreasing DR-submodular objective over
/// box /\ {Ax <= b} by spatial branch-and-bound. Every node is bounded with
/// approximate_cutting_plane (children inherit all parent cuts); the open
/// node with the largest upper bound is bisected along its widest edge. The
/// returned best_ub is a valid global upper bound and best_lb is attained by
/// the returned incumbent. With workers = 1 the run is deterministic; more
/// workers bound sibling batches concurrently and may explore a different
/// number of nodes, but the gap contract is unchanged.
Result solve(const OracleProblem& problem, const Options& opts = {});

/// Midpoint bisection along the widest dimension (ties: lowest index). Both
/// children inherit the parent's cuts; their union is the parent box. Throws
/// std::domain_error when every dimension has zero width.
std::pair<Node, Node> partition(const Node& node);

}  // namespace drsub::sbb
