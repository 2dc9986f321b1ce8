#include "drsub/sbb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <ostream>
#include <stdexcept>

namespace drsub::sbb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

cutplane::Options node_bounder_options(const Options& opts) {
  cutplane::Options cut;
  cut.subproblem_gap = opts.subproblem_gap;
  cut.stall_iters = opts.stall_iters;
  return cut;
}

bool keep_open(double node_ub, double best_lb) {
  return node_ub > best_lb * (1.0 + tol::kPruning);
}

struct BoundedChild {
  Node node;
  cutplane::Result bound;
};

// Runs the cutting plane on a child and folds the cuts it added into the
// child's inherited set, so grandchildren see them too.
BoundedChild bound_node(const OracleProblem& problem, Node node,
                        const cutplane::Options& cut_opts) {
  BoundedChild out;
  out.bound = cutplane::approximate_cutting_plane(problem, node.box,
                                                  node.inherited_cuts, cut_opts);
  node.local_lb = out.bound.lower_bound;
  node.local_ub = out.bound.upper_bound;
  for (const Cut& c : out.bound.cuts) node.inherited_cuts.push_back(c);
  out.node = std::move(node);
  return out;
}

void progress_line(std::ostream* os, const Node& node, double best_lb,
                   double best_ub, std::size_t open_nodes, double elapsed) {
  if (!os) return;
  (*os) << node.id << ',' << node.depth << ',' << node.parent_id << ','
        << node.local_ub << ',' << node.local_lb << ',' << best_lb << ','
        << best_ub << ',' << open_nodes << ',' << elapsed << '\n';
}

}  // namespace

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::gap: return "gap";
    case Termination::time_limit: return "time_limit";
    case Termination::node_limit: return "node_limit";
    case Termination::infeasible: return "infeasible";
  }
  return "unknown";
}

double Result::rel_gap() const {
  if (!feasible()) return kInf;
  return (best_ub - best_lb) / std::max(best_lb, 1e-12);
}

std::pair<Node, Node> partition(const Node& node) {
  const BoxBounds& box = node.box;
  int split = -1;
  double widest = 0.0;
  for (int i = 0; i < box.dim(); ++i)
    if (box.width(i) > widest) {
      widest = box.width(i);
      split = i;
    }
  if (split < 0)
    throw std::domain_error("sbb::partition: box has zero volume");

  const double mid = 0.5 * (box.lower[split] + box.upper[split]);
  Node left;
  left.box = box;
  left.box.upper[split] = mid;
  left.inherited_cuts = node.inherited_cuts;
  left.depth = node.depth + 1;
  left.parent_id = static_cast<std::int64_t>(node.id);
  Node right = left;
  right.box = box;
  right.box.lower[split] = mid;
  return {std::move(left), std::move(right)};
}

Result solve(const OracleProblem& problem, const Options& opts) {
  problem.box.validate();
  problem.constraints.validate(problem.dimension);
  if (!(opts.rel_gap >= 0.0) || opts.workers < 1)
    throw std::invalid_argument("sbb::solve: bad options");
  const auto start = Clock::now();
  const cutplane::Options cut_opts = node_bounder_options(opts);

  Result result;
  std::vector<Node> open;
  std::uint64_t next_id = 0;

  {
    Node root;
    root.box = problem.box;
    root.id = next_id++;
    BoundedChild bounded = bound_node(problem, std::move(root), cut_opts);
    result.nodes_explored = 1;
    if (!bounded.bound.feasible()) {
      result.termination = Termination::infeasible;
      result.best_ub = -kInf;
      result.wall_time_s = elapsed_s(start);
      return result;
    }
    result.best_lb = bounded.bound.lower_bound;
    result.incumbent = bounded.bound.incumbent;
    result.best_ub = std::max(result.best_lb, bounded.node.local_ub);
    const bool keep = keep_open(bounded.node.local_ub, result.best_lb);
    progress_line(opts.progress, bounded.node, result.best_lb, result.best_ub,
                  keep ? 1 : 0, elapsed_s(start));
    if (keep) open.push_back(std::move(bounded.node));
  }

  while (true) {
    double open_ub = -kInf;
    for (const Node& node : open) open_ub = std::max(open_ub, node.local_ub);
    result.best_ub = std::max(result.best_lb, open_ub);

    const double gap =
        (result.best_ub - result.best_lb) / std::max(result.best_lb, 1e-12);
    if (gap <= opts.rel_gap) {
      result.termination = Termination::gap;
      break;
    }
    if (elapsed_s(start) > opts.time_limit_s) {
      result.termination = Termination::time_limit;
      break;
    }
    if (opts.node_limit > 0 && result.nodes_explored >= opts.node_limit) {
      result.termination = Termination::node_limit;
      break;
    }

    // Pop up to `workers` nodes, best bound first (ties: lowest id).
    const int batch = std::min<std::size_t>(opts.workers, open.size());
    std::vector<Node> parents;
    for (int b = 0; b < batch; ++b) {
      auto it = std::max_element(
          open.begin(), open.end(), [](const Node& a, const Node& c) {
            if (a.local_ub != c.local_ub) return a.local_ub < c.local_ub;
            return a.id > c.id;
          });
      parents.push_back(std::move(*it));
      open.erase(it);
    }

    std::vector<Node> children;
    for (const Node& parent : parents) {
      auto [left, right] = partition(parent);
      left.id = next_id++;
      right.id = next_id++;
      children.push_back(std::move(left));
      children.push_back(std::move(right));
    }

    std::vector<BoundedChild> bounded(children.size());
    if (opts.workers > 1 && children.size() > 1) {
      std::vector<std::future<BoundedChild>> tasks;
      tasks.reserve(children.size());
      for (Node& child : children)
        tasks.push_back(std::async(std::launch::async, [&problem, &cut_opts,
                                                        c = std::move(child)]() mutable {
          return bound_node(problem, std::move(c), cut_opts);
        }));
      for (std::size_t i = 0; i < tasks.size(); ++i) bounded[i] = tasks[i].get();
    } else {
      for (std::size_t i = 0; i < children.size(); ++i)
        bounded[i] = bound_node(problem, std::move(children[i]), cut_opts);
    }
    result.nodes_explored += static_cast<std::int64_t>(bounded.size());

    // Deterministic merge in creation order.
    for (BoundedChild& bc : bounded) {
      if (!bc.bound.feasible()) continue;
      if (bc.bound.lower_bound > result.best_lb) {
        result.best_lb = bc.bound.lower_bound;
        result.incumbent = bc.bound.incumbent;
      }
    }
    std::erase_if(open, [&](const Node& node) {
      return !keep_open(node.local_ub, result.best_lb);
    });
    std::vector<bool> kept(bounded.size());
    double new_open_ub = -kInf;
    for (const Node& node : open) new_open_ub = std::max(new_open_ub, node.local_ub);
    std::size_t open_after = open.size();
    for (std::size_t i = 0; i < bounded.size(); ++i) {
      kept[i] = bounded[i].bound.feasible() &&
                keep_open(bounded[i].node.local_ub, result.best_lb);
      if (kept[i]) {
        new_open_ub = std::max(new_open_ub, bounded[i].node.local_ub);
        ++open_after;
      }
    }
    result.best_ub = std::max(result.best_lb, new_open_ub);

    for (const BoundedChild& bc : bounded)
      progress_line(opts.progress, bc.node, result.best_lb, result.best_ub,
                    open_after, elapsed_s(start));
    for (std::size_t i = 0; i < bounded.size(); ++i)
      if (kept[i]) open.push_back(std::move(bounded[i].node));
  }

  result.wall_time_s = elapsed_s(start);
  return result;
}

}  // namespace drsub::sbb
