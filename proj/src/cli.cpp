#include "drsub/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "drsub/cutplane.hpp"
#include "drsub/instance.hpp"
#include "drsub/model.hpp"
#include "drsub/rng.hpp"
#include "drsub/sbb.hpp"
#include "drsub/verify.hpp"

namespace drsub::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_text_file(path));
  } catch (const std::exception& e) {
    throw std::invalid_argument("cannot load instance '" + path + "': " + e.what());
  }
}

void append_record(const std::string& path, const RunRecord& rec) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const bool fresh = !fs::exists(path, ec) || fs::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::invalid_argument("cannot open results file '" + path + "'");
  if (fresh) out << kResultsHeader << '\n';
  out << to_csv_row(rec) << '\n';
}

struct SolveArgs {
  std::string instance_path;
  std::string solver;
  double rel_gap = 0.05;
  double time_limit = 3600.0;
  int stall = 5;
  double subgap = 1e-3;
  int workers = 1;
  int max_iters = 0;
  std::int64_t node_limit = 0;
  double epsilon = 0.01;
  double grid_step = 0.01;
  std::string trace_path;
  std::string results_path;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  static const char* kSolvers[] = {"sbb", "approx-cp", "exact-cp", "grid"};
  if (std::find(std::begin(kSolvers), std::end(kSolvers), a.solver) ==
      std::end(kSolvers))
    throw std::invalid_argument("unknown solver '" + a.solver +
                                "' (expected sbb, approx-cp, exact-cp or grid)");
  const Instance inst = load_instance(a.instance_path);
  const OracleProblem problem = make_oracle(inst);

  std::ofstream trace_file;
  if (!a.trace_path.empty()) {
    trace_file.open(a.trace_path);
    if (!trace_file)
      throw std::invalid_argument("cannot open trace file '" + a.trace_path + "'");
  }

  RunRecord rec;
  rec.instance = a.instance_path;
  rec.solver = a.solver;
  rec.n = inst.n;
  rec.budget = inst.budget;
  rec.seed = inst.seed;

  const auto t0 = std::chrono::steady_clock::now();
  if (a.solver == "sbb") {
    sbb::Options opts;
    opts.rel_gap = a.rel_gap;
    opts.time_limit_s = a.time_limit;
    opts.node_limit = a.node_limit;
    opts.workers = a.workers;
    opts.stall_iters = a.stall;
    opts.subproblem_gap = a.subgap;
    if (trace_file.is_open()) {
      trace_file << "node_id,depth,parent_id,node_ub,node_lb,best_lb,best_ub,"
                    "open_nodes,elapsed_s\n";
      opts.progress = &trace_file;
    }
    const sbb::Result r = sbb::solve(problem, opts);
    rec.lb = r.best_lb;
    rec.ub = r.best_ub;
    rec.rel_gap = r.rel_gap();
    rec.termination = sbb::termination_name(r.termination);
    rec.nodes_or_iters = r.nodes_explored;
  } else if (a.solver == "approx-cp" || a.solver == "exact-cp") {
    cutplane::Options opts;
    opts.subproblem_gap = a.rel_gap;
    opts.stall_iters = a.stall;
    opts.max_iterations = a.max_iters;
    if (trace_file.is_open()) {
      trace_file << "iter,lb,ub,support\n";
      opts.trace = &trace_file;
    }
    const cutplane::Result r =
        a.solver == "approx-cp"
            ? cutplane::approximate_cutting_plane(problem, problem.box, {}, opts)
            : cutplane::exact_cutting_plane(problem, problem.box, a.epsilon, opts);
    rec.lb = r.lower_bound;
    rec.ub = r.upper_bound;
    rec.rel_gap = r.feasible()
                      ? (r.upper_bound - r.lower_bound) /
                            std::max(r.lower_bound, 1e-12)
                      : kInf;
    rec.termination = cutplane::termination_name(r.termination);
    rec.nodes_or_iters = r.iterations;
  } else {
    try {
      const verify::GridOracleResult r = verify::grid_maximize(problem, a.grid_step);
      rec.lb = r.best_value;
      rec.ub = r.best_value;
      rec.rel_gap = 0.0;
      rec.termination = "gap";
      rec.nodes_or_iters = static_cast<std::int64_t>(r.points_evaluated);
    } catch (const std::runtime_error&) {
      rec.lb = -kInf;
      rec.ub = -kInf;
      rec.rel_gap = kInf;
      rec.termination = "infeasible";
      rec.nodes_or_iters = 0;
    }
  }
  rec.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!a.results_path.empty()) append_record(a.results_path, rec);
  out << "instance=" << rec.instance << " solver=" << rec.solver
      << " n=" << rec.n << " budget=" << fmt_short(rec.budget)
      << " lb=" << fmt_short(rec.lb) << " ub=" << fmt_short(rec.ub)
      << " rel_gap=" << fmt_short(rec.rel_gap)
      << " termination=" << rec.termination
      << " nodes_or_iters=" << rec.nodes_or_iters
      << " runtime_s=" << fmt_short(rec.runtime_s) << '\n';
  return exit_code_for(rec.termination);
}

struct GenerateArgs {
  std::string kind;
  int n = 0;
  int m = 0;
  int demands = 150;
  int nodes = 0;
  double budget = 0.0;
  bool budget_given = false;
  std::string g_kind = "contest";
  std::uint64_t seed = 42;
  std::string out_path;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  std::string name = a.kind;
  if (name == "covering") name = "uncap_covering";
  if (name == "influence") name = "influence_max";
  const InstanceKind kind = kind_from_name(name);

  Instance inst;
  switch (kind) {
    case InstanceKind::quadratic: {
      if (a.n <= 0) throw std::invalid_argument("generate quadratic requires --n");
      const int m = a.m > 0 ? a.m : a.n;
      inst = gen_instance(kind, a.n, m, 0.0, a.seed);
      break;
    }
    case InstanceKind::uncap_covering:
    case InstanceKind::cap_covering: {
      if (a.n <= 0) throw std::invalid_argument("generate covering requires --n");
      if (!a.budget_given)
        throw std::invalid_argument("generate covering requires --budget");
      inst = gen_instance(kind, a.n, a.demands, a.budget, a.seed);
      break;
    }
    case InstanceKind::influence_max: {
      const int nodes = a.nodes > 0 ? a.nodes : a.n;
      if (nodes <= 0)
        throw std::invalid_argument("generate influence requires --nodes");
      if (!a.budget_given)
        throw std::invalid_argument("generate influence requires --budget");
      if (a.g_kind != "contest" && a.g_kind != "identity")
        throw std::invalid_argument("--g must be contest or identity");
      inst.kind = kind;
      inst.seed = a.seed;
      inst.n = nodes;
      inst.budget = a.budget;
      inst.payload = problems::gen_influence(
          nodes, a.budget,
          a.g_kind == "contest" ? problems::GKind::contest
                                : problems::GKind::identity,
          a.seed);
      break;
    }
  }
  write_text_file(a.out_path, to_json(inst));
  out << "wrote " << a.out_path << " kind=" << kind_name(kind) << " n=" << inst.n
      << " budget=" << fmt_short(inst.budget) << " seed=" << inst.seed << '\n';
  return 0;
}

struct VerifyArgs {
  std::string instance_path;
  int trials = 256;
  int points = 50;
  std::uint64_t seed = 42;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const Instance inst = load_instance(a.instance_path);
  const OracleProblem problem = make_oracle(inst);
  bool ok = true;

  const SubmodularityReport sub =
      check_submodular_sample(problem, a.trials, a.seed);
  ok = ok && sub.pass;
  out << "submodularity: lattice=" << fmt_short(sub.max_lattice_violation)
      << " concavity=" << fmt_short(sub.max_concavity_violation)
      << (sub.pass ? " pass" : " FAIL") << '\n';

  const double h = 1e-5;
  Rng rng(Rng::derive(a.seed, 1));
  double max_rel = 0.0;
  double min_grad = kInf;
  for (int p = 0; p < a.points; ++p) {
    std::vector<double> x(problem.dimension);
    for (int i = 0; i < problem.dimension; ++i) {
      const double lo = problem.box.lower[i] + 2 * h;
      const double hi = problem.box.upper[i] - 2 * h;
      x[i] = lo + (hi - lo) * rng.uniform01();
    }
    const verify::FdGradientReport rep = verify::fd_gradient_check(problem, x, h);
    max_rel = std::max(max_rel, rep.max_rel_error);
    for (double g : evaluate_gradient(problem, x)) min_grad = std::min(min_grad, g);
  }
  const bool fd_ok = max_rel <= tol::kFdGradient;
  const bool mono_ok = min_grad >= -tol::kOracleCheck;
  ok = ok && fd_ok && mono_ok;
  out << "gradient_fd: max_rel_error=" << fmt_short(max_rel)
      << (fd_ok ? " pass" : " FAIL") << '\n';
  out << "monotonicity: min_gradient=" << fmt_short(min_grad)
      << (mono_ok ? " pass" : " FAIL") << '\n';
  out << "verify: " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_table(const std::string& results_path, std::ostream& out) {
  std::string text;
  try {
    text = read_text_file(results_path);
  } catch (const std::exception& e) {
    throw std::invalid_argument(e.what());
  }
  const std::vector<RunRecord> records = read_results_csv(text);
  if (records.empty()) throw std::invalid_argument("results file has no records");
  out << format_table(aggregate(records));
  return 0;
}

}  // namespace

std::string to_csv_row(const RunRecord& rec) {
  std::string out = rec.instance;
  out += ',';
  out += rec.solver;
  out += ',';
  out += std::to_string(rec.n);
  out += ',';
  out += fmt17(rec.budget);
  out += ',';
  out += std::to_string(rec.seed);
  out += ',';
  out += fmt17(rec.runtime_s);
  out += ',';
  out += fmt17(rec.lb);
  out += ',';
  out += fmt17(rec.ub);
  out += ',';
  out += fmt17(rec.rel_gap);
  out += ',';
  out += rec.termination;
  out += ',';
  out += std::to_string(rec.nodes_or_iters);
  return out;
}

RunRecord record_from_csv_row(const std::string& line) {
  const std::vector<std::string> f = split_csv(line);
  if (f.size() != 11)
    throw std::invalid_argument("results row must have 11 fields: " + line);
  RunRecord rec;
  try {
    rec.instance = f[0];
    rec.solver = f[1];
    rec.n = std::stoi(f[2]);
    rec.budget = std::stod(f[3]);
    rec.seed = std::stoull(f[4]);
    rec.runtime_s = std::stod(f[5]);
    rec.lb = std::stod(f[6]);
    rec.ub = std::stod(f[7]);
    rec.rel_gap = std::stod(f[8]);
    rec.termination = f[9];
    rec.nodes_or_iters = std::stoll(f[10]);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed results row: " + line);
  }
  return rec;
}

std::vector<RunRecord> read_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  bool saw_header = false;
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kResultsHeader)
        throw std::invalid_argument("results file header mismatch");
      saw_header = true;
      continue;
    }
    records.push_back(record_from_csv_row(line));
  }
  if (!saw_header) throw std::invalid_argument("results file missing header");
  return records;
}

int exit_code_for(const std::string& termination) {
  if (termination == "gap" || termination == "rel_gap" ||
      termination == "duplicate_cut" || termination == "stall")
    return 0;
  if (termination == "time_limit" || termination == "node_limit" ||
      termination == "iter_limit")
    return 2;
  if (termination == "infeasible") return 3;
  throw std::invalid_argument("unknown termination '" + termination + "'");
}

std::vector<TableCell> aggregate(const std::vector<RunRecord>& records) {
  struct Acc {
    int solved = 0;
    double runtime = 0.0;
    int limited = 0;
    double gap = 0.0;
  };
  std::map<std::pair<int, double>, Acc> groups;
  for (const RunRecord& rec : records) {
    const int code = exit_code_for(rec.termination);
    if (code == 3) continue;  // infeasible runs have no runtime/gap story
    Acc& acc = groups[{rec.n, rec.budget}];
    if (code == 0) {
      ++acc.solved;
      acc.runtime += rec.runtime_s;
    } else {
      ++acc.limited;
      acc.gap += rec.rel_gap;
    }
  }
  std::vector<TableCell> cells;
  for (const auto& [key, acc] : groups) {
    TableCell cell;
    cell.n = key.first;
    cell.budget = key.second;
    cell.solved = acc.solved;
    cell.mean_runtime_s = acc.solved ? acc.runtime / acc.solved : 0.0;
    cell.limited = acc.limited;
    cell.mean_gap = acc.limited ? acc.gap / acc.limited : 0.0;
    cells.push_back(cell);
  }
  return cells;
}

std::string format_table(const std::vector<TableCell>& cells) {
  std::string out = "     n   budget   solved   mean_runtime_s   limited   mean_gap\n";
  char buf[160];
  for (const TableCell& c : cells) {
    char runtime[32];
    char gap[32];
    if (c.solved)
      std::snprintf(runtime, sizeof runtime, "%.3f", c.mean_runtime_s);
    else
      std::snprintf(runtime, sizeof runtime, "-");
    if (c.limited)
      std::snprintf(gap, sizeof gap, "%.2f%%", 100.0 * c.mean_gap);
    else
      std::snprintf(gap, sizeof gap, "-");
    std::snprintf(buf, sizeof buf, "%6d %8.4g %8d %16s %9d %10s\n", c.n, c.budget,
                  c.solved, runtime, c.limited, gap);
    out += buf;
  }
  return out;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global maximization of non-decreasing DR-submodular objectives "
               "over box and budget constraints"};
  app.require_subcommand(1);

  GenerateArgs gen_args;
  CLI::App* gen = app.add_subcommand("generate", "Generate a benchmark instance");
  gen->add_option("kind", gen_args.kind,
                  "quadratic | covering | cap_covering | influence")
      ->required();
  gen->add_option("--n", gen_args.n, "dimension (facilities / variables)");
  gen->add_option("--m", gen_args.m, "quadratic: number of constraint rows (default n)");
  gen->add_option("--j", gen_args.demands, "covering: number of demand points");
  gen->add_option("--nodes", gen_args.nodes, "influence: number of nodes");
  gen->add_option("--budget", gen_args.budget, "budget b for sum(x) <= b");
  gen->add_option("--g", gen_args.g_kind, "influence: contest | identity");
  gen->add_option("--seed", gen_args.seed, "RNG seed")->envname("DRSUB_SEED");
  gen->add_option("-o,--out", gen_args.out_path, "output instance path")->required();

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "Run a solver on an instance file");
  solve->add_option("instance", solve_args.instance_path, "instance JSON path")
      ->required();
  solve->add_option("solver", solve_args.solver,
                    "sbb | approx-cp | exact-cp | grid")
      ->required();
  solve->add_option("--rel-gap", solve_args.rel_gap, "relative gap target");
  solve->add_option("--time-limit", solve_args.time_limit, "seconds (sbb)");
  solve->add_option("--stall", solve_args.stall,
                    "stop after this many non-improving iterations");
  solve->add_option("--subgap", solve_args.subgap,
                    "node subproblem relative gap (sbb)");
  solve->add_option("--workers", solve_args.workers, "parallel node bounders (sbb)");
  solve->add_option("--max-iters", solve_args.max_iters,
                    "cutting-plane iteration cap (0 = default)");
  solve->add_option("--node-limit", solve_args.node_limit, "sbb node cap (0 = none)");
  solve->add_option("--epsilon", solve_args.epsilon,
                    "absolute gap target (exact-cp)");
  solve->add_option("--grid-step", solve_args.grid_step, "lattice step (grid)");
  solve->add_option("--trace", solve_args.trace_path,
                    "write per-iteration / per-node CSV here");
  solve->add_option("--results", solve_args.results_path,
                    "append the run record to this CSV");

  std::string table_path;
  CLI::App* table = app.add_subcommand(
      "table", "Aggregate a results CSV per (n, budget) group");
  table->add_option("results", table_path, "results CSV path")->required();

  VerifyArgs verify_args;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "Run oracle invariant checks on an instance");
  verify_cmd->add_option("instance", verify_args.instance_path, "instance JSON path")
      ->required();
  verify_cmd->add_option("--trials", verify_args.trials,
                         "submodularity sample pairs");
  verify_cmd->add_option("--points", verify_args.points,
                         "gradient check points");
  verify_cmd->add_option("--seed", verify_args.seed, "RNG seed")
      ->envname("DRSUB_SEED");

  gen_args.budget_given = false;
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 64;
  }
  gen_args.budget_given = gen->count("--budget") > 0;

  try {
    if (gen->parsed()) return cmd_generate(gen_args, out);
    if (solve->parsed()) return cmd_solve(solve_args, out);
    if (table->parsed()) return cmd_table(table_path, out);
    if (verify_cmd->parsed()) return cmd_verify(verify_args, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 64;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 70;
  }
  return 64;
}

}  // namespace drsub::cli
