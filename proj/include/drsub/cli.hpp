#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace drsub::cli {

/// One solver run, as appended to the results CSV.
struct RunRecord {
  std::string instance;  // path as given on the command line
  std::string solver;    // sbb | approx-cp | exact-cp | grid
  int n = 0;
  double budget = 0.0;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
  double lb = 0.0;
  double ub = 0.0;
  double rel_gap = 0.0;
  std::string termination;
  std::int64_t nodes_or_iters = 0;
};

inline constexpr const char* kResultsHeader =
    "instance,solver,n,budget,seed,runtime_s,lb,ub,rel_gap,termination,"
    "nodes_or_iters";

std::string to_csv_row(const RunRecord& rec);
RunRecord record_from_csv_row(const std::string& line);  // std::invalid_argument
// Parses a whole results file (header line required, blank lines skipped).
std::vector<RunRecord> read_results_csv(const std::string& text);

/// Process exit code for a solve: 0 when the run closed its gap criterion
/// (gap, rel_gap, duplicate_cut, stall), 2 when a resource limit stopped it
/// (time_limit, node_limit, iter_limit), 3 for infeasible.
int exit_code_for(const std::string& termination);

/// Aggregation cell for `table`: one (n, budget) group.
struct TableCell {
  int n = 0;
  double budget = 0.0;
  int solved = 0;            // gap-class terminations
  double mean_runtime_s = 0.0;
  int limited = 0;           // limit-class terminations
  double mean_gap = 0.0;
};

std::vector<TableCell> aggregate(const std::vector<RunRecord>& records);
std::string format_table(const std::vector<TableCell>& cells);

/// Full command-line driver (verbs: generate, solve, table, verify). Returns
/// the process exit code; usage problems (bad flags, unknown solver, missing
/// file) give 64, internal solver failures 70.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace drsub::cli
