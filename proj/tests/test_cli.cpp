#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "drsub/cli.hpp"
#include "drsub/instance.hpp"

using namespace drsub;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("drsub_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  static int counter;
};
int TempDir::counter = 0;

struct RunOutcome {
  int code = -1;
  std::string out;
  std::string err;
};

RunOutcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("run record round-trips through its CSV row") {
  cli::RunRecord rec;
  rec.instance = "/tmp/foo.json";
  rec.solver = "sbb";
  rec.n = 5;
  rec.budget = 2.0;
  rec.seed = 17;
  rec.runtime_s = 1.25;
  rec.lb = 31.488774204;
  rec.ub = 33.0518;
  rec.rel_gap = 0.0496355;
  rec.termination = "gap";
  rec.nodes_or_iters = 243;
  const std::string row = cli::to_csv_row(rec);
  const cli::RunRecord back = cli::record_from_csv_row(row);
  CHECK(back.instance == rec.instance);
  CHECK(back.solver == rec.solver);
  CHECK(back.n == rec.n);
  CHECK(back.budget == rec.budget);  // 17 digits keep it bit-exact
  CHECK(back.seed == rec.seed);
  CHECK(back.runtime_s == rec.runtime_s);
  CHECK(back.lb == rec.lb);
  CHECK(back.ub == rec.ub);
  CHECK(back.rel_gap == rec.rel_gap);
  CHECK(back.termination == rec.termination);
  CHECK(back.nodes_or_iters == rec.nodes_or_iters);

  CHECK_THROWS_AS(cli::record_from_csv_row("only,three,fields"),
                  std::invalid_argument);
}

TEST_CASE("results files demand the canonical header") {
  const std::string good = std::string(cli::kResultsHeader) +
                           "\ni.json,grid,2,0,1,0.5,1,1,0,gap,100\n";
  const auto records = cli::read_results_csv(good);
  REQUIRE(records.size() == 1);
  CHECK(records[0].solver == "grid");
  CHECK_THROWS_AS(cli::read_results_csv("bad,header\n"), std::invalid_argument);
  CHECK_THROWS_AS(cli::read_results_csv(""), std::invalid_argument);
}

TEST_CASE("termination to exit code mapping") {
  CHECK(cli::exit_code_for("gap") == 0);
  CHECK(cli::exit_code_for("rel_gap") == 0);
  CHECK(cli::exit_code_for("duplicate_cut") == 0);
  CHECK(cli::exit_code_for("stall") == 0);
  CHECK(cli::exit_code_for("time_limit") == 2);
  CHECK(cli::exit_code_for("node_limit") == 2);
  CHECK(cli::exit_code_for("iter_limit") == 2);
  CHECK(cli::exit_code_for("infeasible") == 3);
  CHECK_THROWS_AS(cli::exit_code_for("whatever"), std::invalid_argument);
}

TEST_CASE("aggregation groups by dimension and budget") {
  auto rec = [](int n, double b, const std::string& term, double rt, double gap) {
    cli::RunRecord r;
    r.n = n;
    r.budget = b;
    r.termination = term;
    r.runtime_s = rt;
    r.rel_gap = gap;
    return r;
  };
  SUBCASE("two solved records average their runtimes") {
    const auto cells =
        cli::aggregate({rec(5, 2, "gap", 10.0, 0.01), rec(5, 2, "gap", 20.0, 0.02)});
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].solved == 2);
    CHECK(cells[0].mean_runtime_s == doctest::Approx(15.0));
    CHECK(cells[0].limited == 0);
  }
  SUBCASE("mixed cell keeps both outcome columns") {
    const auto cells = cli::aggregate(
        {rec(5, 2, "gap", 12.0, 0.01), rec(5, 2, "time_limit", 3600.0, 0.25)});
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].solved == 1);
    CHECK(cells[0].mean_runtime_s == doctest::Approx(12.0));
    CHECK(cells[0].limited == 1);
    CHECK(cells[0].mean_gap == doctest::Approx(0.25));
  }
  SUBCASE("single record and group ordering") {
    const auto cells = cli::aggregate(
        {rec(7, 3, "gap", 5.0, 0.0), rec(5, 2, "gap", 1.0, 0.0),
         rec(5, 4, "time_limit", 9.0, 0.5)});
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].n == 5);
    CHECK(cells[0].budget == 2.0);
    CHECK(cells[1].budget == 4.0);
    CHECK(cells[2].n == 7);
  }
  const std::string table = cli::format_table(
      cli::aggregate({rec(5, 2, "gap", 12.0, 0.01),
                      rec(5, 2, "time_limit", 3600.0, 0.0625)}));
  CHECK(table.find("12.000") != std::string::npos);
  CHECK(table.find("6.25%") != std::string::npos);
  CHECK(table.find("mean_runtime_s") != std::string::npos);
}

TEST_CASE("generate writes canonical instances with protocol constants") {
  TempDir dir;
  const std::string path = dir.file("cov.json");
  const auto res = run_cli({"generate", "covering", "--n", "5", "--j", "150",
                            "--budget", "2", "--seed", "1", "-o", path});
  REQUIRE(res.code == 0);
  const Instance inst = instance_from_json(read_text_file(path));
  CHECK(inst.kind == InstanceKind::uncap_covering);
  CHECK(inst.n == 5);
  const auto& cov = std::get<problems::CoveringInstance>(inst.payload);
  for (double ai : cov.a) CHECK(ai == doctest::Approx(0.4).epsilon(1e-15));

  const std::string inf_path = dir.file("inf.json");
  const auto res2 = run_cli({"generate", "influence", "--nodes", "5", "--budget",
                             "2", "--g", "contest", "--seed", "1", "-o", inf_path});
  REQUIRE(res2.code == 0);
  const Instance inf = instance_from_json(read_text_file(inf_path));
  const auto& payload = std::get<problems::InfluenceInstance>(inf.payload);
  CHECK(payload.arcs.size() == 11);
  CHECK(payload.g_kind == problems::GKind::contest);

  // Same seed, second file: byte-identical content.
  const std::string again = dir.file("cov2.json");
  REQUIRE(run_cli({"generate", "covering", "--n", "5", "--j", "150", "--budget",
                   "2", "--seed", "1", "-o", again})
              .code == 0);
  CHECK(read_text_file(again) == read_text_file(path));
}

TEST_CASE("generate validation failures exit with the usage code") {
  TempDir dir;
  CHECK(run_cli({"generate", "martian", "-o", dir.file("x.json")}).code == 64);
  CHECK(run_cli({"generate", "covering", "--n", "5", "-o", dir.file("x.json")})
            .code == 64);  // missing budget
  CHECK(run_cli({"generate", "quadratic", "-o", dir.file("x.json")}).code == 64);
  CHECK(run_cli({"generate", "influence", "--nodes", "5", "--budget", "2", "--g",
                 "nope", "-o", dir.file("x.json")})
            .code == 64);
}

TEST_CASE("solve runs every solver and appends reproducible records") {
  TempDir dir;
  const std::string inst = dir.file("q.json");
  REQUIRE(run_cli({"generate", "quadratic", "--n", "2", "--m", "2", "--seed", "7",
                   "-o", inst})
              .code == 0);
  const std::string results = dir.file("results.csv");

  const auto sbb_run =
      run_cli({"solve", inst, "sbb", "--results", results});
  CHECK(sbb_run.code == 0);
  CHECK(sbb_run.out.find("termination=gap") != std::string::npos);

  const auto grid_run = run_cli({"solve", inst, "grid", "--results", results});
  CHECK(grid_run.code == 0);

  const auto acp_run = run_cli({"solve", inst, "approx-cp", "--results", results});
  CHECK(acp_run.code == 0);

  const auto ecp_run = run_cli({"solve", inst, "exact-cp", "--epsilon", "0.01",
                                "--results", results});
  CHECK(ecp_run.code == 0);

  const auto records = cli::read_results_csv(read_text_file(results));
  REQUIRE(records.size() == 4);
  const auto& sbb_rec = records[0];
  const auto& grid_rec = records[1];
  const auto& ecp_rec = records[3];
  CHECK(sbb_rec.solver == "sbb");
  CHECK(sbb_rec.rel_gap <= 0.05 + 1e-12);
  CHECK(grid_rec.lb == grid_rec.ub);
  // SBB's certified range must contain the grid value.
  CHECK(grid_rec.lb <= sbb_rec.ub + 1e-6);
  CHECK(sbb_rec.lb <= grid_rec.lb + 0.05);
  CHECK(ecp_rec.ub - ecp_rec.lb <= 0.01 + 1e-9);

  // Re-running appends an identical record except the wall time.
  const auto rerun = run_cli({"solve", inst, "sbb", "--results", results});
  CHECK(rerun.code == 0);
  const auto again = cli::read_results_csv(read_text_file(results));
  REQUIRE(again.size() == 5);
  CHECK(again[4].lb == sbb_rec.lb);
  CHECK(again[4].ub == sbb_rec.ub);
  CHECK(again[4].rel_gap == sbb_rec.rel_gap);
  CHECK(again[4].nodes_or_iters == sbb_rec.nodes_or_iters);
  CHECK(again[4].termination == sbb_rec.termination);
  CHECK(again[4].seed == sbb_rec.seed);
}

TEST_CASE("solve exit codes for limits and usage errors") {
  TempDir dir;
  const std::string inst = dir.file("s.json");
  REQUIRE(run_cli({"generate", "covering", "--n", "4", "--j", "40", "--budget",
                   "2", "--seed", "3", "-o", inst})
              .code == 0);
  // A node limit of 1 stops before the 5% gap is reached on this family.
  const auto limited =
      run_cli({"solve", inst, "sbb", "--node-limit", "1", "--rel-gap", "0.0001"});
  CHECK(limited.code == 2);
  CHECK(limited.out.find("termination=node_limit") != std::string::npos);

  CHECK(run_cli({"solve", inst, "simplex-magic"}).code == 64);
  CHECK(run_cli({"solve", dir.file("missing.json"), "sbb"}).code == 64);
  CHECK(run_cli({"table", dir.file("missing.csv")}).code == 64);
  CHECK(run_cli({"bogus-verb"}).code == 64);
  CHECK(run_cli({}).code == 64);
}

TEST_CASE("solve writes the sbb progress trace") {
  TempDir dir;
  const std::string inst = dir.file("q.json");
  REQUIRE(run_cli({"generate", "quadratic", "--n", "2", "--m", "1", "--seed", "5",
                   "-o", inst})
              .code == 0);
  const std::string trace = dir.file("trace.csv");
  REQUIRE(run_cli({"solve", inst, "sbb", "--trace", trace}).code == 0);
  std::ifstream in(trace);
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header ==
        "node_id,depth,parent_id,node_ub,node_lb,best_lb,best_ub,open_nodes,"
        "elapsed_s");
  std::string first;
  CHECK(std::getline(in, first));  // at least the root row
}

TEST_CASE("table verb renders the aggregate") {
  TempDir dir;
  const std::string results = dir.file("results.csv");
  {
    std::ofstream out(results);
    out << cli::kResultsHeader << "\n";
    out << "a.json,sbb,5,2,1,10,30,31,0.033,gap,12\n";
    out << "b.json,sbb,5,2,2,20,29,30.5,0.051,time_limit,99\n";
  }
  const auto res = run_cli({"table", results});
  CHECK(res.code == 0);
  CHECK(res.out.find("10.000") != std::string::npos);
  CHECK(res.out.find("5.10%") != std::string::npos);

  std::ofstream(dir.file("empty.csv")) << cli::kResultsHeader << "\n";
  CHECK(run_cli({"table", dir.file("empty.csv")}).code == 64);
}

TEST_CASE("verify verb passes on generated instances") {
  TempDir dir;
  const std::string inst = dir.file("v.json");
  REQUIRE(run_cli({"generate", "covering", "--n", "4", "--j", "30", "--budget",
                   "2", "--seed", "2", "-o", inst})
              .code == 0);
  const auto res = run_cli({"verify", inst, "--trials", "64", "--points", "16"});
  CHECK(res.code == 0);
  CHECK(res.out.find("verify: PASS") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli({"--help"}).code == 0);
  const auto sub = run_cli({"solve", "--help"});
  CHECK(sub.code == 0);
  CHECK(sub.out.find("sbb") != std::string::npos);
}

TEST_CASE("environment seed is the default") {
  TempDir dir;
  ::setenv("DRSUB_SEED", "777", 1);
  const std::string path = dir.file("env.json");
  REQUIRE(run_cli({"generate", "quadratic", "--n", "2", "-o", path}).code == 0);
  ::unsetenv("DRSUB_SEED");
  const Instance inst = instance_from_json(read_text_file(path));
  CHECK(inst.seed == 777);

  // Explicit flag beats the environment.
  ::setenv("DRSUB_SEED", "778", 1);
  const std::string path2 = dir.file("env2.json");
  REQUIRE(run_cli({"generate", "quadratic", "--n", "2", "--seed", "9", "-o", path2})
              .code == 0);
  ::unsetenv("DRSUB_SEED");
  CHECK(instance_from_json(read_text_file(path2)).seed == 9);
}
