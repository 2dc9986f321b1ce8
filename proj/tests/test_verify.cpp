#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "drsub/model.hpp"
#include "drsub/verify.hpp"

using namespace drsub;

namespace {

OracleProblem bilinear_budget() {
  OracleProblem p;
  p.dimension = 2;
  p.box = BoxBounds::unit(2);
  p.constraints = {{{1.0, 1.0}}, {1.0}};
  p.value = [](const std::vector<double>& x) {
    return x[0] + x[1] - x[0] * x[1];
  };
  p.gradient = [](const std::vector<double>& x) {
    return std::vector<double>{1.0 - x[1], 1.0 - x[0]};
  };
  return p;
}

}  // namespace

TEST_CASE("grid oracle finds the budget-constrained bilinear optimum") {
  const auto res = verify::grid_maximize(bilinear_budget(), 0.01);
  CHECK(res.best_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.best_x[0] + res.best_x[1] <= 1.0 + 1e-7);
  CHECK(res.grid_step == 0.01);
  // Only feasible lattice points count: well under the full 101^2.
  CHECK(res.points_evaluated < 101ull * 101ull);
  CHECK(res.points_evaluated > 0);
}

TEST_CASE("grid includes the upper endpoint when the step does not divide") {
  OracleProblem p;
  p.dimension = 1;
  p.box = BoxBounds::unit(1);
  p.value = [](const std::vector<double>& x) { return std::sqrt(x[0]); };
  p.gradient = [](const std::vector<double>& x) {
    return std::vector<double>{0.5 / std::sqrt(std::max(x[0], 1e-300))};
  };
  const auto res = verify::grid_maximize(p, 0.3);
  // Lattice {0, 0.3, 0.6, 0.9} plus the appended endpoint 1.
  CHECK(res.points_evaluated == 5);
  CHECK(res.best_value == doctest::Approx(1.0));
  CHECK(res.best_x[0] == 1.0);
}

TEST_CASE("grid oracle is deterministic including ties") {
  const auto a = verify::grid_maximize(bilinear_budget(), 0.05);
  const auto b = verify::grid_maximize(bilinear_budget(), 0.05);
  CHECK(a.best_x == b.best_x);
  CHECK(a.best_value == b.best_value);
  CHECK(a.points_evaluated == b.points_evaluated);
}

TEST_CASE("grid oracle guards") {
  OracleProblem p = bilinear_budget();
  CHECK_THROWS_AS(verify::grid_maximize(p, 1e-6), std::domain_error);
  p.constraints = {{{1.0, 1.0}}, {-1.0}};
  CHECK_THROWS_AS(verify::grid_maximize(p, 0.1), std::runtime_error);
}

TEST_CASE("parallel-size lattice matches itself across runs") {
  OracleProblem p;
  p.dimension = 3;
  p.box = BoxBounds::unit(3);
  p.value = [](const std::vector<double>& x) {
    return x[0] + 0.9 * x[1] + 0.8 * x[2] - 0.3 * x[0] * x[1];
  };
  p.gradient = [](const std::vector<double>& x) {
    return std::vector<double>{1.0 - 0.3 * x[1], 0.9 - 0.3 * x[0], 0.8};
  };
  // 51^3 = 132651 points crosses the threading threshold.
  const auto a = verify::grid_maximize(p, 0.02);
  const auto b = verify::grid_maximize(p, 0.02);
  CHECK(a.best_value == b.best_value);
  CHECK(a.best_x == b.best_x);
  CHECK(a.points_evaluated == 51ull * 51ull * 51ull);
  CHECK(a.best_value == doctest::Approx(1.0 + 0.9 + 0.8 - 0.3).epsilon(1e-12));
}

TEST_CASE("vertex enumeration reproduces the two-cut crossing") {
  lp::LpModel m;
  m.objective = {0.0, 1.0};
  m.var_bounds = {{0.0, 1.0}, {0.0, 2.0}};  // finite bounds for enumeration
  m.add_row({-0.75, 1.0}, lp::Sense::le, 0.5);
  m.add_row({0.25, 1.0}, lp::Sense::le, 1.25);
  const auto res = verify::vertex_enumerate_lp(m);
  REQUIRE(res.feasible);
  CHECK(res.best_value == doctest::Approx(1.0625).epsilon(1e-9));
  CHECK(res.best_x[0] == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("vertex enumeration guard") {
  lp::LpModel m;
  m.objective.assign(9, 1.0);
  m.var_bounds.assign(9, {0.0, 1.0});
  CHECK_THROWS_AS(verify::vertex_enumerate_lp(m), std::domain_error);
}

TEST_CASE("finite-difference check accepts an exact gradient") {
  const OracleProblem p = bilinear_budget();
  const auto rep = verify::fd_gradient_check(p, {0.3, 0.6}, 1e-5);
  CHECK(rep.max_rel_error <= 1e-9);
}

TEST_CASE("finite-difference check flags a wrong gradient") {
  OracleProblem p = bilinear_budget();
  p.gradient = [](const std::vector<double>& x) {
    return std::vector<double>{1.0 - x[1], 2.0 - x[0]};  // second entry off by 1
  };
  const auto rep = verify::fd_gradient_check(p, {0.3, 0.6}, 1e-5);
  CHECK(rep.max_rel_error > 0.1);
  CHECK(rep.worst_component == 1);
}

TEST_CASE("finite-difference check refuses boundary points") {
  const OracleProblem p = bilinear_budget();
  CHECK_THROWS_AS(verify::fd_gradient_check(p, {0.0, 0.5}, 1e-5), std::domain_error);
}
