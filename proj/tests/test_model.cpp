#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "drsub/model.hpp"
#include "drsub/rng.hpp"

using namespace drsub;

namespace {

OracleProblem bilinear_toy() {
  // F(x) = x1 + x2 - x1 x2: non-decreasing DR-submodular on [0,1]^2.
  OracleProblem p;
  p.dimension = 2;
  p.box = BoxBounds::unit(2);
  p.value = [](const std::vector<double>& x) {
    return x[0] + x[1] - x[0] * x[1];
  };
  p.gradient = [](const std::vector<double>& x) {
    return std::vector<double>{1.0 - x[1], 1.0 - x[0]};
  };
  return p;
}

}  // namespace

TEST_CASE("box geometry") {
  BoxBounds box{{0.0, 0.5}, {1.0, 0.5}};
  CHECK(box.dim() == 2);
  CHECK(box.width(0) == 1.0);
  CHECK(box.width(1) == 0.0);
  const auto mid = box.midpoint();
  CHECK(mid[0] == 0.5);
  CHECK(mid[1] == 0.5);
  CHECK(box.contains({0.5, 0.5}, 0.0));
  CHECK(box.contains({1.0 + 1e-13, 0.5}, 1e-12));
  CHECK_FALSE(box.contains({1.1, 0.5}, 1e-12));
  CHECK_NOTHROW(box.validate());

  CHECK_THROWS_AS(BoxBounds({0.0}, {1.0, 2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(BoxBounds({1.0}, {0.0}).validate(), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(BoxBounds({0.0}, {inf}).validate(), std::invalid_argument);

  const BoxBounds unit = BoxBounds::unit(3);
  CHECK(unit.dim() == 3);
  CHECK(unit.lower == std::vector<double>(3, 0.0));
  CHECK(unit.upper == std::vector<double>(3, 1.0));
}

TEST_CASE("linear constraints membership") {
  LinearConstraints cons{{{1.0, 1.0}}, {1.0}};
  CHECK(cons.rows() == 1);
  CHECK(cons.satisfied({0.4, 0.6}, 0.0));
  CHECK(cons.satisfied({0.5, 0.5 + 5e-8}, tol::kRow));
  CHECK_FALSE(cons.satisfied({0.6, 0.6}, tol::kRow));
  CHECK_NOTHROW(cons.validate(2));
  CHECK_THROWS_AS(cons.validate(3), std::invalid_argument);
  LinearConstraints bad{{{1.0}}, {1.0, 2.0}};
  CHECK_THROWS_AS(bad.validate(1), std::invalid_argument);
}

TEST_CASE("evaluate clamps inside tolerance and rejects beyond it") {
  const OracleProblem p = bilinear_toy();
  CHECK(evaluate(p, {0.5, 0.5}) == doctest::Approx(0.75).epsilon(1e-15));
  // Slightly outside but within membership tolerance: clamped, no throw.
  CHECK(evaluate(p, {1.0 + 1e-13, 1.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(evaluate(p, {1.5, 0.0}), std::domain_error);
  CHECK_THROWS_AS(evaluate(p, {-1e-6, 0.0}), std::domain_error);

  const auto g = evaluate_gradient(p, {0.25, 0.75});
  CHECK(g[0] == doctest::Approx(0.25));
  CHECK(g[1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(evaluate_gradient(p, {2.0, 0.0}), std::domain_error);
}

TEST_CASE("project_into_box") {
  const BoxBounds box{{0.0, 0.2}, {1.0, 0.8}};
  const auto y = project_into_box({-0.5, 0.9}, box);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.8);
  CHECK(project_into_box(y, box) == y);
  CHECK_THROWS_AS(project_into_box({0.0}, box), std::invalid_argument);
}

TEST_CASE("submodularity sampler accepts a DR-submodular objective") {
  const SubmodularityReport rep = check_submodular_sample(bilinear_toy(), 300, 7);
  CHECK(rep.pass);
  CHECK(rep.trials == 300);
  CHECK(rep.max_lattice_violation <= tol::kOracleCheck);
  CHECK(rep.max_concavity_violation <= tol::kOracleCheck);
}

TEST_CASE("submodularity sampler rejects a supermodular objective") {
  OracleProblem p;
  p.dimension = 2;
  p.box = BoxBounds::unit(2);
  p.value = [](const std::vector<double>& x) { return x[0] * x[1]; };
  p.gradient = [](const std::vector<double>& x) {
    return std::vector<double>{x[1], x[0]};
  };
  const SubmodularityReport rep = check_submodular_sample(p, 300, 7);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_lattice_violation > tol::kOracleCheck);
}

TEST_CASE("rng determinism") {
  Rng a(123), b(123), c(124);
  bool all_equal = true;
  bool any_differs = false;
  for (int i = 0; i < 64; ++i) {
    const double va = a.uniform01();
    all_equal = all_equal && va == b.uniform01();
    any_differs = any_differs || va != c.uniform01();
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_differs);
  CHECK(Rng::derive(5, 0) != Rng::derive(5, 1));
  CHECK(Rng::derive(5, 0) == Rng::derive(5, 0));

  Rng d(9);
  for (int i = 0; i < 32; ++i) {
    const double v = d.uniform(2.0, 3.0);
    CHECK(v >= 2.0);
    CHECK(v < 3.0);
    CHECK(d.below(7) < 7u);
  }
}
