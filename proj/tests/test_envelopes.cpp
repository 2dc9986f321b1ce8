#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "drsub/envelopes.hpp"
#include "drsub/rng.hpp"

using namespace drsub;

namespace {

OracleProblem sqrt_1d() {
  OracleProblem p;
  p.dimension = 1;
  p.box = BoxBounds::unit(1);
  p.value = [](const std::vector<double>& x) { return std::sqrt(x[0]); };
  p.gradient = [](const std::vector<double>& x) {
    return std::vector<double>{0.5 / std::sqrt(x[0])};
  };
  return p;
}

OracleProblem bilinear_toy() {
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

TEST_CASE("overestimator on sqrt at support 0.25") {
  const OracleProblem p = sqrt_1d();
  // F(0.25) = 0.5, F'(0.25) = 1; at x = 1 the positive part is 0.75.
  CHECK(overestimator_value(p, {1.0}, {0.25}) == doctest::Approx(1.25).epsilon(1e-15));
  // Tight at the support and never increases when x dips below it.
  CHECK(overestimator_value(p, {0.25}, {0.25}) == doctest::Approx(0.5));
  CHECK(overestimator_value(p, {0.1}, {0.25}) == doctest::Approx(0.5));
}

TEST_CASE("envelope cut on sqrt at support 0.25 matches hand values") {
  const OracleProblem p = sqrt_1d();
  const BoxBounds box = BoxBounds::unit(1);
  const Cut cut = envelope_cut(p, {0.25}, box);
  CHECK(cut.kind == CutKind::envelope);
  CHECK(cut.coeffs[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(cut.intercept == doctest::Approx(0.5).epsilon(1e-15));
  // Envelope at the support: 0.5 + 0.75 * 0.25 = 0.6875, gap 0.1875.
  CHECK(cut_value(cut, {0.25}) == doctest::Approx(0.6875).epsilon(1e-15));
  CHECK(single_cut_error_bound(p, {0.25}, box) == doctest::Approx(0.1875).epsilon(1e-12));
  CHECK(coarse_error_bound(p, {0.25}, box) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("envelope dominates the overestimator and attains its error bound") {
  const OracleProblem p = sqrt_1d();
  const BoxBounds box = BoxBounds::unit(1);
  const std::vector<double> support{0.25};
  const Cut cut = envelope_cut(p, support, box);
  const double bound = single_cut_error_bound(p, support, box);

  double max_gap = 0.0;
  double argmax = -1.0;
  for (int k = 0; k <= 100; ++k) {
    const std::vector<double> x{k / 100.0};
    const double f = evaluate(p, x);
    const double over = overestimator_value(p, x, support);
    const double env = cut_value(cut, x);
    CHECK(over >= f - 1e-12);
    CHECK(env >= over - 1e-12);
    // The bound caps the envelope's slack over the rectified form, not over F.
    const double gap = env - over;
    CHECK(gap <= bound + 1e-12);
    if (gap > max_gap) {
      max_gap = gap;
      argmax = x[0];
    }
  }
  CHECK(max_gap == doctest::Approx(bound).epsilon(1e-9));
  CHECK(argmax == doctest::Approx(0.25));
  // The envelope interpolates the overestimator at both corners.
  CHECK(cut_value(cut, {0.0}) ==
        doctest::Approx(overestimator_value(p, {0.0}, support)).epsilon(1e-12));
  CHECK(cut_value(cut, {1.0}) ==
        doctest::Approx(overestimator_value(p, {1.0}, support)).epsilon(1e-12));
}

TEST_CASE("overestimator validity across random pairs on the bilinear toy") {
  const OracleProblem p = bilinear_toy();
  Rng rng(2024);
  for (int t = 0; t < 2000; ++t) {
    const std::vector<double> x{rng.uniform01(), rng.uniform01()};
    const std::vector<double> s{rng.uniform01(), rng.uniform01()};
    CHECK(overestimator_value(p, x, s) >= evaluate(p, x) - 1e-9);
    CHECK(overestimator_value(p, s, s) == doctest::Approx(evaluate(p, s)).epsilon(1e-15));
  }
}

TEST_CASE("negative gradient noise is clamped out of the cut") {
  Cut cut = envelope_cut(1.0, {-0.3, 0.5}, {0.5, 0.5}, BoxBounds::unit(2));
  CHECK(cut.grad_at_support[0] == 0.0);
  CHECK(cut.coeffs[0] == 0.0);
  CHECK(cut.coeffs[1] == doctest::Approx(0.25));
}

TEST_CASE("zero-width dimensions contribute nothing") {
  BoxBounds box{{0.3, 0.0}, {0.3, 1.0}};
  const Cut cut = envelope_cut(2.0, {1.0, 1.0}, {0.3, 0.5}, box);
  CHECK(cut.coeffs[0] == 0.0);
  CHECK(cut.coeffs[1] == doctest::Approx(0.5));
  // Envelope still equals f at the lower corner.
  CHECK(cut_value(cut, {0.3, 0.0}) == doctest::Approx(2.0));
}

TEST_CASE("coarse bound shrinks linearly with the box") {
  // For F = x + y - xy on [0, w]^2 with support at the midpoint m = w/2 the
  // slope is 1 - m per coordinate, so the bound is exactly 2 (1 - w/2) w.
  const OracleProblem p = bilinear_toy();
  BoxBounds box = BoxBounds::unit(2);
  double prev = coarse_error_bound(p, box.midpoint(), box);
  const double root = prev;
  CHECK(root == doctest::Approx(1.0).epsilon(1e-15));
  for (int k = 1; k <= 6; ++k) {
    const double w = std::ldexp(1.0, -k);
    for (int i = 0; i < 2; ++i) box.upper[i] = box.lower[i] + w;
    const double cur = coarse_error_bound(p, box.midpoint(), box);
    CHECK(cur == doctest::Approx(2.0 * (1.0 - w / 2.0) * w).epsilon(1e-12));
    CHECK(cur < prev);
    prev = cur;
  }
  // Width fell 64x while the slope at most doubled: at least 32x overall.
  CHECK(prev <= root / 32.0);
  CHECK(prev == doctest::Approx(127.0 / 4096.0).epsilon(1e-12));
}

TEST_CASE("single-cut bound never exceeds the coarse bound") {
  const OracleProblem p = bilinear_toy();
  const BoxBounds box = BoxBounds::unit(2);
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::vector<double> s{rng.uniform01(), rng.uniform01()};
    CHECK(single_cut_error_bound(p, s, box) <= coarse_error_bound(p, s, box) + 1e-12);
  }
}
