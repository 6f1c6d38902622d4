#include <doctest.h>

#include <cmath>

#include "vws/error.hpp"
#include "vws/pso.hpp"

using namespace vws;

namespace {

SearchSpace box(std::size_t dims, double lo, double hi) {
  SearchSpace space;
  for (std::size_t d = 0; d < dims; ++d)
    space.dims.push_back({"x" + std::to_string(d), lo, hi, false});
  return space;
}

double sphere(std::span<const double> x) {
  double acc = 0.0;
  for (const double v : x) acc += v * v;
  return acc;
}

}  // namespace

TEST_CASE("sphere benchmark converges below 1e-4 with 30 x 100 evaluations") {
  const PsoResult result = pso_minimize(sphere, box(3, -5.0, 5.0), 30, 100, 2024);
  CHECK(result.best_cost < 1e-4);
  CHECK(result.history.size() == 100);
}

TEST_CASE("integer quadratic recovers the exact optimum") {
  SearchSpace space;
  space.dims.push_back({"n", 0.0, 10.0, true});
  const Objective objective = [](std::span<const double> x) {
    return (x[0] - 7.0) * (x[0] - 7.0);
  };
  const PsoResult result = pso_minimize(objective, space, 12, 40, 3);
  CHECK(result.best_point[0] == 7.0);
  CHECK(result.best_cost == 0.0);
}

TEST_CASE("gbest history is monotone non-increasing") {
  const PsoResult result = pso_minimize(sphere, box(4, -3.0, 3.0), 10, 60, 11);
  for (std::size_t i = 1; i < result.history.size(); ++i)
    CHECK(result.history[i] <= result.history[i - 1]);
}

TEST_CASE("one iteration returns the best of the seeded initial population") {
  const SearchSpace space = box(2, -2.0, 2.0);
  const PsoResult one = pso_minimize(sphere, space, 8, 1, 5);
  CHECK(one.history.size() == 1);

  // Re-run with more iterations: the first history entry must match.
  const PsoResult more = pso_minimize(sphere, space, 8, 25, 5);
  CHECK(more.history.front() == one.best_cost);
  CHECK(more.best_cost <= one.best_cost);
}

TEST_CASE("fixed seed reproduces the history bitwise") {
  const SearchSpace space = box(3, -4.0, 4.0);
  const PsoResult a = pso_minimize(sphere, space, 14, 30, 99);
  const PsoResult b = pso_minimize(sphere, space, 14, 30, 99);
  CHECK(a.history == b.history);
  CHECK(a.best_point == b.best_point);
}

TEST_CASE("returned points always lie inside the box with integral integer dims") {
  SearchSpace space;
  space.dims.push_back({"a", -1.5, 2.5, false});
  space.dims.push_back({"k", 1.0, 9.0, true});
  const Objective objective = [](std::span<const double> x) {
    return std::cos(3.0 * x[0]) + std::abs(x[1] - 4.2);
  };
  const PsoResult result = pso_minimize(objective, space, 10, 25, 17);
  CHECK(result.best_point[0] >= -1.5);
  CHECK(result.best_point[0] <= 2.5);
  CHECK(result.best_point[1] >= 1.0);
  CHECK(result.best_point[1] <= 9.0);
  CHECK(result.best_point[1] == std::round(result.best_point[1]));
}

TEST_CASE("non-finite objective values survive as penalties") {
  const Objective nasty = [](std::span<const double> x) {
    if (x[0] > 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (x[0] + 1.0) * (x[0] + 1.0);
  };
  const PsoResult result = pso_minimize(nasty, box(1, -2.0, 2.0), 12, 120, 8);
  CHECK(result.best_cost < 1e-6);
  CHECK(result.best_point[0] == doctest::Approx(-1.0).epsilon(1e-2));
}

TEST_CASE("invalid spaces and budgets are rejected") {
  CHECK_THROWS_WITH_AS(pso_minimize(sphere, SearchSpace{}, 10, 10, 1),
                       doctest::Contains("invalid-space"), Error);
  SearchSpace bad;
  bad.dims.push_back({"x", 2.0, 1.0, false});
  CHECK_THROWS_WITH_AS(pso_minimize(sphere, bad, 10, 10, 1), doctest::Contains("invalid-space"),
                       Error);
  CHECK_THROWS_WITH_AS(pso_minimize(sphere, box(1, 0.0, 1.0), 1, 10, 1),
                       doctest::Contains("invalid-space"), Error);
}
