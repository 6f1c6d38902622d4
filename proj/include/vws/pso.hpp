#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vws {

struct SearchDim {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  bool integer = false;
};

struct SearchSpace {
  std::vector<SearchDim> dims;
  void validate() const;
};

using Objective = std::function<double(std::span<const double>)>;

struct PsoResult {
  std::vector<double> best_point;
  double best_cost = 0.0;
  std::vector<double> history;  // gbest cost after each iteration, non-increasing
};

// Non-finite objective values survive as a large penalty cost.
inline constexpr double kPsoPenaltyCost = 1e300;

// Global-best PSO with Clerc constriction (chi = 0.729, c1 = c2 = 2.05
// inside the constriction). Positions are clamped to the box; integer
// dimensions are rounded before each objective evaluation. Iteration 1 is
// the evaluation of the seeded initial population; velocity updates start
// at iteration 2. Deterministic per seed.
PsoResult pso_minimize(const Objective& objective, const SearchSpace& space,
                       std::size_t particles, std::size_t iterations, std::uint64_t seed);

}  // namespace vws
