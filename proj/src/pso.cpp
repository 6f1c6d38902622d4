#include "vws/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vws/error.hpp"
#include "vws/rng.hpp"

namespace vws {

void SearchSpace::validate() const {
  require(!dims.empty(), "invalid-space", "at least one dimension required");
  for (const auto& d : dims)
    require(d.lower < d.upper, "invalid-space", "dimension " + d.name + ": lower must be < upper");
}

namespace {

constexpr double kChi = 0.729;
constexpr double kAttraction = 2.05;

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_cost = std::numeric_limits<double>::infinity();
  Rng rng{0};
};

double evaluate(const Objective& objective, const SearchSpace& space,
                const std::vector<double>& position, std::vector<double>& scratch) {
  scratch = position;
  for (std::size_t d = 0; d < space.dims.size(); ++d)
    if (space.dims[d].integer) scratch[d] = std::round(scratch[d]);
  const double cost = objective(scratch);
  return std::isfinite(cost) ? cost : kPsoPenaltyCost;
}

}  // namespace

PsoResult pso_minimize(const Objective& objective, const SearchSpace& space,
                       std::size_t particles, std::size_t iterations, std::uint64_t seed) {
  space.validate();
  require(particles >= 2, "invalid-space", "at least two particles required");
  require(iterations >= 1, "invalid-space", "at least one iteration required");

  const std::size_t ndim = space.dims.size();
  std::vector<Particle> swarm(particles);
  std::vector<double> scratch(ndim);

  std::vector<double> gbest_position;
  double gbest_cost = std::numeric_limits<double>::infinity();

  for (std::size_t p = 0; p < particles; ++p) {
    auto& part = swarm[p];
    part.rng = Rng(mix_seed(seed, 0xbead00 + p));
    part.position.resize(ndim);
    part.velocity.resize(ndim);
    for (std::size_t d = 0; d < ndim; ++d) {
      const double range = space.dims[d].upper - space.dims[d].lower;
      part.position[d] = space.dims[d].lower + part.rng.uniform() * range;
      part.velocity[d] = (part.rng.uniform() - 0.5) * range;
    }
    const double cost = evaluate(objective, space, part.position, scratch);
    part.best_position = part.position;
    part.best_cost = cost;
    if (cost < gbest_cost) {
      gbest_cost = cost;
      gbest_position = part.position;
    }
  }

  PsoResult result;
  result.history.reserve(iterations);
  result.history.push_back(gbest_cost);

  for (std::size_t it = 1; it < iterations; ++it) {
    for (auto& part : swarm) {
      for (std::size_t d = 0; d < ndim; ++d) {
        const double r1 = part.rng.uniform();
        const double r2 = part.rng.uniform();
        part.velocity[d] =
            kChi * (part.velocity[d] + kAttraction * r1 * (part.best_position[d] - part.position[d]) +
                    kAttraction * r2 * (gbest_position[d] - part.position[d]));
        part.position[d] =
            std::clamp(part.position[d] + part.velocity[d], space.dims[d].lower, space.dims[d].upper);
      }
      const double cost = evaluate(objective, space, part.position, scratch);
      if (cost < part.best_cost) {
        part.best_cost = cost;
        part.best_position = part.position;
      }
    }
    for (const auto& part : swarm) {
      if (part.best_cost < gbest_cost) {
        gbest_cost = part.best_cost;
        gbest_position = part.best_position;
      }
    }
    result.history.push_back(gbest_cost);
  }

  for (std::size_t d = 0; d < ndim; ++d)
    if (space.dims[d].integer) gbest_position[d] = std::round(gbest_position[d]);
  result.best_point = std::move(gbest_position);
  result.best_cost = gbest_cost;
  return result;
}

}  // namespace vws
