#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mplan/scene.hpp"
#include "mplan/search.hpp"

namespace mplan {

/// The parts of an emitted plan that can be re-checked against a scene.
struct PlanClaim {
  std::size_t candidate_index = 0;
  Cell start;
  Cell goal;
  Path path;
  double energy_m = 0.0;
};

/// Re-validates a plan: viable start inside the annulus, goal on the
/// traversable rim and nearest to the start, and a path satisfying every
/// Path invariant on the rover costmap. Returns the violations found.
std::vector<std::string> validate_plan(const MissionScene& scene, const PlanClaim& claim, double energy_tolerance = 1e-5);

}  // namespace mplan
