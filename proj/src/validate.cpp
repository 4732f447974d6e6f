#include "mplan/validate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace mplan {

std::vector<std::string> validate_plan(const MissionScene& scene, const PlanClaim& claim, double energy_tolerance) {
  std::vector<std::string> out;
  if (claim.candidate_index >= scene.candidates.size()) {
    out.push_back(fmt::format("candidate index {} out of range", claim.candidate_index));
    return out;
  }
  const Candidate& cand = scene.candidates[claim.candidate_index];
  if (!cand.viable) out.emplace_back("start candidate is not viable");
  if (cand.cell != claim.start) out.emplace_back("start cell differs from the candidate cell");
  if (!scene.size().contains(claim.start) || scene.lander_cspace.occupied(claim.start))
    out.emplace_back("start is not free in the lander configuration space");

  const double dx = claim.start.x - scene.pit_center.x;
  const double dy = claim.start.y - scene.pit_center.y;
  const double dist_m = std::sqrt(dx * dx + dy * dy) * scene.meters_per_cell;
  if (dist_m < scene.annulus_inner_m - 1e-9 || dist_m > scene.annulus_outer_m + 1e-9) out.emplace_back("start lies outside the candidate annulus");

  if (!contains(scene.labels.rim_cells, claim.goal)) out.emplace_back("goal is not a rim cell");
  if (!contains(scene.goals, claim.goal)) out.emplace_back("goal is not a traversable goal site");
  if (!scene.goals.empty() && nearest_goal(cand, scene.goals, scene.meters_per_cell).goal != claim.goal)
    out.emplace_back("goal is not the nearest goal to the start");

  for (auto& v : path_violations(scene.costmap, claim.path, claim.start, claim.goal)) out.push_back(std::move(v));

  const double deviation = std::abs(claim.path.length_m - scene.target_len_m);
  if (claim.energy_m + energy_tolerance < deviation)
    out.push_back(fmt::format("energy {} m is below the length deviation {} m", claim.energy_m, deviation));
  return out;
}

}  // namespace mplan
