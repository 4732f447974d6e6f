#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mplan/common.hpp"
#include "mplan/costmap.hpp"
#include "mplan/mser.hpp"
#include "mplan/raster.hpp"
#include "mplan/rng.hpp"

namespace mplan {

class SceneError : public Error {
 public:
  using Error::Error;
};

struct Candidate {
  Cell cell;
  bool viable = false;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct StartGoalPair {
  Cell start;
  Cell goal;
  double straight_line_m = 0.0;
};

/// Everything the optimizer needs. Immutable once built.
struct MissionScene {
  OccupancyGrid workspace;      // raw hazards
  OccupancyGrid lander_cspace;  // lander footprint configuration space
  OccupancyGrid rover_cspace;   // rover footprint configuration space
  Costmap costmap;
  SceneLabels labels;
  std::vector<Candidate> candidates;
  CellSet goals;  // rim cells traversable by the rover
  Cell pit_center;
  double target_len_m = 550.0;
  double meters_per_cell = 1.0;
  double annulus_inner_m = 250.0;
  double annulus_outer_m = 750.0;

  [[nodiscard]] GridSize size() const { return workspace.size(); }
  [[nodiscard]] std::vector<std::size_t> viable_indices() const;
};

/// Cells drawn uniformly by area over the annulus [r_in_m, r_out_m] about
/// `pit_center`; draws that round off-grid or outside the annulus are redrawn.
std::vector<Candidate> generate_candidates(Cell pit_center, double r_in_m, double r_out_m, int count, GridSize dims,
                                           double meters_per_cell, Rng& rng);

/// Flags each candidate viable iff its cell is free in the lander cspace.
std::vector<Candidate> filter_viable(std::vector<Candidate> candidates, const OccupancyGrid& lander_cspace);

/// Nearest goal by Euclidean distance; ties go to the first goal in row-major order.
StartGoalPair nearest_goal(const Candidate& candidate, std::span<const Cell> goals, double meters_per_cell);

Costmap build_costmap(const OccupancyGrid& rover_cspace);

struct SceneParams {
  double lander_diameter_m = 50.0;
  double rover_side_m = 1.0;
  double annulus_inner_m = 250.0;
  double annulus_outer_m = 750.0;
  int candidate_count = 10000;
  double target_len_m = 550.0;
};

/// Rounded centroid of the pit.
Cell pit_center_of(const CellSet& pit_cells);

/// Assembles workspace, configuration spaces, costmap, candidates and goals
/// from classified labels.
MissionScene build_scene(const SceneLabels& labels, GridSize dims, double meters_per_cell, const SceneParams& params,
                         Rng& rng);

// ---------------------------------------------------------------------------
// Synthetic terrain

struct SceneSpec {
  int width = 64;
  int height = 64;
  double meters_per_cell = 1.0;
  double pit_radius_m = 8.0;
  std::optional<Cell> pit_center;  // image center when absent
  int crater_count = 0;
  int mound_count = 0;
  double obstacle_radius_min_m = 1.0;
  double obstacle_radius_max_m = 4.0;
  int gap_cells = 2;  // minimum background gap between features
  int background = 128;
  int noise_amplitude = 2;
  int pit_level = 40;
  int crater_level = 70;
  int mound_level = 190;
};

struct TruthRegion {
  CellSet cells;
  Polarity polarity = Polarity::Dark;
  Cell center;
  int radius_cells = 0;
};

struct SyntheticScene {
  GrayImage image;
  SceneLabels truth;  // region ids index into `obstacles`
  std::vector<TruthRegion> obstacles;
  TruthRegion pit;
};

/// Rasterized disk dx^2 + dy^2 <= r^2 about `center`, clipped to `dims`.
CellSet disk_cells(Cell center, int radius, GridSize dims);

SyntheticScene synth_scene(std::uint64_t seed, const SceneSpec& spec);

}  // namespace mplan
