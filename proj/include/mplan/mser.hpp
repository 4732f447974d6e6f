#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mplan/common.hpp"
#include "mplan/raster.hpp"

namespace mplan {

enum class Polarity { Dark, Bright };
enum class PolaritySelection { Dark, Bright, Both };

struct MserParams {
  /// Threshold step, in intensity levels, of the stability ratio.
  int delta = 5;
  int min_area_cells = 1;
  int max_area_cells = 1;
  double max_variation = 0.25;
  PolaritySelection polarity = PolaritySelection::Both;
  /// Nested regions overlapping more than this fraction collapse to the most
  /// stable one.
  double duplicate_overlap = 0.9;

  /// Defaults for an image: area floor from a 2 m feature, ceiling at a
  /// quarter of the frame.
  static MserParams defaults_for(const GrayImage& img, double min_feature_m = 2.0);

  void validate() const;
};

struct BoundingBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  [[nodiscard]] int width() const { return x_max - x_min + 1; }
  [[nodiscard]] int height() const { return y_max - y_min + 1; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ExtremalRegion {
  CellSet cells;
  /// Threshold (original intensity) at which the region first appears: the
  /// region is a component of {I <= level} for dark, {I >= level} for bright.
  int level = 0;
  double stability = 0.0;
  Polarity polarity = Polarity::Dark;
  BoundingBox bbox;

  [[nodiscard]] std::size_t area() const { return cells.size(); }
};

/// Maximally stable extremal regions, dark regions first, each polarity in
/// component-tree creation order.
///
/// Stability of a region is the minimum over its threshold range of
/// (A(l + delta) - A(l - delta)) / A(l), where the lower area follows the
/// largest-child branch (ties to the child holding the smallest row-major
/// cell) and is 0 where that branch has not yet appeared. Duplicate
/// suppression visits regions by stability, then level, then smallest cell.
std::vector<ExtremalRegion> detect(const GrayImage& img, const MserParams& params);

struct PitRule {
  enum class Kind { LargestArea, SeedCell };
  Kind kind = Kind::LargestArea;
  Cell seed;

  static PitRule largest() { return {}; }
  static PitRule seed_at(Cell c) { return {Kind::SeedCell, c}; }
};

struct ClassifyParams {
  double obstacle_min_width_m = 2.0;
  double terrain_cutoff_m = 200.0;
  PitRule pit_rule;
};

struct SceneLabels {
  CellSet obstacle_cells;
  CellSet pit_cells;
  CellSet rim_cells;
  std::size_t pit_region = 0;
  std::vector<std::size_t> obstacle_region_ids;
  std::vector<std::size_t> terrain_region_ids;
  /// Regions narrower than the obstacle width floor.
  std::vector<std::size_t> small_region_ids;
};

class ClassifyError : public Error {
 public:
  using Error::Error;
};

/// Splits regions into pit, obstacles, terrain and sub-threshold features,
/// and derives the rim.
SceneLabels classify(std::span<const ExtremalRegion> regions, double meters_per_cell, const ClassifyParams& params,
                     GridSize dims);

/// Exterior 8-connected border of the pit.
CellSet extract_rim(const CellSet& pit_cells, GridSize dims);

}  // namespace mplan
