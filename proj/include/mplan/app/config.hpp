#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "mplan/anneal.hpp"
#include "mplan/mser.hpp"
#include "mplan/scene.hpp"

namespace mplan::app {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kPlanSchemaVersion = 1;

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct MserConfig {
  int delta = 5;
  double max_variation = 0.25;
  std::optional<int> min_area_cells;  // derived from the obstacle width floor when absent
  std::optional<int> max_area_cells;  // a quarter of the image when absent
  PolaritySelection polarity = PolaritySelection::Both;
  double duplicate_overlap = 0.9;
};

/// Every knob of a run. Defaults are the mission constants.
struct RunConfig {
  std::optional<std::string> input_pgm;  // as written in the config
  std::filesystem::path base_dir;        // directory input paths resolve against
  std::optional<SceneSpec> synth;
  double meters_per_cell = 1.0;
  std::uint64_t scene_seed = 1;  // synthetic terrain and candidate sampling
  std::uint64_t seed = 1;        // annealing
  MserConfig mser;
  ClassifyParams classify;
  SceneParams scene;
  AnnealParams anneal;
  bool proposal_radius_max_set = false;  // otherwise twice the annulus outer radius
  int oracle_seeds = 20;
  std::size_t oracle_max_candidates = 10000;
};

/// Parses a config document. Unknown keys are rejected. Relative input paths
/// resolve against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

/// Input raster path resolved against the config's directory.
std::filesystem::path resolved_input(const RunConfig& config);

/// Resolved configuration, every default filled in.
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace mplan::app
