#include "mplan/app/pipeline.hpp"

#include <fmt/format.h>

namespace mplan::app {

MserParams mser_params_for(const GrayImage& image, const RunConfig& config) {
  MserParams p = MserParams::defaults_for(image, config.classify.obstacle_min_width_m);
  p.delta = config.mser.delta;
  p.max_variation = config.mser.max_variation;
  if (config.mser.min_area_cells) p.min_area_cells = *config.mser.min_area_cells;
  if (config.mser.max_area_cells) p.max_area_cells = *config.mser.max_area_cells;
  p.polarity = config.mser.polarity;
  p.duplicate_overlap = config.mser.duplicate_overlap;
  p.validate();
  return p;
}

GrayImage load_input(const RunConfig& config) {
  return run_stage("input", [&] {
    if (config.synth) return synth_scene(config.scene_seed, *config.synth).image;
    const auto path = resolved_input(config);
    try {
      return read_pgm_file(path, config.meters_per_cell);
    } catch (const PgmError& e) {
      throw IoError(fmt::format("{}: {}", path.string(), e.what()));
    }
  });
}

Detection run_detection(const RunConfig& config) {
  Detection d{load_input(config), {}};
  d.regions = run_stage("detect", [&] { return detect(d.image, mser_params_for(d.image, config)); });
  return d;
}

PreparedScene prepare_scene(const RunConfig& config, Detection detection) {
  PreparedScene out;
  out.image = std::move(detection.image);
  out.regions = std::move(detection.regions);
  const GridSize dims = out.image.size();
  out.labels = run_stage("classify", [&] {
    return classify(out.regions, config.meters_per_cell, config.classify, dims);
  });
  out.mission = run_stage("scene", [&] {
    Rng rng = Rng::stream(config.scene_seed, kCandidateStream);
    return build_scene(out.labels, dims, config.meters_per_cell, config.scene, rng);
  });
  return out;
}

PreparedScene prepare_scene(const RunConfig& config) { return prepare_scene(config, run_detection(config)); }

}  // namespace mplan::app
