#pragma once

#include <string>

#include "mplan/app/report.hpp"

namespace mplan::app {

/// Region overlay: obstacles red, pit pink, rim blue, landing candidates
/// yellow, over the quantized image. `labels` and `scene` may be null.
std::string detect_overlay_svg(const GrayImage& image, const SceneLabels* labels, const MissionScene* scene);

/// Hazards in the rover configuration space, the planned path in green, the
/// goal as a blue diamond and the landing zone as a yellow disk.
std::string plan_overlay_svg(const PreparedScene& scene, const PlanRecord& plan);

/// Energy against iteration: current energy, best-so-far (dashed) and
/// proposals as dots.
std::string trace_svg(const PlanRecord& plan);

}  // namespace mplan::app
