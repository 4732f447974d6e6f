#include "mplan/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace mplan {

std::vector<std::size_t> MissionScene::viable_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (candidates[i].viable) out.push_back(i);
  return out;
}

namespace {

std::int64_t squared_distance(Cell a, Cell b) {
  const std::int64_t dx = a.x - b.x;
  const std::int64_t dy = a.y - b.y;
  return dx * dx + dy * dy;
}

bool in_annulus(Cell c, Cell center, double r_in_sq, double r_out_sq, double mpc_sq) {
  const double d2 = static_cast<double>(squared_distance(c, center)) * mpc_sq;
  return d2 >= r_in_sq && d2 <= r_out_sq;
}

}  // namespace

std::vector<Candidate> generate_candidates(Cell pit_center, double r_in_m, double r_out_m, int count, GridSize dims,
                                           double meters_per_cell, Rng& rng) {
  if (!(r_in_m > 0.0) || !(r_out_m > r_in_m))
    throw InvalidArgument(fmt::format("annulus radii must satisfy 0 < r_in < r_out, got [{}, {}]", r_in_m, r_out_m));
  if (count <= 0) throw InvalidArgument(fmt::format("candidate count must be positive, got {}", count));

  const double r_in_sq = r_in_m * r_in_m;
  const double r_out_sq = r_out_m * r_out_m;
  const double mpc_sq = meters_per_cell * meters_per_cell;

  // Reject up front when no grid cell lies in the annulus at all.
  const int reach = static_cast<int>(std::ceil(r_out_m / meters_per_cell)) + 1;
  bool reachable = false;
  for (int y = std::max(0, pit_center.y - reach); y <= std::min(dims.height - 1, pit_center.y + reach) && !reachable; ++y)
    for (int x = std::max(0, pit_center.x - reach); x <= std::min(dims.width - 1, pit_center.x + reach); ++x)
      if (in_annulus({x, y}, pit_center, r_in_sq, r_out_sq, mpc_sq)) {
        reachable = true;
        break;
      }
  if (!reachable)
    throw SceneError(fmt::format("annulus [{} m, {} m] around ({}, {}) lies entirely outside the {}x{} grid", r_in_m,
                                 r_out_m, pit_center.x, pit_center.y, dims.width, dims.height));

  std::vector<Candidate> out;
  out.reserve(static_cast<std::size_t>(count));
  const long long budget = 1000LL * count + 100000;
  for (long long attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
    if (attempt >= budget)
      throw SceneError(fmt::format("annulus sampling produced only {} of {} in-grid candidates", out.size(), count));
    const double r_cells = std::sqrt(rng.uniform(r_in_sq, r_out_sq)) / meters_per_cell;
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Cell c{pit_center.x + static_cast<int>(std::lround(r_cells * std::cos(theta))),
                 pit_center.y + static_cast<int>(std::lround(r_cells * std::sin(theta)))};
    if (!dims.contains(c) || !in_annulus(c, pit_center, r_in_sq, r_out_sq, mpc_sq)) continue;
    out.push_back({c, false});
  }
  return out;
}

std::vector<Candidate> filter_viable(std::vector<Candidate> candidates, const OccupancyGrid& lander_cspace) {
  for (auto& c : candidates) c.viable = lander_cspace.size().contains(c.cell) && lander_cspace.free(c.cell);
  return candidates;
}

StartGoalPair nearest_goal(const Candidate& candidate, std::span<const Cell> goals, double meters_per_cell) {
  if (goals.empty()) throw SceneError("nearest_goal: no goal sites");
  const Cell* best = &goals[0];
  std::int64_t best_d2 = squared_distance(candidate.cell, goals[0]);
  for (const Cell& g : goals.subspan(1)) {
    const std::int64_t d2 = squared_distance(candidate.cell, g);
    if (d2 < best_d2 || (d2 == best_d2 && g < *best)) {
      best = &g;
      best_d2 = d2;
    }
  }
  return {candidate.cell, *best, std::sqrt(static_cast<double>(best_d2)) * meters_per_cell};
}

Costmap build_costmap(const OccupancyGrid& rover_cspace) {
  return {rover_cspace.size(), rover_cspace.meters_per_cell(),
          std::vector<std::uint8_t>(rover_cspace.cells().begin(), rover_cspace.cells().end())};
}

Cell pit_center_of(const CellSet& pit_cells) {
  if (pit_cells.empty()) throw SceneError("pit has no cells");
  long long sx = 0, sy = 0;
  for (const Cell c : pit_cells) {
    sx += c.x;
    sy += c.y;
  }
  const auto n = static_cast<double>(pit_cells.size());
  return {static_cast<int>(std::lround(static_cast<double>(sx) / n)),
          static_cast<int>(std::lround(static_cast<double>(sy) / n))};
}

MissionScene build_scene(const SceneLabels& labels, GridSize dims, double meters_per_cell, const SceneParams& params,
                         Rng& rng) {
  MissionScene scene;
  scene.meters_per_cell = meters_per_cell;
  scene.target_len_m = params.target_len_m;
  scene.annulus_inner_m = params.annulus_inner_m;
  scene.annulus_outer_m = params.annulus_outer_m;
  scene.labels = labels;

  scene.workspace = OccupancyGrid(dims, meters_per_cell);
  scene.workspace.mark(labels.obstacle_cells);

  // The lander may not overlap the pit; the rover may stand on the rim but
  // not drive into the pit.
  OccupancyGrid lander_hazards = scene.workspace;
  lander_hazards.mark(labels.pit_cells);
  scene.lander_cspace = dilate_obstacles(lander_hazards, disk_element(params.lander_diameter_m, meters_per_cell));
  scene.rover_cspace = dilate_obstacles(scene.workspace, square_element(params.rover_side_m, meters_per_cell));
  scene.rover_cspace.mark(labels.pit_cells);
  scene.costmap = build_costmap(scene.rover_cspace);

  for (const Cell c : labels.rim_cells)
    if (scene.rover_cspace.free(c)) scene.goals.push_back(c);
  if (scene.goals.empty()) throw SceneError("no rim cell is traversable by the rover");

  scene.pit_center = pit_center_of(labels.pit_cells);
  scene.candidates = filter_viable(generate_candidates(scene.pit_center, params.annulus_inner_m,
                                                       params.annulus_outer_m, params.candidate_count, dims,
                                                       meters_per_cell, rng),
                                   scene.lander_cspace);
  return scene;
}

// ---------------------------------------------------------------------------

CellSet disk_cells(Cell center, int radius, GridSize dims) {
  CellSet cells;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) {
      const Cell c{center.x + dx, center.y + dy};
      if (dx * dx + dy * dy <= radius * radius && dims.contains(c)) cells.push_back(c);
    }
  return cells;  // row-major by construction
}

namespace {

struct Placed {
  Cell center;
  int radius;
};

bool fits_in_frame(Cell c, int radius, GridSize dims) {
  // One background cell of margin keeps every feature enclosed.
  return c.x - radius >= 1 && c.y - radius >= 1 && c.x + radius <= dims.width - 2 && c.y + radius <= dims.height - 2;
}

std::uint8_t clamp_level(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

}  // namespace

SyntheticScene synth_scene(std::uint64_t seed, const SceneSpec& spec) {
  const GridSize dims{spec.width, spec.height};
  if (dims.width <= 0 || dims.height <= 0)
    throw InvalidArgument(fmt::format("scene dimensions must be positive, got {}x{}", dims.width, dims.height));
  if (!(spec.meters_per_cell > 0.0)) throw InvalidArgument("scene meters_per_cell must be positive");
  if (spec.crater_count < 0 || spec.mound_count < 0) throw InvalidArgument("feature counts must be non-negative");
  if (spec.noise_amplitude < 0) throw InvalidArgument("noise amplitude must be non-negative");

  Rng rng(seed);
  const int pit_radius = std::max(1, static_cast<int>(std::lround(spec.pit_radius_m / spec.meters_per_cell)));
  const Cell pit_center = spec.pit_center.value_or(Cell{dims.width / 2, dims.height / 2});
  if (!fits_in_frame(pit_center, pit_radius, dims))
    throw SceneError(fmt::format("pit of radius {} cells at ({}, {}) does not fit the {}x{} frame", pit_radius,
                                 pit_center.x, pit_center.y, dims.width, dims.height));

  const int r_lo = std::max(1, static_cast<int>(std::ceil(spec.obstacle_radius_min_m / spec.meters_per_cell - 1e-9)));
  const int r_hi = static_cast<int>(std::floor(spec.obstacle_radius_max_m / spec.meters_per_cell + 1e-9));
  const int feature_count = spec.crater_count + spec.mound_count;
  if (feature_count > 0 && r_hi < r_lo)
    throw SceneError(fmt::format("obstacle radius range [{} m, {} m] holds no whole cell radius",
                                 spec.obstacle_radius_min_m, spec.obstacle_radius_max_m));

  std::vector<Placed> placed{{pit_center, pit_radius}};
  for (int k = 0; k < feature_count; ++k) {
    bool ok = false;
    for (int attempt = 0; attempt < 10000 && !ok; ++attempt) {
      const int r = rng.uniform_int(r_lo, r_hi);
      const Cell c{rng.uniform_int(0, dims.width - 1), rng.uniform_int(0, dims.height - 1)};
      if (!fits_in_frame(c, r, dims)) continue;
      ok = std::all_of(placed.begin(), placed.end(), [&](const Placed& p) {
        const double min_sep = p.radius + r + spec.gap_cells;
        return squared_distance(p.center, c) > min_sep * min_sep;
      });
      if (ok) placed.push_back({c, r});
    }
    if (!ok) throw SceneError(fmt::format("could not place feature {} of {} without overlap", k + 1, feature_count));
  }

  std::vector<int> levels(dims.cell_count(), spec.background);
  SyntheticScene out;
  out.pit = {disk_cells(pit_center, pit_radius, dims), Polarity::Dark, pit_center, pit_radius};
  for (const Cell c : out.pit.cells) levels[dims.index(c)] = spec.pit_level;
  for (int k = 0; k < feature_count; ++k) {
    const Placed& p = placed[static_cast<std::size_t>(k) + 1];
    const bool crater = k < spec.crater_count;
    TruthRegion region{disk_cells(p.center, p.radius, dims), crater ? Polarity::Dark : Polarity::Bright, p.center,
                       p.radius};
    for (const Cell c : region.cells) levels[dims.index(c)] = crater ? spec.crater_level : spec.mound_level;
    out.truth.obstacle_region_ids.push_back(out.obstacles.size());
    out.truth.obstacle_cells.insert(out.truth.obstacle_cells.end(), region.cells.begin(), region.cells.end());
    out.obstacles.push_back(std::move(region));
  }

  std::vector<std::uint8_t> pixels(dims.cell_count());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const int noise = spec.noise_amplitude > 0 ? rng.uniform_int(-spec.noise_amplitude, spec.noise_amplitude) : 0;
    pixels[i] = clamp_level(levels[i] + noise);
  }
  out.image = GrayImage(dims.width, dims.height, spec.meters_per_cell, std::move(pixels));

  normalize(out.truth.obstacle_cells);
  out.truth.pit_cells = out.pit.cells;
  for (const Cell c : extract_rim(out.pit.cells, dims))
    if (!contains(out.truth.obstacle_cells, c)) out.truth.rim_cells.push_back(c);
  return out;
}

}  // namespace mplan
