#include "mplan/app/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mplan::app {

namespace {

std::string fixed(double v) {
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

bool is_flat(const Json& j) {
  for (const auto& e : j)
    if (e.is_structured()) {
      for (const auto& inner : e)
        if (inner.is_structured()) return false;
      if (e.is_object()) return false;
    }
  return true;
}

void write_inline(const Json& j, std::string& out);

void write_scalar(const Json& j, std::string& out) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    out += std::isfinite(v) ? fixed(v) : "null";
  } else {
    out += j.dump();
  }
}

void write_inline(const Json& j, std::string& out) {
  if (!j.is_array()) {
    write_scalar(j, out);
    return;
  }
  out += '[';
  bool first = true;
  for (const auto& e : j) {
    if (!first) out += ", ";
    first = false;
    write_inline(e, out);
  }
  out += ']';
}

void write(const Json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(key).dump() + ": ";
      write(value, indent + 2, out);
    }
    out += '\n' + std::string(static_cast<std::size_t>(indent), ' ') + '}';
  } else if (j.is_array()) {
    const bool scalars = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
    if (j.empty() || scalars) {
      write_inline(j, out);
      return;
    }
    // Arrays of small tuples get one tuple per line.
    out += "[\n";
    bool first = true;
    for (const auto& e : j) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      if (e.is_array() && is_flat(e))
        write_inline(e, out);
      else
        write(e, indent + 2, out);
    }
    out += '\n' + std::string(static_cast<std::size_t>(indent), ' ') + ']';
  } else {
    write_scalar(j, out);
  }
}

Json cell_json(Cell c) { return Json::array({c.x, c.y}); }

Cell json_cell(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("expected an [x, y] cell");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

Json energy_json(double e) { return std::isfinite(e) ? Json(e) : Json(nullptr); }

double json_energy(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

const char* region_class(std::size_t id, const SceneLabels& labels) {
  auto in = [id](const std::vector<std::size_t>& v) { return std::find(v.begin(), v.end(), id) != v.end(); };
  if (id == labels.pit_region) return "pit";
  if (in(labels.obstacle_region_ids)) return "obstacle";
  if (in(labels.terrain_region_ids)) return "terrain";
  if (in(labels.small_region_ids)) return "small";
  return "unclassified";
}

Json scene_summary(const PreparedScene& scene) {
  const MissionScene& m = scene.mission;
  return Json{{"width", m.size().width},
              {"height", m.size().height},
              {"meters_per_cell", m.meters_per_cell},
              {"pit_center", cell_json(m.pit_center)},
              {"regions", scene.regions.size()},
              {"obstacle_regions", scene.labels.obstacle_region_ids.size()},
              {"pit_cells", scene.labels.pit_cells.size()},
              {"rim_cells", scene.labels.rim_cells.size()},
              {"goal_sites", m.goals.size()},
              {"candidates", m.candidates.size()},
              {"viable_candidates", m.viable_indices().size()}};
}

Json start_json(const MissionScene& scene, const Configuration& c) {
  const double dx = (c.start.x - scene.pit_center.x) * scene.meters_per_cell;
  const double dy = (c.start.y - scene.pit_center.y) * scene.meters_per_cell;
  return Json{{"candidate_index", c.candidate_index},
              {"cell", cell_json(c.start)},
              {"offset_m", Json::array({dx, dy})},
              {"distance_m", std::hypot(dx, dy)}};
}

}  // namespace

std::string dump_fixed(const Json& doc) {
  std::string out;
  write(doc, 0, out);
  out += '\n';
  return out;
}

Json cell_runs(const CellSet& cells) {
  Json runs = Json::array();
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i + 1;
    while (j < cells.size() && cells[j].y == cells[i].y && cells[j].x == cells[j - 1].x + 1) ++j;
    runs.push_back(Json::array({cells[i].y, cells[i].x, cells[j - 1].x + 1}));
    i = j;
  }
  return runs;
}

CellSet cells_from_runs(const Json& runs) {
  CellSet out;
  for (const auto& r : runs)
    for (int x = r.at(1).get<int>(); x < r.at(2).get<int>(); ++x) out.push_back({x, r.at(0).get<int>()});
  normalize(out);
  return out;
}

const char* polarity_name(Polarity p) { return p == Polarity::Dark ? "dark" : "bright"; }

Json region_dump(const RunConfig& config, const GrayImage& image, const std::vector<ExtremalRegion>& regions,
                 const SceneLabels* labels, bool include_cells) {
  Json doc;
  doc["schema_version"] = kPlanSchemaVersion;
  doc["config"] = Json::parse(config_to_json(config).dump());
  doc["image"] = {{"width", image.width()}, {"height", image.height()}, {"meters_per_cell", image.meters_per_cell()}};
  Json list = Json::array();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const ExtremalRegion& r = regions[i];
    Json rec{{"id", i},
             {"polarity", polarity_name(r.polarity)},
             {"level", r.level},
             {"stability", r.stability},
             {"area_cells", r.area()},
             {"bbox", Json::array({r.bbox.x_min, r.bbox.y_min, r.bbox.x_max, r.bbox.y_max})},
             {"class", labels ? region_class(i, *labels) : "unclassified"}};
    if (include_cells) rec["cells"] = cell_runs(r.cells);
    list.push_back(std::move(rec));
  }
  doc["regions"] = std::move(list);
  if (labels) {
    doc["labels"] = {{"pit_region", labels->pit_region},
                     {"obstacle_region_ids", labels->obstacle_region_ids},
                     {"terrain_region_ids", labels->terrain_region_ids},
                     {"small_region_ids", labels->small_region_ids},
                     {"obstacle_cells", labels->obstacle_cells.size()},
                     {"pit_cells", labels->pit_cells.size()},
                     {"rim_cells", labels->rim_cells.size()}};
  } else {
    doc["labels"] = nullptr;
  }
  return doc;
}

Json plan_document(const RunConfig& config, const PreparedScene& scene, const MissionPlan& plan) {
  const Configuration& best = plan.best;
  Json doc;
  doc["schema_version"] = kPlanSchemaVersion;
  doc["config"] = Json::parse(config_to_json(config).dump());
  doc["seed"] = plan.seed;
  doc["scene"] = scene_summary(scene);
  doc["start"] = start_json(scene.mission, best);
  doc["goal"] = {{"cell", cell_json(best.goal)}};
  Json waypoints = Json::array();
  for (const Cell c : best.path->waypoints) waypoints.push_back(cell_json(c));
  doc["waypoints"] = std::move(waypoints);
  doc["axial_steps"] = best.path->steps.axial;
  doc["diagonal_steps"] = best.path->steps.diagonal;
  doc["length_m"] = best.path->length_m;
  doc["energy_m"] = best.energy_m;
  doc["initial"] = {{"candidate_index", plan.initial.candidate_index}, {"energy_m", plan.initial.energy_m}};
  doc["iterations_run"] = plan.iterations_run;
  doc["initial_temp"] = plan.params.initial_temp;
  Json trace = Json::array();
  for (const TraceRecord& r : plan.trace.records)
    trace.push_back({{"iteration", r.iteration},
                     {"temperature", r.temperature},
                     {"proposed_candidate", r.proposed_candidate},
                     {"proposed_energy", energy_json(r.proposed_energy)},
                     {"current_energy", r.current_energy},
                     {"best_energy", r.best_energy},
                     {"accepted", r.accepted},
                     {"uphill", r.uphill}});
  doc["trace"] = std::move(trace);
  doc["timing"] = {{"astar_searches", plan.counters.searches},
                   {"cache_hits", plan.counters.cache_hits},
                   {"expanded_nodes", plan.counters.expanded_nodes}};
  return doc;
}

PlanRecord parse_plan(const Json& doc) {
  try {
    PlanRecord r;
    r.schema_version = doc.at("schema_version").get<int>();
    if (r.schema_version != kPlanSchemaVersion)
      throw ConfigError(fmt::format("unsupported plan schema_version {}", r.schema_version));
    r.config = doc.at("config");
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.candidate_index = doc.at("start").at("candidate_index").get<std::size_t>();
    r.start = json_cell(doc.at("start").at("cell"));
    r.goal = json_cell(doc.at("goal").at("cell"));
    for (const auto& w : doc.at("waypoints")) r.path.waypoints.push_back(json_cell(w));
    r.path.steps = {doc.at("axial_steps").get<std::int64_t>(), doc.at("diagonal_steps").get<std::int64_t>()};
    r.path.length_m = doc.at("length_m").get<double>();
    r.energy_m = doc.at("energy_m").get<double>();
    r.initial_energy_m = doc.at("initial").at("energy_m").get<double>();
    r.iterations_run = doc.at("iterations_run").get<int>();
    r.initial_temp = doc.at("initial_temp").get<double>();
    for (const auto& t : doc.at("trace")) {
      TraceRecord rec;
      rec.iteration = t.at("iteration").get<int>();
      rec.temperature = t.at("temperature").get<double>();
      rec.proposed_candidate = t.at("proposed_candidate").get<std::size_t>();
      rec.proposed_energy = json_energy(t.at("proposed_energy"));
      rec.current_energy = t.at("current_energy").get<double>();
      rec.best_energy = t.at("best_energy").get<double>();
      rec.accepted = t.at("accepted").get<bool>();
      rec.uphill = t.at("uphill").get<bool>();
      r.trace.push_back(rec);
    }
    return r;
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("malformed plan document: {}", e.what()));
  }
}

PlanClaim to_claim(const PlanRecord& record) {
  return {record.candidate_index, record.start, record.goal, record.path, record.energy_m};
}

Json oracle_report(const RunConfig& config, const PreparedScene& scene, const Configuration& optimum,
                   const std::vector<OracleRun>& runs) {
  Json doc;
  doc["schema_version"] = kPlanSchemaVersion;
  doc["config"] = Json::parse(config_to_json(config).dump());
  doc["scene"] = scene_summary(scene);
  doc["optimum"] = {{"start", start_json(scene.mission, optimum)},
                    {"goal", cell_json(optimum.goal)},
                    {"length_m", optimum.path->length_m},
                    {"energy_m", optimum.energy_m}};
  Json list = Json::array();
  std::size_t within = 0;
  bool below = false;
  for (const OracleRun& r : runs) {
    const double gap = r.best.energy_m - optimum.energy_m;
    within += gap <= 10.0 ? 1 : 0;
    below = below || gap < 0.0;
    list.push_back({{"seed", r.seed},
                    {"candidate_index", r.best.candidate_index},
                    {"energy_m", r.best.energy_m},
                    {"gap_m", gap},
                    {"iterations_run", r.iterations_run},
                    {"astar_searches", r.counters.searches}});
  }
  doc["runs"] = std::move(list);
  doc["summary"] = {{"runs", runs.size()},
                    {"within_10m", within},
                    {"within_10m_fraction", runs.empty() ? 0.0 : static_cast<double>(within) / runs.size()},
                    {"any_below_optimum", below}};
  return doc;
}

}  // namespace mplan::app
