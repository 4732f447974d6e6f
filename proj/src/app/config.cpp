#include "mplan/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace mplan::app {

using nlohmann::json;

namespace {

// Reads an object field by field and rejects anything left unread.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{} must be an object", label()));
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (const json* v = take(key)) out = convert<T>(*v, key);
  }

  template <typename T>
  void read_optional(const char* key, std::optional<T>& out) {
    if (const json* v = take(key)) out = v->is_null() ? std::nullopt : std::optional<T>(convert<T>(*v, key));
  }

  const json* take(const char* key) {
    const auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  [[nodiscard]] std::string child(const char* key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError(fmt::format("unknown config key '{}'", child(key.c_str())));
  }

 private:
  [[nodiscard]] std::string label() const { return where_.empty() ? "config" : "'" + where_ + "'"; }

  template <typename T>
  T convert(const json& v, const char* key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>)
          if (v.get<long long>() < 0) throw ConfigError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("config key '{}' has the wrong type or range", child(key)));
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

Cell read_cell(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ConfigError(fmt::format("'{}' must be an [x, y] integer pair", where));
  return {v[0].get<int>(), v[1].get<int>()};
}

PolaritySelection parse_polarity(const std::string& s) {
  if (s == "dark") return PolaritySelection::Dark;
  if (s == "bright") return PolaritySelection::Bright;
  if (s == "both") return PolaritySelection::Both;
  throw ConfigError(fmt::format("mser.polarity must be dark, bright or both, got '{}'", s));
}

const char* polarity_name(PolaritySelection p) {
  switch (p) {
    case PolaritySelection::Dark: return "dark";
    case PolaritySelection::Bright: return "bright";
    case PolaritySelection::Both: return "both";
  }
  return "both";
}

SceneSpec parse_synth(const json& j, const std::string& where) {
  SceneSpec spec;
  StrictObject o(j, where);
  o.read("width", spec.width);
  o.read("height", spec.height);
  o.read("pit_radius_m", spec.pit_radius_m);
  if (const json* c = o.take("pit_center"); c && !c->is_null()) spec.pit_center = read_cell(*c, o.child("pit_center"));
  o.read("crater_count", spec.crater_count);
  o.read("mound_count", spec.mound_count);
  o.read("obstacle_radius_min_m", spec.obstacle_radius_min_m);
  o.read("obstacle_radius_max_m", spec.obstacle_radius_max_m);
  o.read("gap_cells", spec.gap_cells);
  o.read("background", spec.background);
  o.read("noise_amplitude", spec.noise_amplitude);
  o.read("pit_level", spec.pit_level);
  o.read("crater_level", spec.crater_level);
  o.read("mound_level", spec.mound_level);
  o.finish();
  return spec;
}

void validate(const RunConfig& c) {
  if (!(c.meters_per_cell > 0.0) || !std::isfinite(c.meters_per_cell))
    throw ConfigError("meters_per_cell must be positive and finite");
  if (c.input_pgm.has_value() == c.synth.has_value())
    throw ConfigError("input must name exactly one of 'pgm' or 'synth'");
  if (!(c.scene.lander_diameter_m > 0.0)) throw ConfigError("mission.lander_diameter_m must be positive");
  if (!(c.scene.rover_side_m > 0.0)) throw ConfigError("mission.rover_side_m must be positive");
  if (!(c.scene.annulus_inner_m > 0.0) || !(c.scene.annulus_outer_m > c.scene.annulus_inner_m))
    throw ConfigError("mission annulus must satisfy 0 < annulus_inner_m < annulus_outer_m");
  if (c.scene.candidate_count <= 0) throw ConfigError("mission.candidate_count must be positive");
  if (!(c.scene.target_len_m >= 0.0)) throw ConfigError("mission.target_len_m must be non-negative");
  if (!(c.classify.obstacle_min_width_m >= 0.0) || !(c.classify.terrain_cutoff_m > c.classify.obstacle_min_width_m))
    throw ConfigError("classify widths must satisfy 0 <= obstacle_min_width_m < terrain_cutoff_m");
  if (c.oracle_seeds < 1) throw ConfigError("oracle.seeds must be >= 1");
  try {
    c.anneal.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("anneal: {}", e.what()));
  }
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  StrictObject root(doc, "");

  int version = kConfigSchemaVersion;
  root.read("schema_version", version);
  if (version != kConfigSchemaVersion)
    throw ConfigError(fmt::format("unsupported config schema_version {} (expected {})", version, kConfigSchemaVersion));

  if (const json* in = root.take("input")) {
    StrictObject o(*in, "input");
    std::optional<std::string> pgm;
    o.read_optional("pgm", pgm);
    c.input_pgm = pgm;
    if (const json* s = o.take("synth")) c.synth = parse_synth(*s, "input.synth");
    o.finish();
  }
  root.read("meters_per_cell", c.meters_per_cell);
  if (c.synth) c.synth->meters_per_cell = c.meters_per_cell;
  root.read("scene_seed", c.scene_seed);
  root.read("seed", c.seed);

  if (const json* m = root.take("mser")) {
    StrictObject o(*m, "mser");
    o.read("delta", c.mser.delta);
    o.read("max_variation", c.mser.max_variation);
    o.read_optional("min_area_cells", c.mser.min_area_cells);
    o.read_optional("max_area_cells", c.mser.max_area_cells);
    std::string polarity = polarity_name(c.mser.polarity);
    o.read("polarity", polarity);
    c.mser.polarity = parse_polarity(polarity);
    o.read("duplicate_overlap", c.mser.duplicate_overlap);
    o.finish();
  }

  if (const json* k = root.take("classify")) {
    StrictObject o(*k, "classify");
    o.read("obstacle_min_width_m", c.classify.obstacle_min_width_m);
    o.read("terrain_cutoff_m", c.classify.terrain_cutoff_m);
    if (const json* rule = o.take("pit_rule")) {
      if (rule->is_string() && rule->get<std::string>() == "largest") {
        c.classify.pit_rule = PitRule::largest();
      } else if (rule->is_object()) {
        StrictObject r(*rule, "classify.pit_rule");
        const json* seed = r.take("seed");
        if (!seed) throw ConfigError("classify.pit_rule object needs a 'seed' cell");
        c.classify.pit_rule = PitRule::seed_at(read_cell(*seed, "classify.pit_rule.seed"));
        r.finish();
      } else {
        throw ConfigError("classify.pit_rule must be \"largest\" or {\"seed\": [x, y]}");
      }
    }
    o.finish();
  }

  if (const json* m = root.take("mission")) {
    StrictObject o(*m, "mission");
    o.read("lander_diameter_m", c.scene.lander_diameter_m);
    o.read("rover_side_m", c.scene.rover_side_m);
    o.read("annulus_inner_m", c.scene.annulus_inner_m);
    o.read("annulus_outer_m", c.scene.annulus_outer_m);
    o.read("candidate_count", c.scene.candidate_count);
    o.read("target_len_m", c.scene.target_len_m);
    o.finish();
  }

  if (const json* a = root.take("anneal")) {
    StrictObject o(*a, "anneal");
    o.read("initial_temp", c.anneal.initial_temp);
    o.read("alpha", c.anneal.alpha);
    o.read("max_iter", c.anneal.max_iter);
    o.read("min_temp", c.anneal.min_temp);
    std::optional<double> rho_max;
    o.read_optional("proposal_radius_max_m", rho_max);
    if (rho_max) {
      c.anneal.proposal_radius_max_m = *rho_max;
      c.proposal_radius_max_set = true;
    }
    o.read("proposal_radius_min_m", c.anneal.proposal_radius_min_m);
    std::string mode = "symmetric";
    o.read("energy_mode", mode);
    if (mode == "symmetric") {
      c.anneal.energy_mode = EnergyMode::Symmetric;
    } else if (mode == "shortfall") {
      c.anneal.energy_mode = EnergyMode::Shortfall;
    } else {
      throw ConfigError(fmt::format("anneal.energy_mode must be symmetric or shortfall, got '{}'", mode));
    }
    o.read("shortfall_penalty", c.anneal.shortfall_penalty);
    o.read("init_retries", c.anneal.init_retries);
    o.finish();
  }
  if (!c.proposal_radius_max_set) c.anneal.proposal_radius_max_m = 2.0 * c.scene.annulus_outer_m;

  if (const json* r = root.take("oracle")) {
    StrictObject o(*r, "oracle");
    o.read("seeds", c.oracle_seeds);
    o.read("max_candidates", c.oracle_max_candidates);
    o.finish();
  }
  root.finish();
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
  return parse_config(doc, path.parent_path());
}

std::filesystem::path resolved_input(const RunConfig& config) {
  if (!config.input_pgm) return {};
  const std::filesystem::path p(*config.input_pgm);
  return p.is_absolute() ? p : config.base_dir / p;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  if (c.input_pgm) {
    j["input"] = {{"pgm", *c.input_pgm}};
  } else if (c.synth) {
    const SceneSpec& s = *c.synth;
    json synth = {{"width", s.width},
                  {"height", s.height},
                  {"pit_radius_m", s.pit_radius_m},
                  {"crater_count", s.crater_count},
                  {"mound_count", s.mound_count},
                  {"obstacle_radius_min_m", s.obstacle_radius_min_m},
                  {"obstacle_radius_max_m", s.obstacle_radius_max_m},
                  {"gap_cells", s.gap_cells},
                  {"background", s.background},
                  {"noise_amplitude", s.noise_amplitude},
                  {"pit_level", s.pit_level},
                  {"crater_level", s.crater_level},
                  {"mound_level", s.mound_level}};
    synth["pit_center"] = s.pit_center ? json::array({s.pit_center->x, s.pit_center->y}) : json(nullptr);
    j["input"] = {{"synth", synth}};
  }
  j["meters_per_cell"] = c.meters_per_cell;
  j["scene_seed"] = c.scene_seed;
  j["seed"] = c.seed;
  j["mser"] = {{"delta", c.mser.delta},
               {"max_variation", c.mser.max_variation},
               {"min_area_cells", c.mser.min_area_cells ? json(*c.mser.min_area_cells) : json(nullptr)},
               {"max_area_cells", c.mser.max_area_cells ? json(*c.mser.max_area_cells) : json(nullptr)},
               {"polarity", polarity_name(c.mser.polarity)},
               {"duplicate_overlap", c.mser.duplicate_overlap}};
  json pit_rule = c.classify.pit_rule.kind == PitRule::Kind::LargestArea
                      ? json("largest")
                      : json{{"seed", {c.classify.pit_rule.seed.x, c.classify.pit_rule.seed.y}}};
  j["classify"] = {{"obstacle_min_width_m", c.classify.obstacle_min_width_m},
                   {"terrain_cutoff_m", c.classify.terrain_cutoff_m},
                   {"pit_rule", pit_rule}};
  j["mission"] = {{"lander_diameter_m", c.scene.lander_diameter_m},
                  {"rover_side_m", c.scene.rover_side_m},
                  {"annulus_inner_m", c.scene.annulus_inner_m},
                  {"annulus_outer_m", c.scene.annulus_outer_m},
                  {"candidate_count", c.scene.candidate_count},
                  {"target_len_m", c.scene.target_len_m}};
  j["anneal"] = {{"initial_temp", c.anneal.initial_temp},
                 {"alpha", c.anneal.alpha},
                 {"max_iter", c.anneal.max_iter},
                 {"min_temp", c.anneal.min_temp},
                 {"proposal_radius_max_m", c.anneal.proposal_radius_max_m},
                 {"proposal_radius_min_m", c.anneal.proposal_radius_min_m},
                 {"energy_mode", c.anneal.energy_mode == EnergyMode::Symmetric ? "symmetric" : "shortfall"},
                 {"shortfall_penalty", c.anneal.shortfall_penalty},
                 {"init_retries", c.anneal.init_retries}};
  j["oracle"] = {{"seeds", c.oracle_seeds}, {"max_candidates", c.oracle_max_candidates}};
  return j;
}

}  // namespace mplan::app
