#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "mplan/app/commands.hpp"
#include "mplan/app/report.hpp"

using namespace mplan;
using namespace mplan::app;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("mplan_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json small_config() {
  return nlohmann::json::parse(R"({
    "schema_version": 1,
    "input": {"synth": {"width": 100, "height": 100, "pit_radius_m": 10.0, "crater_count": 5, "mound_count": 3,
                        "obstacle_radius_min_m": 1.0, "obstacle_radius_max_m": 4.0}},
    "meters_per_cell": 1.0,
    "scene_seed": 3,
    "seed": 5,
    "mission": {"lander_diameter_m": 6.0, "annulus_inner_m": 15.0, "annulus_outer_m": 40.0,
                "candidate_count": 300, "target_len_m": 30.0},
    "anneal": {"max_iter": 60},
    "oracle": {"seeds": 4, "max_candidates": 1000}
  })");
}

fs::path write_config(const TempDir& dir, const nlohmann::json& config, const std::string& name = "run.json") {
  const fs::path p = dir.path / name;
  std::ofstream(p) << config.dump(2);
  return p;
}

CommandOptions options_for(const fs::path& config, const fs::path& out) {
  CommandOptions o;
  o.config_path = config;
  o.out_dir = out;
  o.quiet = true;
  return o;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  const auto good = small_config();
  CHECK_NOTHROW(parse_config(good, "."));

  auto bad = good;
  bad["mission"]["annulus_outerr_m"] = 1.0;
  try {
    parse_config(bad, ".");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mission.annulus_outerr_m") != std::string::npos);
  }

  bad = good;
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(parse_config(bad, "."), ConfigError);
  bad = good;
  bad["mission"]["annulus_inner_m"] = 50.0;
  CHECK_THROWS_AS(parse_config(bad, "."), ConfigError);
  bad = good;
  bad["meters_per_cell"] = "one";
  CHECK_THROWS_AS(parse_config(bad, "."), ConfigError);
  bad = good;
  bad["input"]["pgm"] = "a.pgm";
  CHECK_THROWS_AS(parse_config(bad, "."), ConfigError);
  bad = good;
  bad["mser"] = {{"polarity", "sideways"}};
  CHECK_THROWS_AS(parse_config(bad, "."), ConfigError);
}

TEST_CASE("config echo round trips") {
  const RunConfig a = parse_config(small_config(), ".");
  const RunConfig b = parse_config(config_to_json(a), ".");
  CHECK(config_to_json(a) == config_to_json(b));
  CHECK(a.anneal.proposal_radius_max_m == 80.0);
}

TEST_CASE("fixed-point writer") {
  Json doc;
  doc["a"] = 1.5;
  doc["b"] = -0.0000001;
  doc["c"] = std::numeric_limits<double>::infinity();
  doc["d"] = Json::array({1, 2});
  doc["e"] = 7;
  const std::string text = dump_fixed(doc);
  CHECK(text.find("\"a\": 1.500000") != std::string::npos);
  CHECK(text.find("\"b\": 0.000000") != std::string::npos);
  CHECK(text.find("\"c\": null") != std::string::npos);
  CHECK(text.find("[1, 2]") != std::string::npos);
  CHECK(text.find("\"e\": 7") != std::string::npos);
  CHECK(Json::parse(text)["a"] == 1.5);
}

TEST_CASE("detect on a featureless scene writes an empty dump") {
  TempDir dir;
  auto config = small_config();
  config["input"]["synth"] = {{"width", 40}, {"height", 40}, {"pit_radius_m", 5.0}, {"crater_count", 0},
                              {"mound_count", 0}, {"noise_amplitude", 0}, {"background", 128}, {"pit_level", 128}};
  std::ostringstream err;
  CHECK(cmd_detect(options_for(write_config(dir, config), dir.path / "out"), err) == kExitOk);
  const auto dump = nlohmann::json::parse(slurp(dir.path / "out" / "regions.json"));
  CHECK(dump["regions"].empty());
  CHECK(dump["labels"].is_null());
  CHECK(fs::exists(dir.path / "out" / "detect_overlay.svg"));
}

TEST_CASE("detect labels the small scene") {
  TempDir dir;
  std::ostringstream err;
  auto o = options_for(write_config(dir, small_config()), dir.path / "out");
  o.include_cells = true;
  REQUIRE(cmd_detect(o, err) == kExitOk);
  const auto dump = nlohmann::json::parse(slurp(dir.path / "out" / "regions.json"));
  CHECK(dump["regions"].size() >= 9);
  CHECK(dump["regions"][0].contains("cells"));
  CHECK(dump["labels"]["pit_region"].is_number());
}

TEST_CASE("missing input reports the path") {
  TempDir dir;
  auto config = small_config();
  config["input"] = {{"pgm", "nowhere.pgm"}};
  std::ostringstream err;
  CHECK(cmd_detect(options_for(write_config(dir, config), dir.path / "out"), err) == kExitIo);
  CHECK(err.str().find("nowhere.pgm") != std::string::npos);

  std::ostringstream err2;
  CHECK(cmd_plan(options_for(dir.path / "absent.json", dir.path / "out"), err2) == kExitIo);
  CHECK(err2.str().find("absent.json") != std::string::npos);

  std::ostringstream err3;
  CHECK(cmd_plan(CommandOptions{}, err3) == kExitConfig);
}

TEST_CASE("an annulus off the grid fails with the stage named") {
  TempDir dir;
  auto config = small_config();
  config["mission"]["annulus_inner_m"] = 500.0;
  config["mission"]["annulus_outer_m"] = 800.0;
  std::ostringstream err;
  const int code = cmd_plan(options_for(write_config(dir, config), dir.path / "out"), err);
  CHECK(code != kExitOk);
  CHECK(err.str().find("[scene]") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "out" / "plan.json"));
}

TEST_CASE("plan is deterministic and render reproduces it") {
  TempDir dir;
  const auto cfg = write_config(dir, small_config());
  std::ostringstream err;
  REQUIRE(cmd_plan(options_for(cfg, dir.path / "a"), err) == kExitOk);
  REQUIRE(cmd_plan(options_for(cfg, dir.path / "b"), err) == kExitOk);
  for (const char* name : {"plan.json", "plan_overlay.svg", "trace.svg"})
    CHECK(slurp(dir.path / "a" / name) == slurp(dir.path / "b" / name));

  const auto plan = nlohmann::json::parse(slurp(dir.path / "a" / "plan.json"));
  CHECK(plan["seed"] == 5);
  CHECK(plan["iterations_run"] == 60);
  CHECK(plan["trace"].size() == 60);

  CommandOptions r;
  r.plan_path = dir.path / "a" / "plan.json";
  r.out_dir = dir.path / "r";
  r.quiet = true;
  REQUIRE(cmd_render(r, err) == kExitOk);
  CHECK(slurp(dir.path / "r" / "plan_overlay.svg") == slurp(dir.path / "a" / "plan_overlay.svg"));
  CHECK(slurp(dir.path / "r" / "trace.svg") == slurp(dir.path / "a" / "trace.svg"));
}

TEST_CASE("seed override") {
  TempDir dir;
  const auto cfg = write_config(dir, small_config());
  std::ostringstream err;
  auto o = options_for(cfg, dir.path / "s");
  o.seed = 99;
  REQUIRE(cmd_plan(o, err) == kExitOk);
  const auto plan = nlohmann::json::parse(slurp(dir.path / "s" / "plan.json"));
  CHECK(plan["seed"] == 99);
  CHECK(plan["config"]["seed"] == 99);
}

TEST_CASE("render rejects a tampered plan") {
  TempDir dir;
  const auto cfg = write_config(dir, small_config());
  std::ostringstream err;
  REQUIRE(cmd_plan(options_for(cfg, dir.path / "a"), err) == kExitOk);
  auto plan = nlohmann::json::parse(slurp(dir.path / "a" / "plan.json"));
  plan["energy_m"] = -1.0;
  std::ofstream(dir.path / "bad.json") << plan.dump();
  CommandOptions r;
  r.plan_path = dir.path / "bad.json";
  r.out_dir = dir.path / "r";
  r.quiet = true;
  std::ostringstream err2;
  CHECK(cmd_render(r, err2) == kExitStage);
  CHECK(err2.str().find("[validate]") != std::string::npos);
}

TEST_CASE("oracle with one viable candidate has zero gap") {
  TempDir dir;
  auto config = small_config();
  config["mission"]["candidate_count"] = 1;
  std::ostringstream err;
  auto o = options_for(write_config(dir, config), dir.path / "o");
  o.oracle_seeds = 3;
  REQUIRE(cmd_oracle(o, err) == kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir.path / "o" / "oracle.json"));
  REQUIRE(report["runs"].size() == 3);
  for (const auto& run : report["runs"]) CHECK(run["gap_m"] == 0.0);
  CHECK(report["summary"]["within_10m_fraction"] == 1.0);
  CHECK(report["summary"]["any_below_optimum"] == false);
}

TEST_CASE("oracle runs never beat the optimum") {
  TempDir dir;
  std::ostringstream err;
  REQUIRE(cmd_oracle(options_for(write_config(dir, small_config()), dir.path / "o"), err) == kExitOk);
  const auto report = nlohmann::json::parse(slurp(dir.path / "o" / "oracle.json"));
  CHECK(report["runs"].size() == 4);
  for (const auto& run : report["runs"]) CHECK(run["gap_m"].get<double>() >= 0.0);
}

TEST_CASE("oracle refuses large sweeps") {
  TempDir dir;
  auto config = small_config();
  config["oracle"]["max_candidates"] = 10;
  std::ostringstream err;
  CHECK(cmd_oracle(options_for(write_config(dir, config), dir.path / "o"), err) == kExitRefused);
  CHECK(err.str().find("viable candidates (limit 10)") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path / "o" / "oracle.json"));
}

TEST_CASE("synth output is reproducible") {
  TempDir dir;
  const auto cfg = write_config(dir, small_config());
  std::ostringstream err;
  REQUIRE(cmd_synth(options_for(cfg, dir.path / "a"), err) == kExitOk);
  REQUIRE(cmd_synth(options_for(cfg, dir.path / "b"), err) == kExitOk);
  CHECK(slurp(dir.path / "a" / "scene.pgm") == slurp(dir.path / "b" / "scene.pgm"));
  CHECK(slurp(dir.path / "a" / "truth.json") == slurp(dir.path / "b" / "truth.json"));
  const auto truth = nlohmann::json::parse(slurp(dir.path / "a" / "truth.json"));
  CHECK(truth["spec"]["crater_count"] == 5);
  CHECK(truth["scene_seed"] == 3);
  CHECK(truth["obstacles"].size() == 8);

  // The written scene detects the same as the synthetic input.
  auto from_pgm = small_config();
  from_pgm["input"] = {{"pgm", "a/scene.pgm"}};
  REQUIRE(cmd_detect(options_for(write_config(dir, from_pgm, "pgm.json"), dir.path / "p"), err) == kExitOk);
  REQUIRE(cmd_detect(options_for(cfg, dir.path / "q"), err) == kExitOk);
  const auto p = nlohmann::json::parse(slurp(dir.path / "p" / "regions.json"));
  const auto q = nlohmann::json::parse(slurp(dir.path / "q" / "regions.json"));
  CHECK(p["regions"] == q["regions"]);
}

TEST_CASE("synth needs a synthetic input") {
  TempDir dir;
  auto config = small_config();
  config["input"] = {{"pgm", "x.pgm"}};
  std::ostringstream err;
  CHECK(cmd_synth(options_for(write_config(dir, config), dir.path / "o"), err) == kExitConfig);
}
