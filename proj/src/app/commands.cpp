#include "mplan/app/commands.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

#include <fmt/format.h>

#include "mplan/app/pipeline.hpp"
#include "mplan/app/report.hpp"
#include "mplan/app/svg.hpp"
#include "mplan/validate.hpp"

namespace mplan::app {

namespace {

using Clock = std::chrono::steady_clock;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path output_dir(const CommandOptions& options) {
  return run_stage("output", [&] {
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", options.out_dir.string(), ec.message()));
    return options.out_dir;
  });
}

void write_output(const std::filesystem::path& path, const std::string& text) {
  run_stage("output", [&] { write_text(path, text); });
}

int exit_code_for(FailureKind kind) {
  switch (kind) {
    case FailureKind::Config: return kExitConfig;
    case FailureKind::Io: return kExitIo;
    case FailureKind::Infeasible: return kExitInfeasible;
    case FailureKind::Module: return kExitStage;
    case FailureKind::Refused: return kExitRefused;
  }
  return kExitStage;
}

/// Runs a command body, translating failures into messages and exit codes.
template <typename Fn>
int guarded(const char* command, std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const StageError& e) {
    err << fmt::format("mplan {}: [{}] {}\n", command, e.stage(), e.what());
    return exit_code_for(e.kind());
  } catch (const ConfigError& e) {
    err << fmt::format("mplan {}: [config] {}\n", command, e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    err << fmt::format("mplan {}: [io] {}\n", command, e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    err << fmt::format("mplan {}: internal error: {}\n", command, e.what());
    return kExitStage;
  }
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_plan(const PreparedScene& scene, const PlanRecord& record) {
  const auto violations = validate_plan(scene.mission, to_claim(record));
  if (violations.empty()) return;
  std::string msg = "emitted plan fails re-validation:";
  for (const auto& v : violations) msg += " " + v + ";";
  throw StageError("validate", FailureKind::Module, msg);
}

}  // namespace

RunConfig resolve_config(const CommandOptions& options) {
  RunConfig config = run_stage("config", [&] {
    if (options.config_path.empty()) throw ConfigError("no config given (use --config or MPLAN_CONFIG)");
    return load_config(options.config_path);
  });
  if (options.seed) config.seed = *options.seed;
  return config;
}

int cmd_detect(const CommandOptions& options, std::ostream& err) {
  return guarded("detect", err, [&] {
    const auto t0 = Clock::now();
    const RunConfig config = resolve_config(options);
    Detection detection = run_detection(config);
    const auto out = output_dir(options);
    if (detection.regions.empty()) {
      write_output(out / "regions.json",
                   dump_fixed(region_dump(config, detection.image, detection.regions, nullptr, options.include_cells)));
      write_output(out / "detect_overlay.svg", detect_overlay_svg(detection.image, nullptr, nullptr));
      if (!options.quiet) err << "detect: no regions found\n";
      return int{kExitOk};
    }
    const PreparedScene scene = prepare_scene(config, std::move(detection));
    write_output(out / "regions.json",
                 dump_fixed(region_dump(config, scene.image, scene.regions, &scene.labels, options.include_cells)));
    write_output(out / "detect_overlay.svg", detect_overlay_svg(scene.image, &scene.labels, &scene.mission));
    if (!options.quiet)
      err << fmt::format("detect: {} regions, {} obstacles, pit {} cells, rim {} cells, {} of {} candidates viable ({:.3f} s)\n",
                         scene.regions.size(), scene.labels.obstacle_region_ids.size(), scene.labels.pit_cells.size(),
                         scene.labels.rim_cells.size(), scene.mission.viable_indices().size(),
                         scene.mission.candidates.size(), seconds_since(t0));
    return int{kExitOk};
  });
}

int cmd_plan(const CommandOptions& options, std::ostream& err) {
  return guarded("plan", err, [&] {
    const auto t0 = Clock::now();
    const RunConfig config = resolve_config(options);
    const PreparedScene scene = prepare_scene(config);
    const MissionPlan plan = run_stage("anneal", [&] { return optimize(scene.mission, config.anneal, config.seed); });

    const std::string text = dump_fixed(plan_document(config, scene, plan));
    const PlanRecord record = parse_plan(Json::parse(text));
    check_plan(scene, record);

    const auto out = output_dir(options);
    write_output(out / "plan.json", text);
    write_output(out / "plan_overlay.svg", plan_overlay_svg(scene, record));
    write_output(out / "trace.svg", trace_svg(record));
    if (!options.quiet)
      err << fmt::format("plan: seed {}, start ({}, {}), goal ({}, {}), length {:.3f} m, energy {:.3f} m, {} iterations ({:.3f} s)\n",
                         plan.seed, record.start.x, record.start.y, record.goal.x, record.goal.y,
                         record.path.length_m, record.energy_m, record.iterations_run, seconds_since(t0));
    return int{kExitOk};
  });
}

int cmd_oracle(const CommandOptions& options, std::ostream& err) {
  return guarded("oracle", err, [&] {
    const auto t0 = Clock::now();
    const RunConfig config = resolve_config(options);
    const PreparedScene scene = prepare_scene(config);
    const std::size_t viable = scene.mission.viable_indices().size();
    if (viable > config.oracle_max_candidates)
      throw StageError("oracle", FailureKind::Refused,
                       fmt::format("refusing exhaustive sweep over {} viable candidates (limit {})", viable,
                                   config.oracle_max_candidates));

    PathCache cache(scene.mission.size());
    const Configuration optimum = run_stage("oracle", [&] {
      return exhaustive_best(scene.mission, config.anneal, &cache, config.oracle_max_candidates);
    });

    const int n = options.oracle_seeds.value_or(config.oracle_seeds);
    if (n < 1) throw ConfigError("oracle seed count must be >= 1");
    std::vector<std::future<MissionPlan>> jobs;
    for (int k = 0; k < n; ++k)
      jobs.push_back(std::async(std::launch::async, [&, k] {
        return optimize(scene.mission, config.anneal, config.seed + static_cast<std::uint64_t>(k), &cache);
      }));
    std::vector<OracleRun> runs;
    run_stage("anneal", [&] {
      for (auto& job : jobs) {
        MissionPlan p = job.get();
        runs.push_back({p.seed, p.best, p.iterations_run, p.counters});
      }
    });

    write_output(output_dir(options) / "oracle.json", dump_fixed(oracle_report(config, scene, optimum, runs)));
    if (!options.quiet) {
      std::size_t within = 0;
      for (const auto& r : runs) within += r.best.energy_m - optimum.energy_m <= 10.0 ? 1 : 0;
      err << fmt::format("oracle: optimum {:.3f} m over {} viable candidates; {} of {} runs within 10 m ({:.3f} s)\n",
                         optimum.energy_m, viable, within, runs.size(), seconds_since(t0));
    }
    return int{kExitOk};
  });
}

int cmd_synth(const CommandOptions& options, std::ostream& err) {
  return guarded("synth", err, [&] {
    const RunConfig config = resolve_config(options);
    if (!config.synth) throw ConfigError("synth needs an input.synth scene spec in the config");
    const SyntheticScene s = run_stage("synth", [&] { return synth_scene(config.scene_seed, *config.synth); });

    Json truth;
    truth["schema_version"] = kPlanSchemaVersion;
    const Json echo = Json::parse(config_to_json(config).dump());
    truth["spec"] = echo["input"]["synth"];
    truth["scene_seed"] = config.scene_seed;
    truth["meters_per_cell"] = config.meters_per_cell;
    truth["pit"] = {{"center", Json::array({s.pit.center.x, s.pit.center.y})},
                    {"radius_cells", s.pit.radius_cells},
                    {"cells", cell_runs(s.pit.cells)}};
    Json obstacles = Json::array();
    for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
      const TruthRegion& r = s.obstacles[i];
      obstacles.push_back({{"id", i},
                           {"polarity", polarity_name(r.polarity)},
                           {"center", Json::array({r.center.x, r.center.y})},
                           {"radius_cells", r.radius_cells},
                           {"area_cells", r.cells.size()},
                           {"cells", cell_runs(r.cells)}});
    }
    truth["obstacles"] = std::move(obstacles);
    truth["rim_cells"] = cell_runs(s.truth.rim_cells);

    const auto out = output_dir(options);
    run_stage("output", [&] { write_pgm_file(out / "scene.pgm", s.image); });
    write_output(out / "truth.json", dump_fixed(truth));
    if (!options.quiet)
      err << fmt::format("synth: {}x{} scene, {} obstacles, pit radius {} cells\n", s.image.width(), s.image.height(),
                         s.obstacles.size(), s.pit.radius_cells);
    return int{kExitOk};
  });
}

int cmd_render(const CommandOptions& options, std::ostream& err) {
  return guarded("render", err, [&] {
    const auto plan_path = options.plan_path.empty() ? options.out_dir / "plan.json" : options.plan_path;
    const PlanRecord record = run_stage("input", [&] {
      const std::string text = read_text(plan_path);
      try {
        return parse_plan(Json::parse(text));
      } catch (const Json::parse_error& e) {
        throw ConfigError(fmt::format("{}: invalid JSON: {}", plan_path.string(), e.what()));
      }
    });
    // The plan carries its resolved config; relative inputs resolve next to
    // the config file when one is given, else next to the plan.
    const auto base = options.config_path.empty() ? plan_path.parent_path() : options.config_path.parent_path();
    const RunConfig config = run_stage("config", [&] {
      return parse_config(nlohmann::json::parse(record.config.dump()), base);
    });
    const PreparedScene scene = prepare_scene(config);
    check_plan(scene, record);

    const auto out = output_dir(options);
    write_output(out / "plan_overlay.svg", plan_overlay_svg(scene, record));
    write_output(out / "trace.svg", trace_svg(record));
    if (!options.quiet) err << fmt::format("render: wrote overlays for seed {}\n", record.seed);
    return int{kExitOk};
  });
}

}  // namespace mplan::app
