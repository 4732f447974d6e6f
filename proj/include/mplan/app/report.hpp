#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mplan/anneal.hpp"
#include "mplan/app/config.hpp"
#include "mplan/app/pipeline.hpp"
#include "mplan/validate.hpp"

namespace mplan::app {

using Json = nlohmann::ordered_json;

/// Serializes with two-space indentation and every float in fixed 6-decimal
/// form. Non-finite floats become null. Arrays of scalars stay on one line.
std::string dump_fixed(const Json& doc);

/// Cell sets as [y, x_begin, x_end] runs, x_end exclusive.
Json cell_runs(const CellSet& cells);
CellSet cells_from_runs(const Json& runs);

const char* polarity_name(Polarity p);

/// regions.json
Json region_dump(const RunConfig& config, const GrayImage& image, const std::vector<ExtremalRegion>& regions,
                 const SceneLabels* labels, bool include_cells);

/// plan.json
Json plan_document(const RunConfig& config, const PreparedScene& scene, const MissionPlan& plan);

/// The fields of a plan document needed to render and re-validate it.
struct PlanRecord {
  int schema_version = 0;
  Json config;
  std::uint64_t seed = 0;
  std::size_t candidate_index = 0;
  Cell start;
  Cell goal;
  Path path;
  double energy_m = 0.0;
  double initial_energy_m = 0.0;
  int iterations_run = 0;
  double initial_temp = 0.0;
  std::vector<TraceRecord> trace;
};

PlanRecord parse_plan(const Json& doc);

PlanClaim to_claim(const PlanRecord& record);

struct OracleRun {
  std::uint64_t seed = 0;
  Configuration best;
  int iterations_run = 0;
  EvalCounters counters;
};

/// oracle.json
Json oracle_report(const RunConfig& config, const PreparedScene& scene, const Configuration& optimum,
                   const std::vector<OracleRun>& runs);

}  // namespace mplan::app
