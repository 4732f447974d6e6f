#include <iostream>

#include <CLI11.hpp>

#include "mplan/app/commands.hpp"

int main(int argc, char** argv) {
  using namespace mplan::app;

  CLI::App app{"Landing zone and rover traverse planner for lunar pit missions"};
  app.require_subcommand(1);

  CommandOptions options;
  std::string config_path, out_dir = ".", plan_path;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration (JSON)")->envname("MPLAN_CONFIG");
    sub->add_option("--out", out_dir, "Output directory")->envname("MPLAN_OUT");
    sub->add_flag("--quiet", options.quiet, "Suppress progress on stderr")->envname("MPLAN_QUIET");
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Annealing seed, overrides the config")->envname("MPLAN_SEED");
  };

  CLI::App* detect = app.add_subcommand("detect", "Detect regions and write the region dump and overlay");
  add_common(detect);
  detect->add_flag("--cells", options.include_cells, "Include region cells in the dump");

  CLI::App* plan = app.add_subcommand("plan", "Run the full pipeline and write the plan and renders");
  add_common(plan);
  add_seed(plan);

  CLI::App* oracle = app.add_subcommand("oracle", "Compare seeded annealing runs to the exhaustive optimum");
  add_common(oracle);
  add_seed(oracle);
  int seeds = 0;
  CLI::Option* seeds_opt = oracle->add_option("--seeds", seeds, "Number of seeded runs")->check(CLI::PositiveNumber);

  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic scene and its ground truth");
  add_common(synth);

  CLI::App* render = app.add_subcommand("render", "Re-render the overlays of an existing plan");
  add_common(render);
  render->add_option("--plan", plan_path, "Plan document (default: <out>/plan.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  options.config_path = config_path;
  options.out_dir = out_dir;
  options.plan_path = plan_path;
  for (CLI::App* sub : {plan, oracle})
    if (sub->parsed() && sub->count("--seed")) options.seed = seed;
  if (*seeds_opt) options.oracle_seeds = seeds;

  if (detect->parsed()) return cmd_detect(options, std::cerr);
  if (plan->parsed()) return cmd_plan(options, std::cerr);
  if (oracle->parsed()) return cmd_oracle(options, std::cerr);
  if (synth->parsed()) return cmd_synth(options, std::cerr);
  return cmd_render(options, std::cerr);
}
