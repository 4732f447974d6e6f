#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "mplan/app/config.hpp"

namespace mplan::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitInfeasible = 4,
  kExitStage = 5,
  kExitRefused = 6,
};

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;  // overrides the config's annealing seed
  std::filesystem::path out_dir = ".";
  bool quiet = false;
  std::filesystem::path plan_path;  // render input; defaults to <out>/plan.json
  std::optional<int> oracle_seeds;
  bool include_cells = false;  // detect: dump region cells
};

/// Config from the options, with the seed override applied.
RunConfig resolve_config(const CommandOptions& options);

// Each command reports failures on `err` and returns the exit code.
int cmd_detect(const CommandOptions& options, std::ostream& err);
int cmd_plan(const CommandOptions& options, std::ostream& err);
int cmd_oracle(const CommandOptions& options, std::ostream& err);
int cmd_synth(const CommandOptions& options, std::ostream& err);
int cmd_render(const CommandOptions& options, std::ostream& err);

}  // namespace mplan::app
