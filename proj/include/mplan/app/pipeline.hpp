#pragma once

#include <string>
#include <vector>

#include "mplan/anneal.hpp"
#include "mplan/app/config.hpp"
#include "mplan/mser.hpp"
#include "mplan/raster.hpp"
#include "mplan/scene.hpp"

namespace mplan::app {

enum class FailureKind { Config, Io, Infeasible, Module, Refused };

/// A failure tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, FailureKind kind, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)), kind_(kind) {}

  [[nodiscard]] const std::string& stage() const { return stage_; }
  [[nodiscard]] FailureKind kind() const { return kind_; }

 private:
  std::string stage_;
  FailureKind kind_;
};

/// Runs `fn`, rethrowing library errors as StageError for `stage`.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(stage, FailureKind::Config, e.what());
  } catch (const IoError& e) {
    throw StageError(stage, FailureKind::Io, e.what());
  } catch (const PgmError& e) {
    throw StageError(stage, FailureKind::Io, e.what());
  } catch (const InvalidArgument& e) {
    throw StageError(stage, FailureKind::Config, e.what());
  } catch (const OptimizeError& e) {
    throw StageError(stage, FailureKind::Infeasible, e.what());
  } catch (const Error& e) {
    throw StageError(stage, FailureKind::Module, e.what());
  }
}

MserParams mser_params_for(const GrayImage& image, const RunConfig& config);

/// Loads the input PGM or renders the synthetic scene.
GrayImage load_input(const RunConfig& config);

struct Detection {
  GrayImage image;
  std::vector<ExtremalRegion> regions;
};

Detection run_detection(const RunConfig& config);

/// Candidate sampling draws from this stream of the scene seed.
inline constexpr std::uint64_t kCandidateStream = 1;

struct PreparedScene {
  GrayImage image;
  std::vector<ExtremalRegion> regions;
  SceneLabels labels;
  MissionScene mission;
};

/// Input, detection, classification and scene assembly.
PreparedScene prepare_scene(const RunConfig& config);

/// Scene assembly for already-detected regions.
PreparedScene prepare_scene(const RunConfig& config, Detection detection);

}  // namespace mplan::app
