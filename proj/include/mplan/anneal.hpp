#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mplan/rng.hpp"
#include "mplan/scene.hpp"
#include "mplan/search.hpp"

namespace mplan {

class OptimizeError : public Error {
 public:
  using Error::Error;
};

enum class EnergyMode {
  Symmetric,  // |L - target|
  Shortfall,  // as Symmetric, falling short is multiplied by a penalty
};

struct AnnealParams {
  double initial_temp = 100.0;  // meters of energy
  double alpha = 0.95;
  int max_iter = 100;
  double min_temp = 1e-3;
  double proposal_radius_max_m = 1500.0;
  double proposal_radius_min_m = 50.0;
  EnergyMode energy_mode = EnergyMode::Symmetric;
  double shortfall_penalty = 2.0;
  int init_retries = 100;

  void validate() const;
};

/// Deviation of a path length from the traverse target.
double energy(double length_m, double target_m, EnergyMode mode = EnergyMode::Symmetric,
              double shortfall_penalty = 1.0);

/// Geometric cooling: T_i = alpha^(i-1) * T_1.
double schedule_temp(int iteration, const AnnealParams& params);

/// Metropolis rule: downhill always; uphill with probability exp(-delta/T).
bool accept(double delta_e, double temperature, Rng& rng);

struct Configuration {
  std::size_t candidate_index = 0;
  Cell start;
  Cell goal;
  std::optional<Path> path;
  double energy_m = std::numeric_limits<double>::infinity();
};

/// Shared memo of A* results keyed by (start, goal). Safe for concurrent
/// use; results are pure functions of the scene, so a race at worst repeats
/// a search.
class PathCache {
 public:
  struct Entry {
    std::optional<Path> path;
    std::size_t expanded_nodes = 0;
  };

  explicit PathCache(GridSize size) : size_(size) {}

  [[nodiscard]] std::shared_ptr<const Entry> find(Cell start, Cell goal) const;
  std::shared_ptr<const Entry> insert(Cell start, Cell goal, Entry entry);

 private:
  [[nodiscard]] std::uint64_t key(Cell start, Cell goal) const;

  GridSize size_;
  mutable std::mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const Entry>> entries_;
};

struct EvalCounters {
  std::size_t searches = 0;
  std::size_t cache_hits = 0;
  std::size_t expanded_nodes = 0;
};

/// Pairs the candidate with its nearest goal and plans the path.
Configuration evaluate(const MissionScene& scene, std::size_t candidate_index, const AnnealParams& params,
                       PathCache& cache, EvalCounters& counters);

/// Draws the next candidate within rho(T) = max(rho_min, rho_max * T / T_1)
/// of the current one, falling back to any viable candidate. The result has
/// no path yet.
Configuration propose(const Configuration& current, double temperature, const MissionScene& scene,
                      std::span<const std::size_t> viable, const AnnealParams& params, Rng& rng);

struct TraceRecord {
  int iteration = 0;
  double temperature = 0.0;
  std::size_t proposed_candidate = 0;
  double proposed_energy = 0.0;
  double current_energy = 0.0;
  double best_energy = 0.0;
  bool accepted = false;
  bool uphill = false;
};

struct AnnealTrace {
  std::vector<TraceRecord> records;
};

struct MissionPlan {
  Configuration initial;
  Configuration best;
  AnnealTrace trace;
  std::uint64_t seed = 0;
  AnnealParams params;
  int iterations_run = 0;
  EvalCounters counters;
};

/// Simulated annealing over viable landing zones with a nested A* energy
/// evaluation. Returns the best configuration visited.
MissionPlan optimize(const MissionScene& scene, const AnnealParams& params, std::uint64_t seed,
                     PathCache* shared_cache = nullptr);

/// Evaluates every viable candidate; lowest energy wins, ties to the lowest
/// candidate index.
Configuration exhaustive_best(const MissionScene& scene, const AnnealParams& params, PathCache* shared_cache = nullptr,
                              std::size_t max_candidates = 10000);

}  // namespace mplan
