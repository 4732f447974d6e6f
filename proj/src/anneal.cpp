#include "mplan/anneal.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mplan {

void AnnealParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument(fmt::format("alpha must be in (0, 1), got {}", alpha));
  if (max_iter < 1) throw InvalidArgument(fmt::format("max_iter must be >= 1, got {}", max_iter));
  if (!(initial_temp > 0.0)) throw InvalidArgument("initial temperature must be positive");
  if (!(min_temp >= 0.0 && min_temp < initial_temp))
    throw InvalidArgument("minimum temperature must be in [0, initial temperature)");
  if (!(proposal_radius_min_m >= 0.0) || proposal_radius_max_m < proposal_radius_min_m)
    throw InvalidArgument("proposal radii must satisfy 0 <= min <= max");
  if (!(shortfall_penalty >= 1.0)) throw InvalidArgument("shortfall penalty must be >= 1");
  if (init_retries < 1) throw InvalidArgument("init_retries must be >= 1");
}

double energy(double length_m, double target_m, EnergyMode mode, double shortfall_penalty) {
  const double deviation = std::abs(length_m - target_m);
  if (mode == EnergyMode::Shortfall && length_m < target_m) return deviation * shortfall_penalty;
  return deviation;
}

double schedule_temp(int iteration, const AnnealParams& params) {
  if (iteration < 1) throw InvalidArgument("schedule iterations start at 1");
  return std::pow(params.alpha, iteration - 1) * params.initial_temp;
}

bool accept(double delta_e, double temperature, Rng& rng) {
  if (delta_e <= 0.0) return true;
  if (!std::isfinite(delta_e)) return false;
  return rng.uniform01() < std::exp(-delta_e / temperature);
}

// ---------------------------------------------------------------------------

std::uint64_t PathCache::key(Cell start, Cell goal) const {
  return static_cast<std::uint64_t>(size_.index(start)) * size_.cell_count() + size_.index(goal);
}

std::shared_ptr<const PathCache::Entry> PathCache::find(Cell start, Cell goal) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key(start, goal));
  return it == entries_.end() ? nullptr : it->second;
}

std::shared_ptr<const PathCache::Entry> PathCache::insert(Cell start, Cell goal, Entry entry) {
  auto fresh = std::make_shared<const Entry>(std::move(entry));
  std::lock_guard lock(mutex_);
  return entries_.try_emplace(key(start, goal), std::move(fresh)).first->second;
}

Configuration evaluate(const MissionScene& scene, std::size_t candidate_index, const AnnealParams& params,
                       PathCache& cache, EvalCounters& counters) {
  const Candidate& candidate = scene.candidates.at(candidate_index);
  const StartGoalPair pair = nearest_goal(candidate, scene.goals, scene.meters_per_cell);

  auto entry = cache.find(pair.start, pair.goal);
  if (entry) {
    ++counters.cache_hits;
  } else {
    SearchResult r = astar(scene.costmap, pair.start, pair.goal);
    ++counters.searches;
    counters.expanded_nodes += r.stats.expanded_nodes;
    entry = cache.insert(pair.start, pair.goal, {std::move(r.path), r.stats.expanded_nodes});
  }

  Configuration config;
  config.candidate_index = candidate_index;
  config.start = pair.start;
  config.goal = pair.goal;
  config.path = entry->path;
  if (config.path)
    config.energy_m = energy(config.path->length_m, scene.target_len_m, params.energy_mode, params.shortfall_penalty);
  return config;
}

Configuration propose(const Configuration& current, double temperature, const MissionScene& scene,
                      std::span<const std::size_t> viable, const AnnealParams& params, Rng& rng) {
  if (viable.empty()) throw OptimizeError("no viable landing zone candidates");
  const double radius_m =
      std::max(params.proposal_radius_min_m, params.proposal_radius_max_m * temperature / params.initial_temp);
  const double radius_cells_sq = (radius_m / scene.meters_per_cell) * (radius_m / scene.meters_per_cell);
  const Cell here = scene.candidates.at(current.candidate_index).cell;

  std::vector<std::size_t> nearby;
  for (const std::size_t idx : viable) {
    if (idx == current.candidate_index) continue;
    const Cell c = scene.candidates[idx].cell;
    const double dx = c.x - here.x;
    const double dy = c.y - here.y;
    if (dx * dx + dy * dy <= radius_cells_sq) nearby.push_back(idx);
  }

  Configuration next;
  next.candidate_index = nearby.empty() ? viable[rng.uniform_index(viable.size())]
                                        : nearby[rng.uniform_index(nearby.size())];
  const StartGoalPair pair = nearest_goal(scene.candidates[next.candidate_index], scene.goals, scene.meters_per_cell);
  next.start = pair.start;
  next.goal = pair.goal;
  return next;
}

MissionPlan optimize(const MissionScene& scene, const AnnealParams& params, std::uint64_t seed,
                     PathCache* shared_cache) {
  params.validate();
  const std::vector<std::size_t> viable = scene.viable_indices();
  if (viable.empty()) throw OptimizeError("no viable landing zone candidates");
  if (scene.goals.empty()) throw OptimizeError("no goal sites on the rim");

  PathCache local_cache(scene.size());
  PathCache& cache = shared_cache ? *shared_cache : local_cache;

  MissionPlan plan;
  plan.seed = seed;
  plan.params = params;
  Rng rng(seed);

  Configuration current;
  bool initialized = false;
  for (int attempt = 0; attempt < params.init_retries && !initialized; ++attempt) {
    current = evaluate(scene, viable[rng.uniform_index(viable.size())], params, cache, plan.counters);
    initialized = current.path.has_value();
  }
  if (!initialized)
    throw OptimizeError(
        fmt::format("no reachable initial configuration after {} draws", params.init_retries));
  plan.initial = current;
  plan.best = current;

  for (int i = 1; i <= params.max_iter; ++i) {
    const double temperature = schedule_temp(i, params);
    if (temperature < params.min_temp) break;

    Configuration next = propose(current, temperature, scene, viable, params, rng);
    next = evaluate(scene, next.candidate_index, params, cache, plan.counters);
    const double delta = next.energy_m - current.energy_m;

    TraceRecord rec;
    rec.iteration = i;
    rec.temperature = temperature;
    rec.proposed_candidate = next.candidate_index;
    rec.proposed_energy = next.energy_m;
    rec.uphill = delta > 0.0;
    rec.accepted = accept(delta, temperature, rng);
    if (rec.accepted) current = std::move(next);
    if (current.energy_m < plan.best.energy_m) plan.best = current;
    rec.current_energy = current.energy_m;
    rec.best_energy = plan.best.energy_m;
    plan.trace.records.push_back(rec);
    plan.iterations_run = i;
  }
  return plan;
}

Configuration exhaustive_best(const MissionScene& scene, const AnnealParams& params, PathCache* shared_cache,
                              std::size_t max_candidates) {
  const std::vector<std::size_t> viable = scene.viable_indices();
  if (viable.size() > max_candidates)
    throw OptimizeError(fmt::format("exhaustive sweep refused: {} viable candidates exceed the limit of {}",
                                    viable.size(), max_candidates));
  if (viable.empty()) throw OptimizeError("no viable landing zone candidates");

  PathCache local_cache(scene.size());
  PathCache& cache = shared_cache ? *shared_cache : local_cache;
  EvalCounters counters;
  std::optional<Configuration> best;
  for (const std::size_t idx : viable) {
    Configuration c = evaluate(scene, idx, params, cache, counters);
    if (c.path && (!best || c.energy_m < best->energy_m)) best = std::move(c);
  }
  if (!best) throw OptimizeError("no viable candidate has a reachable goal");
  return *best;
}

}  // namespace mplan
