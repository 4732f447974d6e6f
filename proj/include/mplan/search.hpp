#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mplan/common.hpp"
#include "mplan/costmap.hpp"

namespace mplan {

/// Path cost as `axial + diagonal * sqrt(2)` cells, kept as integers so that
/// costs compare exactly.
struct StepCount {
  std::int64_t axial = 0;
  std::int64_t diagonal = 0;

  [[nodiscard]] double cells() const;
  [[nodiscard]] double meters(double meters_per_cell) const { return cells() * meters_per_cell; }

  friend StepCount operator+(StepCount a, StepCount b) { return {a.axial + b.axial, a.diagonal + b.diagonal}; }
  friend bool operator==(const StepCount&, const StepCount&) = default;
};

/// Exact sign of cost(a) - cost(b): -1, 0 or +1.
int compare_cost(StepCount a, StepCount b);

struct Path {
  std::vector<Cell> waypoints;
  StepCount steps;
  double length_m = 0.0;
};

enum class SearchOutcome { Found, Unreachable };

struct SearchStats {
  std::size_t expanded_nodes = 0;
  std::size_t open_list_peak = 0;
  SearchOutcome outcome = SearchOutcome::Unreachable;
};

struct SearchResult {
  std::optional<Path> path;
  SearchStats stats;
};

class SearchError : public Error {
 public:
  using Error::Error;
};

/// Octile distance from a to b in exact step form.
StepCount octile_steps(Cell a, Cell b);

/// Octile distance in meters.
double octile_h(Cell a, Cell b, double meters_per_cell);

/// Traversable 8-neighbours of `c`. Diagonal moves require both adjacent
/// axial cells to be traversable (no corner cutting).
std::vector<Cell> successors(const Costmap& costmap, Cell c);

/// A* with the octile heuristic. Equal-f nodes pop larger-g first, then in
/// row-major order.
SearchResult astar(const Costmap& costmap, Cell start, Cell goal);

/// Uniform-cost search with the same cost model and tie order.
SearchResult dijkstra(const Costmap& costmap, Cell start, Cell goal);

struct ConsistencyViolation {
  Cell node;
  Cell successor;
};

struct ConsistencyReport {
  std::size_t checked_pairs = 0;
  std::vector<ConsistencyViolation> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Checks h(n) <= c(n, n') + h(n') for each sampled node and each of its
/// successors, toward `goal`.
ConsistencyReport check_consistency(const Costmap& costmap, std::span<const Cell> nodes, Cell goal);

/// Describes every broken Path invariant (empty when valid).
std::vector<std::string> path_violations(const Costmap& costmap, const Path& path, Cell start, Cell goal);

}  // namespace mplan
