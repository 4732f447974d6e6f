#include "mplan/search.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <fmt/format.h>

namespace mplan {

double StepCount::cells() const {
  return static_cast<double>(axial) + static_cast<double>(diagonal) * std::numbers::sqrt2;
}

int compare_cost(StepCount a, StepCount b) {
  // sign(da + db * sqrt2) without floating point.
  const std::int64_t da = a.axial - b.axial;
  const std::int64_t db = a.diagonal - b.diagonal;
  if (da >= 0 && db >= 0) return (da == 0 && db == 0) ? 0 : 1;
  if (da <= 0 && db <= 0) return -1;
  const std::int64_t lhs = da * da;
  const std::int64_t rhs = 2 * db * db;
  if (da > 0) return lhs > rhs ? 1 : -1;  // db < 0; equality impossible, sqrt2 is irrational
  return rhs > lhs ? 1 : -1;
}

StepCount octile_steps(Cell a, Cell b) {
  const std::int64_t dx = std::abs(a.x - b.x);
  const std::int64_t dy = std::abs(a.y - b.y);
  return {std::max(dx, dy) - std::min(dx, dy), std::min(dx, dy)};
}

double octile_h(Cell a, Cell b, double meters_per_cell) { return octile_steps(a, b).meters(meters_per_cell); }

namespace {

struct Move {
  int dx;
  int dy;
};

constexpr Move kMoves[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

bool move_allowed(const Costmap& costmap, Cell from, Move m) {
  const Cell to{from.x + m.dx, from.y + m.dy};
  if (!costmap.traversable(to)) return false;
  if (m.dx != 0 && m.dy != 0)
    return costmap.traversable({from.x + m.dx, from.y}) && costmap.traversable({from.x, from.y + m.dy});
  return true;
}

StepCount step_cost(Move m) { return (m.dx != 0 && m.dy != 0) ? StepCount{0, 1} : StepCount{1, 0}; }

struct OpenEntry {
  StepCount f;
  StepCount g;
  std::size_t index;
};

// Heap order: "a pops after b".
struct PopsLater {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (const int c = compare_cost(a.f, b.f); c != 0) return c > 0;
    if (const int c = compare_cost(a.g, b.g); c != 0) return c < 0;
    return a.index > b.index;
  }
};

void check_endpoint(const Costmap& costmap, Cell c, const char* role) {
  if (!costmap.in_bounds(c)) throw SearchError(fmt::format("{} ({}, {}) is out of bounds", role, c.x, c.y));
  if (costmap.blocked(c)) throw SearchError(fmt::format("{} ({}, {}) is blocked", role, c.x, c.y));
}

SearchResult best_first(const Costmap& costmap, Cell start, Cell goal, bool use_heuristic) {
  check_endpoint(costmap, start, "start");
  check_endpoint(costmap, goal, "goal");

  const GridSize size = costmap.size();
  const std::size_t n = size.cell_count();
  constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);
  std::vector<StepCount> g(n);
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::uint8_t> closed(n, 0);
  std::vector<std::size_t> parent(n, kNoParent);

  auto heuristic = [&](Cell c) { return use_heuristic ? octile_steps(c, goal) : StepCount{}; };

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, PopsLater> open;
  const std::size_t start_index = size.index(start);
  const std::size_t goal_index = size.index(goal);
  g[start_index] = {};
  seen[start_index] = 1;
  open.push({heuristic(start), {}, start_index});

  SearchResult result;
  result.stats.open_list_peak = 1;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;  // stale entry
    closed[top.index] = 1;
    ++result.stats.expanded_nodes;

    if (top.index == goal_index) {
      Path path;
      for (std::size_t i = goal_index; i != kNoParent; i = parent[i]) path.waypoints.push_back(size.cell(i));
      std::reverse(path.waypoints.begin(), path.waypoints.end());
      path.steps = g[goal_index];
      path.length_m = path.steps.meters(costmap.meters_per_cell());
      result.path = std::move(path);
      result.stats.outcome = SearchOutcome::Found;
      return result;
    }

    const Cell q = size.cell(top.index);
    for (const Move m : kMoves) {
      if (!move_allowed(costmap, q, m)) continue;
      const Cell s{q.x + m.dx, q.y + m.dy};
      const std::size_t si = size.index(s);
      if (closed[si]) continue;
      const StepCount g_new = top.g + step_cost(m);
      if (seen[si] && compare_cost(g[si], g_new) <= 0) continue;
      seen[si] = 1;
      g[si] = g_new;
      parent[si] = top.index;
      open.push({g_new + heuristic(s), g_new, si});
    }
    result.stats.open_list_peak = std::max(result.stats.open_list_peak, open.size());
  }
  result.stats.outcome = SearchOutcome::Unreachable;
  return result;
}

}  // namespace

std::vector<Cell> successors(const Costmap& costmap, Cell c) {
  std::vector<Cell> out;
  for (const Move m : kMoves)
    if (move_allowed(costmap, c, m)) out.push_back({c.x + m.dx, c.y + m.dy});
  return out;
}

SearchResult astar(const Costmap& costmap, Cell start, Cell goal) { return best_first(costmap, start, goal, true); }

SearchResult dijkstra(const Costmap& costmap, Cell start, Cell goal) {
  return best_first(costmap, start, goal, false);
}

ConsistencyReport check_consistency(const Costmap& costmap, std::span<const Cell> nodes, Cell goal) {
  ConsistencyReport report;
  for (const Cell n : nodes) {
    if (!costmap.traversable(n)) continue;
    const StepCount h_n = octile_steps(n, goal);
    for (const Move m : kMoves) {
      if (!move_allowed(costmap, n, m)) continue;
      const Cell s{n.x + m.dx, n.y + m.dy};
      ++report.checked_pairs;
      if (compare_cost(h_n, step_cost(m) + octile_steps(s, goal)) > 0) report.violations.push_back({n, s});
    }
  }
  return report;
}

std::vector<std::string> path_violations(const Costmap& costmap, const Path& path, Cell start, Cell goal) {
  std::vector<std::string> out;
  if (path.waypoints.empty()) {
    out.emplace_back("path has no waypoints");
    return out;
  }
  if (path.waypoints.front() != start) out.emplace_back("path does not begin at the start cell");
  if (path.waypoints.back() != goal) out.emplace_back("path does not end at the goal cell");
  StepCount steps;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const Cell c = path.waypoints[i];
    if (!costmap.traversable(c)) out.push_back(fmt::format("waypoint {} ({}, {}) is blocked", i, c.x, c.y));
    if (i == 0) continue;
    const Cell p = path.waypoints[i - 1];
    const int dx = std::abs(c.x - p.x);
    const int dy = std::abs(c.y - p.y);
    if (std::max(dx, dy) != 1) {
      out.push_back(fmt::format("waypoints {} and {} are not 8-adjacent", i - 1, i));
      continue;
    }
    if (dx == 1 && dy == 1 && (!costmap.traversable({c.x, p.y}) || !costmap.traversable({p.x, c.y})))
      out.push_back(fmt::format("diagonal step {} -> {} cuts a blocked corner", i - 1, i));
    steps = steps + (dx == 1 && dy == 1 ? StepCount{0, 1} : StepCount{1, 0});
  }
  if (steps != path.steps) out.emplace_back("step counts do not match the waypoints");
  const double expected = steps.meters(costmap.meters_per_cell());
  // Serialized lengths carry six decimals.
  if (std::abs(expected - path.length_m) > 1e-6 * std::max(1.0, expected))
    out.push_back(fmt::format("length {} m does not equal step sum {} m", path.length_m, expected));
  return out;
}

}  // namespace mplan
