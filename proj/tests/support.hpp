#pragma once

// Random generators and brute-force reference implementations used by the
// unit and acceptance tests. Nothing here calls into the code under test
// beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "mplan/common.hpp"
#include "mplan/costmap.hpp"
#include "mplan/raster.hpp"
#include "mplan/rng.hpp"
#include "mplan/search.hpp"

namespace mplan::testing {

inline OccupancyGrid random_grid(Rng& rng, GridSize size, double density, double mpc = 1.0) {
  OccupancyGrid g(size, mpc);
  for (int y = 0; y < size.height; ++y)
    for (int x = 0; x < size.width; ++x) g.set({x, y}, rng.uniform01() < density);
  return g;
}

inline Costmap random_costmap(Rng& rng, GridSize size, double density, double mpc = 1.0) {
  std::vector<std::uint8_t> blocked(size.cell_count());
  for (auto& b : blocked) b = rng.uniform01() < density ? 1 : 0;
  return {size, mpc, std::move(blocked)};
}

inline Cell random_free_cell(Rng& rng, const Costmap& cm) {
  for (;;) {
    const Cell c{rng.uniform_int(0, cm.size().width - 1), rng.uniform_int(0, cm.size().height - 1)};
    if (!cm.blocked(c)) return c;
  }
}

inline GrayImage random_image(Rng& rng, GridSize size, int lo, int hi) {
  std::vector<std::uint8_t> px(size.cell_count());
  for (auto& p : px) p = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
  return {size.width, size.height, 1.0, std::move(px)};
}

// ---------------------------------------------------------------------------
// Shortest paths: Bellman-Ford style relaxation to a fixed point, with costs
// compared exactly as a + b*sqrt(2).

inline bool cost_less(StepCount a, StepCount b) {
  // a.axial + a.diag*r < b.axial + b.diag*r with r = sqrt(2), via integers.
  const std::int64_t p = a.axial - b.axial;  // p + q*r < 0 ?
  const std::int64_t q = a.diagonal - b.diagonal;
  if (q == 0) return p < 0;
  if (p <= 0 && q <= 0) return true;
  if (p >= 0 && q >= 0) return false;
  // Opposite signs: compare p^2 with 2 q^2.
  const std::int64_t lhs = p * p;
  const std::int64_t rhs = 2 * q * q;
  return p < 0 ? lhs > rhs : lhs < rhs;
}

inline bool step_ok(const Costmap& cm, Cell a, int dx, int dy) {
  const Cell b{a.x + dx, a.y + dy};
  if (!cm.traversable(b)) return false;
  if (dx != 0 && dy != 0)
    return cm.traversable({a.x + dx, a.y}) && cm.traversable({a.x, a.y + dy});
  return true;
}

/// Exact shortest cost from `start` to `goal`, if reachable.
inline std::optional<StepCount> reference_cost(const Costmap& cm, Cell start, Cell goal) {
  const GridSize size = cm.size();
  std::vector<std::optional<StepCount>> dist(size.cell_count());
  dist[size.index(start)] = StepCount{0, 0};
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < size.height; ++y)
      for (int x = 0; x < size.width; ++x) {
        const auto& d = dist[size.index({x, y})];
        if (!d) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if ((dx == 0 && dy == 0) || !step_ok(cm, {x, y}, dx, dy)) continue;
            const StepCount next = *d + (dx != 0 && dy != 0 ? StepCount{0, 1} : StepCount{1, 0});
            auto& nd = dist[size.index({x + dx, y + dy})];
            if (!nd || cost_less(next, *nd)) {
              nd = next;
              changed = true;
            }
          }
      }
  }
  return dist[size.index(goal)];
}

// ---------------------------------------------------------------------------
// Dilation by definition: a cell is free iff every footprint cell around it
// is in bounds and free.

inline OccupancyGrid reference_dilation(const OccupancyGrid& grid, const std::vector<Offset>& footprint) {
  OccupancyGrid out(grid.size(), grid.meters_per_cell());
  for (int y = 0; y < grid.height(); ++y)
    for (int x = 0; x < grid.width(); ++x) {
      bool blocked = false;
      for (const Offset o : footprint) {
        const Cell c{x + o.dx, y + o.dy};
        if (!grid.size().contains(c) || grid.occupied(c)) {
          blocked = true;
          break;
        }
      }
      out.set({x, y}, blocked);
    }
  return out;
}

inline std::vector<Offset> reference_disk(int r) {
  std::vector<Offset> out;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx)
      if (dx * dx + dy * dy <= r * r) out.push_back({dx, dy});
  return out;
}

inline std::vector<Offset> reference_square(int h) {
  std::vector<Offset> out;
  for (int dy = -h; dy <= h; ++dy)
    for (int dx = -h; dx <= h; ++dx) out.push_back({dx, dy});
  return out;
}

// ---------------------------------------------------------------------------
// MSER by flood fill at every threshold.

struct ReferenceRegion {
  CellSet cells;
  int level = 0;
  double stability = 0.0;
};

class ReferenceMser {
 public:
  ReferenceMser(const GrayImage& img, bool bright) : size_(img.size()) {
    values_.resize(size_.cell_count());
    for (std::size_t i = 0; i < values_.size(); ++i)
      values_[i] = bright ? 255 - img.pixels()[i] : img.pixels()[i];
    labels_.assign(256, std::vector<int>(size_.cell_count(), -1));
    areas_.assign(256, {});
    for (int t = 0; t < 256; ++t) label_level(t);
  }

  /// Regions selected exactly as the detector documents, sorted by cells.
  std::vector<ReferenceRegion> detect(int delta, int min_area, int max_area, double max_variation,
                                      double duplicate_overlap) {
    struct Node {
      int birth, label, area, min_pixel;
      double s;
    };
    std::vector<Node> all;
    for (int t = 0; t < 256; ++t)
      for (int lab = 0; lab < static_cast<int>(areas_[t].size()); ++lab)
        if (birth_of(t, lab) == t) all.push_back({t, lab, areas_[t][lab], min_pixel(t, lab), stability(t, lab, delta)});

    auto find = [&](int birth, int lab) -> const Node& {
      for (const Node& n : all)
        if (n.birth == birth && n.label == lab) return n;
      throw std::logic_error("node not found");
    };

    std::vector<Node> picked;
    for (const Node& n : all) {
      if (n.area < min_area || n.area > max_area || n.s > max_variation) continue;
      if (auto p = parent(n.birth, n.label)) {
        if (n.s > find(p->first, p->second).s) continue;
      }
      if (auto c = main_child(n.birth, n.label)) {
        if (n.s > find(c->first, c->second).s) continue;
      }
      picked.push_back(n);
    }
    std::sort(picked.begin(), picked.end(), [](const Node& a, const Node& b) {
      if (a.s != b.s) return a.s < b.s;
      if (a.birth != b.birth) return a.birth < b.birth;
      return a.min_pixel < b.min_pixel;
    });
    std::vector<ReferenceRegion> kept;
    for (const Node& n : picked) {
      CellSet cells = cells_of(n.birth, n.label);
      bool dup = false;
      for (const auto& k : kept) {
        const CellSet& small = cells.size() <= k.cells.size() ? cells : k.cells;
        const CellSet& large = cells.size() <= k.cells.size() ? k.cells : cells;
        const bool nested = std::includes(large.begin(), large.end(), small.begin(), small.end());
        if (nested && static_cast<double>(small.size()) / large.size() > duplicate_overlap) {
          dup = true;
          break;
        }
      }
      if (!dup) kept.push_back({std::move(cells), n.birth, n.s});
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.cells < b.cells; });
    return kept;
  }

 private:
  void label_level(int t) {
    auto& lab = labels_[t];
    int next = 0;
    for (std::size_t i = 0; i < lab.size(); ++i) {
      if (values_[i] > t || lab[i] != -1) continue;
      int area = 0;
      std::deque<std::size_t> queue{i};
      lab[i] = next;
      while (!queue.empty()) {
        const std::size_t p = queue.front();
        queue.pop_front();
        ++area;
        const Cell c = size_.cell(p);
        const Cell nbrs[4] = {{c.x - 1, c.y}, {c.x + 1, c.y}, {c.x, c.y - 1}, {c.x, c.y + 1}};
        for (const Cell n : nbrs) {
          if (!size_.contains(n)) continue;
          const std::size_t q = size_.index(n);
          if (values_[q] <= t && lab[q] == -1) {
            lab[q] = next;
            queue.push_back(q);
          }
        }
      }
      areas_[t].push_back(area);
      ++next;
    }
  }

  [[nodiscard]] std::size_t rep(int t, int lab) const {
    for (std::size_t i = 0; i < labels_[t].size(); ++i)
      if (labels_[t][i] == lab) return i;
    throw std::logic_error("empty label");
  }

  [[nodiscard]] int min_pixel(int t, int lab) const { return static_cast<int>(rep(t, lab)); }

  // Lowest level at which the component has the same pixel set.
  [[nodiscard]] int birth_of(int t, int lab) const {
    const std::size_t p = rep(t, lab);
    const int area = areas_[t][lab];
    int b = t;
    while (b > 0 && labels_[b - 1][p] != -1 && areas_[b - 1][labels_[b - 1][p]] == area) --b;
    return b;
  }

  // Component holding `p` at `t`, as (birth, label at birth).
  [[nodiscard]] std::pair<int, int> node_at(std::size_t p, int t) const {
    const int b = birth_of(t, labels_[t][p]);
    return {b, labels_[b][p]};
  }

  [[nodiscard]] int death_of(int birth, int lab) const {
    const std::size_t p = rep(birth, lab);
    const int area = areas_[birth][lab];
    int d = birth;
    while (d < 256 && areas_[d][labels_[d][p]] == area) ++d;
    return d;
  }

  [[nodiscard]] std::optional<std::pair<int, int>> parent(int birth, int lab) const {
    const int d = death_of(birth, lab);
    if (d >= 256) return std::nullopt;
    return node_at(rep(birth, lab), d);
  }

  // Largest component one level below the birth, ties to the smallest cell.
  [[nodiscard]] std::optional<std::pair<int, int>> main_child(int birth, int lab) const {
    if (birth == 0) return std::nullopt;
    const int below = birth - 1;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < labels_[birth].size(); ++i) {
      if (labels_[birth][i] != lab || labels_[below][i] == -1) continue;
      const int a = areas_[below][labels_[below][i]];
      if (!best || a > areas_[below][labels_[below][*best]]) best = i;  // first hit is the smallest cell
    }
    if (!best) return std::nullopt;
    return node_at(*best, below);
  }

  [[nodiscard]] double stability(int birth, int lab, int delta) const {
    const std::size_t p = rep(birth, lab);
    const int area = areas_[birth][lab];
    const int death = death_of(birth, lab);
    double best = std::numeric_limits<double>::infinity();
    for (int l = birth; l < death; ++l) {
      const int up = std::min(255, l + delta);
      const int a_plus = areas_[up][labels_[up][p]];
      int a_minus = 0;
      std::optional<std::pair<int, int>> node = std::pair{birth, lab};
      while (node && node->first > l - delta) node = main_child(node->first, node->second);
      if (node) a_minus = areas_[node->first][node->second];
      best = std::min(best, static_cast<double>(a_plus - a_minus) / area);
    }
    return best;
  }

  [[nodiscard]] CellSet cells_of(int t, int lab) const {
    CellSet out;
    for (std::size_t i = 0; i < labels_[t].size(); ++i)
      if (labels_[t][i] == lab) out.push_back(size_.cell(i));
    return out;
  }

  GridSize size_;
  std::vector<int> values_;
  std::vector<std::vector<int>> labels_;  // per level, component label per pixel
  std::vector<std::vector<int>> areas_;   // per level, area per label
};

}  // namespace mplan::testing
