#pragma once

#include <cstdint>
#include <vector>

#include "mplan/common.hpp"

namespace mplan {

/// Traversal cost grid: every cell is either unit-cost or blocked.
class Costmap {
 public:
  Costmap() = default;
  Costmap(GridSize size, double meters_per_cell, std::vector<std::uint8_t> blocked)
      : size_(size), meters_per_cell_(meters_per_cell), blocked_(std::move(blocked)) {}

  [[nodiscard]] GridSize size() const { return size_; }
  [[nodiscard]] double meters_per_cell() const { return meters_per_cell_; }
  [[nodiscard]] bool in_bounds(Cell c) const { return size_.contains(c); }
  [[nodiscard]] bool blocked(Cell c) const { return blocked_[size_.index(c)] != 0; }
  [[nodiscard]] bool traversable(Cell c) const { return in_bounds(c) && !blocked(c); }

 private:
  GridSize size_;
  double meters_per_cell_ = 1.0;
  std::vector<std::uint8_t> blocked_;
};

}  // namespace mplan
