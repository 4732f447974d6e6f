#include "mplan/common.hpp"

#include <algorithm>

namespace mplan {

void normalize(CellSet& cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
}

bool contains(const CellSet& sorted_cells, Cell c) {
  return std::binary_search(sorted_cells.begin(), sorted_cells.end(), c);
}

}  // namespace mplan
