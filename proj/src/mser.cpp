#include "mplan/mser.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace mplan {

MserParams MserParams::defaults_for(const GrayImage& img, double min_feature_m) {
  MserParams p;
  const double side = min_feature_m / img.meters_per_cell();
  p.min_area_cells = std::max(1, static_cast<int>(std::floor(side * side / 2.0 + 1e-9)));
  p.max_area_cells = std::max(p.min_area_cells, static_cast<int>(img.size().cell_count() / 4));
  return p;
}

void MserParams::validate() const {
  if (delta < 1 || delta > 127) throw InvalidArgument(fmt::format("MSER delta must be in 1..127, got {}", delta));
  if (min_area_cells < 1 || min_area_cells > max_area_cells)
    throw InvalidArgument(fmt::format("MSER area bounds invalid: [{}, {}]", min_area_cells, max_area_cells));
  if (!(max_variation > 0.0)) throw InvalidArgument("MSER max_variation must be positive");
  if (!(duplicate_overlap > 0.0) || duplicate_overlap > 1.0)
    throw InvalidArgument("MSER duplicate_overlap must be in (0, 1]");
}

namespace {

constexpr int kNone = -1;

// One distinct pixel set of the component tree. A node is the component of
// {I <= t} for every t in [level, parent level).
struct TreeNode {
  int level = 0;
  int area = 0;
  int parent = kNone;
  int first_child = kNone;
  int next_sibling = kNone;
  int main_child = kNone;  // largest child; defines the downward branch
  int first_pixel = kNone;
  int min_pixel = kNone;  // smallest row-major index in the node
  double stability = std::numeric_limits<double>::infinity();
};

class ComponentTree {
 public:
  ComponentTree(std::span<const std::uint8_t> values, GridSize size) : size_(size) { build(values); }

  [[nodiscard]] const std::vector<TreeNode>& nodes() const { return nodes_; }

  void compute_stability(int delta) {
    for (auto& n : nodes_) {
      n.main_child = kNone;
      for (int c = n.first_child; c != kNone; c = nodes_[c].next_sibling)
        if (n.main_child == kNone || nodes_[c].area > nodes_[n.main_child].area ||
            (nodes_[c].area == nodes_[n.main_child].area && nodes_[c].min_pixel < nodes_[n.main_child].min_pixel))
          n.main_child = c;
    }
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      TreeNode& n = nodes_[id];
      const int end = n.parent == kNone ? 256 : nodes_[n.parent].level;
      double best = std::numeric_limits<double>::infinity();
      int up = static_cast<int>(id);
      for (int level = n.level; level < end; ++level) {
        // Ancestor covering level + delta; moves monotonically upward.
        while (nodes_[up].parent != kNone && nodes_[nodes_[up].parent].level <= level + delta)
          up = nodes_[up].parent;
        // Main-branch descendant covering level - delta, absent if the branch
        // is born later.
        int down = static_cast<int>(id);
        while (down != kNone && nodes_[down].level > level - delta) down = nodes_[down].main_child;
        const int down_area = down == kNone ? 0 : nodes_[down].area;
        const double q = static_cast<double>(nodes_[up].area - down_area) / n.area;
        best = std::min(best, q);
      }
      n.stability = best;
    }
  }

  [[nodiscard]] CellSet cells_of(int id) const {
    CellSet cells;
    cells.reserve(static_cast<std::size_t>(nodes_[id].area));
    std::vector<int> stack{id};
    while (!stack.empty()) {
      const int n = stack.back();
      stack.pop_back();
      for (int p = nodes_[n].first_pixel; p != kNone; p = pixel_next_[p]) cells.push_back(size_.cell(p));
      for (int c = nodes_[n].first_child; c != kNone; c = nodes_[c].next_sibling) stack.push_back(c);
    }
    std::sort(cells.begin(), cells.end());
    return cells;
  }

  // True if `lower` lies in the subtree of `upper`.
  [[nodiscard]] bool is_descendant(int lower, int upper) const {
    while (lower != kNone && nodes_[lower].level <= nodes_[upper].level) {
      if (lower == upper) return true;
      lower = nodes_[lower].parent;
    }
    return false;
  }

 private:
  int find(int p) {
    while (uf_parent_[p] != p) {
      uf_parent_[p] = uf_parent_[uf_parent_[p]];
      p = uf_parent_[p];
    }
    return p;
  }

  // First contact with a root during the current level: its existing node
  // becomes a pending child of whatever node the root forms at this level.
  void touch(int root, int level, std::vector<int>& touched) {
    if (stamp_[root] == level) return;
    stamp_[root] = level;
    child_head_[root] = child_tail_[root] = node_of_root_[root];
    if (node_of_root_[root] != kNone) nodes_[node_of_root_[root]].next_sibling = kNone;
    pix_head_[root] = pix_tail_[root] = kNone;
    touched.push_back(root);
  }

  void append_children(int into, int from) {
    if (child_head_[from] == kNone) return;
    if (child_head_[into] == kNone) {
      child_head_[into] = child_head_[from];
    } else {
      nodes_[child_tail_[into]].next_sibling = child_head_[from];
    }
    child_tail_[into] = child_tail_[from];
  }

  void append_pixels(int into, int from) {
    if (pix_head_[from] == kNone) return;
    if (pix_head_[into] == kNone) {
      pix_head_[into] = pix_head_[from];
    } else {
      pixel_next_[pix_tail_[into]] = pix_head_[from];
    }
    pix_tail_[into] = pix_tail_[from];
  }

  void build(std::span<const std::uint8_t> values) {
    const int n = static_cast<int>(values.size());
    uf_parent_.assign(n, kNone);
    uf_size_.assign(n, 0);
    node_of_root_.assign(n, kNone);
    stamp_.assign(n, -1);
    child_head_.assign(n, kNone);
    child_tail_.assign(n, kNone);
    pix_head_.assign(n, kNone);
    pix_tail_.assign(n, kNone);
    pixel_next_.assign(n, kNone);

    std::array<std::vector<int>, 256> buckets;
    for (int i = 0; i < n; ++i) buckets[values[i]].push_back(i);

    const int w = size_.width;
    const int h = size_.height;
    std::vector<int> touched;
    for (int level = 0; level < 256; ++level) {
      touched.clear();
      for (const int p : buckets[level]) {
        uf_parent_[p] = p;
        uf_size_[p] = 1;
        touch(p, level, touched);
        pix_head_[p] = pix_tail_[p] = p;

        const int x = p % w;
        const int y = p / w;
        const std::array<int, 4> neighbors{x > 0 ? p - 1 : kNone, x + 1 < w ? p + 1 : kNone,
                                           y > 0 ? p - w : kNone, y + 1 < h ? p + w : kNone};
        for (const int q : neighbors) {
          if (q == kNone || uf_parent_[q] == kNone) continue;
          int a = find(p);
          int b = find(q);
          if (a == b) continue;
          touch(b, level, touched);
          if (uf_size_[a] < uf_size_[b] || (uf_size_[a] == uf_size_[b] && b < a)) std::swap(a, b);
          uf_parent_[b] = a;
          uf_size_[a] += uf_size_[b];
          append_children(a, b);
          append_pixels(a, b);
        }
      }
      for (const int r : touched) {
        if (find(r) != r || stamp_[r] != level) continue;
        stamp_[r] = level + 256;  // finalized; a later touch at this level cannot recur
        const int id = static_cast<int>(nodes_.size());
        TreeNode node;
        node.level = level;
        node.area = uf_size_[r];
        node.first_child = child_head_[r];
        node.first_pixel = pix_head_[r];
        node.min_pixel = std::numeric_limits<int>::max();
        for (int p = node.first_pixel; p != kNone; p = pixel_next_[p]) node.min_pixel = std::min(node.min_pixel, p);
        for (int c = node.first_child; c != kNone; c = nodes_[c].next_sibling)
          node.min_pixel = std::min(node.min_pixel, nodes_[c].min_pixel);
        nodes_.push_back(node);
        for (int c = node.first_child; c != kNone; c = nodes_[c].next_sibling) nodes_[c].parent = id;
        node_of_root_[r] = id;
      }
    }
  }

  GridSize size_;
  std::vector<TreeNode> nodes_;
  std::vector<int> uf_parent_, uf_size_, node_of_root_, stamp_;
  std::vector<int> child_head_, child_tail_, pix_head_, pix_tail_, pixel_next_;
};

BoundingBox bounding_box(const CellSet& cells) {
  BoundingBox b{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
  for (const Cell c : cells) {
    b.x_min = std::min(b.x_min, c.x);
    b.y_min = std::min(b.y_min, c.y);
    b.x_max = std::max(b.x_max, c.x);
    b.y_max = std::max(b.y_max, c.y);
  }
  return b;
}

std::vector<ExtremalRegion> detect_polarity(const GrayImage& img, const MserParams& params, Polarity polarity) {
  std::vector<std::uint8_t> values(img.pixels().begin(), img.pixels().end());
  if (polarity == Polarity::Bright)
    for (auto& v : values) v = static_cast<std::uint8_t>(255 - v);

  ComponentTree tree(values, img.size());
  tree.compute_stability(params.delta);
  const auto& nodes = tree.nodes();

  std::vector<int> picked;
  for (int id = 0; id < static_cast<int>(nodes.size()); ++id) {
    const TreeNode& n = nodes[id];
    if (n.area < params.min_area_cells || n.area > params.max_area_cells) continue;
    if (n.stability > params.max_variation) continue;
    if (n.parent != kNone && n.stability > nodes[n.parent].stability) continue;
    if (n.main_child != kNone && n.stability > nodes[n.main_child].stability) continue;
    picked.push_back(id);
  }

  // Most stable first; among nested near-duplicates only the first survives.
  std::vector<int> order = picked;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const TreeNode& x = nodes[a];
    const TreeNode& y = nodes[b];
    if (x.stability != y.stability) return x.stability < y.stability;
    if (x.level != y.level) return x.level < y.level;
    return x.min_pixel < y.min_pixel;
  });
  std::vector<int> kept;
  for (const int id : order) {
    bool duplicate = false;
    for (const int k : kept) {
      const int small = nodes[id].area <= nodes[k].area ? id : k;
      const int large = small == id ? k : id;
      const double overlap = static_cast<double>(nodes[small].area) / nodes[large].area;
      if (overlap > params.duplicate_overlap && tree.is_descendant(small, large)) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(id);
  }
  std::sort(kept.begin(), kept.end());

  std::vector<ExtremalRegion> regions;
  regions.reserve(kept.size());
  for (const int id : kept) {
    ExtremalRegion r;
    r.cells = tree.cells_of(id);
    r.level = polarity == Polarity::Dark ? nodes[id].level : 255 - nodes[id].level;
    r.stability = nodes[id].stability;
    r.polarity = polarity;
    r.bbox = bounding_box(r.cells);
    regions.push_back(std::move(r));
  }
  return regions;
}

}  // namespace

std::vector<ExtremalRegion> detect(const GrayImage& img, const MserParams& params) {
  params.validate();
  std::vector<ExtremalRegion> out;
  if (params.polarity != PolaritySelection::Bright) out = detect_polarity(img, params, Polarity::Dark);
  if (params.polarity != PolaritySelection::Dark) {
    auto bright = detect_polarity(img, params, Polarity::Bright);
    out.insert(out.end(), std::make_move_iterator(bright.begin()), std::make_move_iterator(bright.end()));
  }
  return out;
}

CellSet extract_rim(const CellSet& pit_cells, GridSize dims) {
  if (pit_cells.empty()) throw InvalidArgument("extract_rim: empty pit");
  std::vector<std::uint8_t> in_pit(dims.cell_count(), 0);
  for (const Cell c : pit_cells) {
    if (!dims.contains(c)) throw InvalidArgument(fmt::format("extract_rim: pit cell ({}, {}) out of bounds", c.x, c.y));
    in_pit[dims.index(c)] = 1;
  }
  CellSet rim;
  for (const Cell c : pit_cells) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Cell n{c.x + dx, c.y + dy};
        if (dims.contains(n) && !in_pit[dims.index(n)]) rim.push_back(n);
      }
    }
  }
  normalize(rim);
  return rim;
}

SceneLabels classify(std::span<const ExtremalRegion> regions, double meters_per_cell, const ClassifyParams& params,
                     GridSize dims) {
  if (regions.empty()) throw ClassifyError("no regions detected; cannot identify the pit");

  std::size_t pit = regions.size();
  if (params.pit_rule.kind == PitRule::Kind::LargestArea) {
    pit = 0;
    for (std::size_t i = 1; i < regions.size(); ++i)
      if (regions[i].area() > regions[pit].area()) pit = i;
  } else {
    // Smallest region containing the seed: the most specific feature.
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (!contains(regions[i].cells, params.pit_rule.seed)) continue;
      if (pit == regions.size() || regions[i].area() < regions[pit].area()) pit = i;
    }
    if (pit == regions.size())
      throw ClassifyError(fmt::format("pit seed cell ({}, {}) lies in no detected region", params.pit_rule.seed.x,
                                      params.pit_rule.seed.y));
  }

  SceneLabels labels;
  labels.pit_region = pit;
  labels.pit_cells = regions[pit].cells;

  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (i == pit) continue;
    const auto& bbox = regions[i].bbox;
    const double width_m = std::max(bbox.width(), bbox.height()) * meters_per_cell;
    if (width_m < params.obstacle_min_width_m) {
      labels.small_region_ids.push_back(i);
    } else if (width_m > params.terrain_cutoff_m) {
      labels.terrain_region_ids.push_back(i);
    } else {
      labels.obstacle_region_ids.push_back(i);
      for (const Cell c : regions[i].cells)
        if (!contains(labels.pit_cells, c)) labels.obstacle_cells.push_back(c);
    }
  }
  normalize(labels.obstacle_cells);

  for (const Cell c : extract_rim(labels.pit_cells, dims))
    if (!contains(labels.obstacle_cells, c)) labels.rim_cells.push_back(c);
  return labels;
}

}  // namespace mplan
